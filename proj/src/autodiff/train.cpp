#include "quanvnext/autodiff/train.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <random>
#include <stdexcept>

#include "quanvnext/autodiff/ops.hpp"
#include "quanvnext/error.hpp"
#include "quanvnext/eval/evaluate.hpp"
#include "quanvnext/model/checkpoint.hpp"
#include "quanvnext/parallel.hpp"

namespace quanvnext::autodiff {

Selection parse_selection(const std::string& name) {
  if (name == "val" || name == "validation") return Selection::kValidation;
  if (name == "test") return Selection::kTest;
  if (name == "last") return Selection::kLast;
  throw ConfigError("unknown checkpoint selection policy '" + name + "' (val|test|last)");
}

std::string selection_name(Selection s) {
  switch (s) {
    case Selection::kValidation: return "val";
    case Selection::kTest: return "test";
    case Selection::kLast: return "last";
  }
  return "val";
}

double default_learning_rate(const std::string& preset) {
  return preset == "dataset-1" ? 0.00015 : 0.0025;
}

LossAndGradient sample_gradient(const model::Model& model, const Tensor& x, int label) {
  Tape tape;
  const auto trace = model::record_forward(tape, model, x, true);
  const Var loss = cross_entropy(tape, trace.logits, label);
  tape.backward(loss);
  LossAndGradient out;
  out.loss = tape.value(loss)(0, 0);
  out.gradient.reserve(model.parameter_count());
  for (Var p : trace.parameters) {
    const Tensor g = tape.grad(p);
    out.gradient.insert(out.gradient.end(), g.values().begin(), g.values().end());
  }
  return out;
}

LossAndGradient batch_gradient(const model::Model& model, const std::vector<data::Window>& windows,
                               std::span<const std::size_t> indices) {
  std::vector<LossAndGradient> per_sample(indices.size());
  parallel_for(indices.size(), [&](std::size_t i) {
    const auto& w = windows[indices[i]];
    per_sample[i] = sample_gradient(model, w.signal, w.label);
  });
  LossAndGradient out;
  out.gradient.assign(model.parameter_count(), 0.0);
  for (const auto& s : per_sample) {
    out.loss += s.loss;
    for (std::size_t k = 0; k < s.gradient.size(); ++k) out.gradient[k] += s.gradient[k];
  }
  const double scale = 1.0 / static_cast<double>(std::max<std::size_t>(indices.size(), 1));
  out.loss *= scale;
  for (double& g : out.gradient) g *= scale;
  return out;
}

namespace {

void write_checkpoint(const TrainOptions& o, const model::Model& m, int epoch) {
  if (o.checkpoint_dir.empty()) return;
  std::filesystem::create_directories(o.checkpoint_dir);
  model::save_checkpoint(o.checkpoint_dir / ("epoch_" + std::to_string(epoch) + ".ckpt"), m,
                         o.checkpoint_metadata);
}

EpochLog score_epoch(const model::Model& m, const std::vector<data::Window>& monitor, int epoch,
                     double loss) {
  EpochLog e{epoch, loss, std::nan(""), std::nan(""), std::nan("")};
  if (monitor.empty()) return e;
  const auto s = eval::evaluate(m, monitor);
  e.val_accuracy = s.accuracy;
  e.val_mcc = s.mcc;
  e.val_auc = s.auc;
  return e;
}

bool better(const EpochLog& candidate, const EpochLog& best) {
  if (std::isnan(best.val_accuracy)) return !std::isnan(candidate.val_accuracy);
  if (candidate.val_accuracy != best.val_accuracy) return candidate.val_accuracy > best.val_accuracy;
  const double ca = std::isnan(candidate.val_auc) ? -1.0 : candidate.val_auc;
  const double ba = std::isnan(best.val_auc) ? -1.0 : best.val_auc;
  return ca >= ba;
}

}  // namespace

TrainResult train(model::Model model, const std::vector<data::Window>& train_set,
                  const std::vector<data::Window>& monitor, const TrainOptions& options) {
  if (train_set.empty()) throw ArgumentError("train: empty training set");
  if (options.batch_size == 0) throw ArgumentError("train: batch size must be positive");
  if (options.epochs < 0) throw ArgumentError("train: epochs must be non-negative");

  std::mt19937_64 rng(options.seed);
  NAdam optimizer(model.parameter_count(), {.learning_rate = options.learning_rate});
  std::vector<double> params = model.flat_parameters();
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  write_checkpoint(options, model, 0);
  result.selected_model = model;
  result.selected_epoch = 0;
  EpochLog best{0, 0.0, std::nan(""), std::nan(""), std::nan("")};

  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t count = std::min(options.batch_size, order.size() - start);
      const std::span<const std::size_t> batch(order.data() + start, count);
      const auto lg = batch_gradient(model, train_set, batch);
      if (!std::isfinite(lg.loss)) {
        throw std::runtime_error("training diverged: non-finite loss at epoch " +
                                 std::to_string(epoch) + ", batch starting at " + std::to_string(start));
      }
      loss_sum += lg.loss * static_cast<double>(count);
      optimizer.step(params, lg.gradient);
      model.set_flat_parameters(params);
    }
    const double epoch_loss = loss_sum / static_cast<double>(order.size());
    const EpochLog entry = score_epoch(model, monitor,
                                       epoch, epoch_loss);
    result.log.push_back(entry);
    write_checkpoint(options, model, epoch);

    if (options.selection == Selection::kLast || better(entry, best)) {
      best = entry;
      result.selected_model = model;
      result.selected_epoch = epoch;
    }
    if (options.on_epoch) options.on_epoch(epoch, epoch_loss);
  }
  result.final_model = std::move(model);
  return result;
}

std::string metrics_csv(const std::vector<EpochLog>& log) {
  std::string out = "epoch,train_loss,val_accuracy,val_mcc,val_auc\n";
  char buf[160];
  for (const auto& e : log) {
    std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g,%.9g\n", e.epoch, e.train_loss,
                  e.val_accuracy, e.val_mcc, e.val_auc);
    out += buf;
  }
  return out;
}

}  // namespace quanvnext::autodiff
