#include "quanvnext/eval/explain.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <stdexcept>

#include "quanvnext/autodiff/tape.hpp"
#include "quanvnext/error.hpp"
#include "quanvnext/parallel.hpp"

namespace quanvnext::eval {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

void append_row(std::string& line, std::span<const double> values) {
  for (double v : values) {
    line += ',';
    line += fmt(v);
  }
  line += '\n';
}

std::string time_header(std::size_t n, const char* prefix) {
  std::string h;
  for (std::size_t t = 0; t < n; ++t) h += std::string(",") + prefix + std::to_string(t);
  return h;
}

// Stage outputs for one window, recorded without gradients.
std::vector<Tensor> stage_outputs(const model::Model& model, const Tensor& x) {
  autodiff::Tape tape;
  const auto trace = model::record_forward(tape, model, x, false);
  std::vector<Tensor> out;
  out.push_back(tape.value(trace.embedding));
  for (auto v : trace.blocks) out.push_back(tape.value(v));
  out.push_back(tape.value(trace.projection));
  return out;
}

}  // namespace

std::vector<std::string> activation_stages(const model::Model& model) {
  std::vector<std::string> names{"embedding"};
  for (std::size_t b = 0; b < model.blocks.size(); ++b) names.push_back("block_" + std::to_string(b + 1));
  names.push_back("projection");
  return names;
}

std::size_t highest_variance_channel(const std::vector<Tensor>& samples) {
  if (samples.empty()) throw ArgumentError("highest_variance_channel: no samples");
  const Tensor& first = samples.front();
  for (const auto& s : samples) {
    if (!s.same_shape(first)) throw ArgumentError("highest_variance_channel: shape mismatch");
  }
  const double n = static_cast<double>(samples.size());
  std::size_t best = 0;
  double best_score = -1.0;
  for (std::size_t c = 0; c < first.rows(); ++c) {
    double score = 0.0;
    for (std::size_t t = 0; t < first.cols(); ++t) {
      double mean = 0.0;
      for (const auto& s : samples) mean += s(c, t);
      mean /= n;
      double var = 0.0;
      for (const auto& s : samples) var += (s(c, t) - mean) * (s(c, t) - mean);
      score += var / n;
    }
    if (score > best_score) {
      best_score = score;
      best = c;
    }
  }
  return best;
}

ActivationExport export_activations(const model::Model& model,
                                    const std::vector<data::Window>& samples,
                                    const std::string& stage) {
  const auto stages = activation_stages(model);
  const auto it = std::find(stages.begin(), stages.end(), stage);
  if (it == stages.end()) {
    throw ArgumentError("export_activations: unknown stage '" + stage + "'");
  }
  if (samples.empty()) throw ArgumentError("export_activations: no samples");
  const std::size_t index = static_cast<std::size_t>(it - stages.begin());

  ActivationExport out;
  out.stage = stage;
  out.samples.resize(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) {
    out.samples[i] = stage_outputs(model, samples[i].signal)[index];
  });

  std::map<int, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < samples.size(); ++i) by_label[samples[i].label].push_back(i);
  const Tensor& shape = out.samples.front();
  for (const auto& [label, members] : by_label) {
    ClassActivation ca{label, members.size(), Tensor(shape.rows(), shape.cols()),
                       Tensor(shape.rows(), shape.cols())};
    const double n = static_cast<double>(members.size());
    for (std::size_t k = 0; k < shape.size(); ++k) {
      double mean = 0.0;
      for (auto i : members) mean += out.samples[i].flat()[k];
      mean /= n;
      double var = 0.0;
      for (auto i : members) {
        const double d = out.samples[i].flat()[k] - mean;
        var += d * d;
      }
      ca.mean.flat()[k] = mean;
      ca.stddev.flat()[k] = std::sqrt(var / n);
    }
    out.classes.push_back(std::move(ca));
  }
  out.representative_channel = highest_variance_channel(out.samples);
  return out;
}

Tensor stft_spectrogram(std::span<const double> signal, std::size_t window, std::size_t hop) {
  if (window == 0 || hop == 0) throw ArgumentError("stft_spectrogram: window and hop must be positive");
  if (signal.size() < window) {
    throw ArgumentError("stft_spectrogram: signal length " + std::to_string(signal.size()) +
                        " is shorter than the window " + std::to_string(window));
  }
  const std::size_t frames = (signal.size() - window) / hop + 1;
  const std::size_t bins = window / 2 + 1;
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> hann(window), cosines(window), sines(window);
  for (std::size_t n = 0; n < window; ++n) {
    hann[n] = 0.5 - 0.5 * std::cos(two_pi * static_cast<double>(n) / static_cast<double>(window));
    cosines[n] = std::cos(two_pi * static_cast<double>(n) / static_cast<double>(window));
    sines[n] = std::sin(two_pi * static_cast<double>(n) / static_cast<double>(window));
  }
  Tensor out(frames, bins);
  std::vector<double> seg(window);
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t n = 0; n < window; ++n) seg[n] = signal[f * hop + n] * hann[n];
    for (std::size_t k = 0; k < bins; ++k) {
      double re = 0.0, im = 0.0;
      for (std::size_t n = 0; n < window; ++n) {
        const std::size_t idx = (k * n) % window;  // exact phase index
        re += seg[n] * cosines[idx];
        im -= seg[n] * sines[idx];
      }
      out(f, k) = std::hypot(re, im);
    }
  }
  return out;
}

Tensor pca(const Tensor& rows, std::size_t components) {
  const auto n = static_cast<Eigen::Index>(rows.rows());
  const auto d = static_cast<Eigen::Index>(rows.cols());
  Tensor out(rows.rows(), components);
  if (n < 2 || d == 0) return out;
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = rows(i, j);
  }
  x.rowwise() -= x.colwise().mean();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinV);
  const auto& v = svd.matrixV();
  const Eigen::Index k = std::min<Eigen::Index>(static_cast<Eigen::Index>(components), v.cols());
  for (Eigen::Index c = 0; c < k; ++c) {
    if (svd.singularValues()(c) <= 1e-12 * std::max(1.0, svd.singularValues()(0))) break;
    Eigen::VectorXd axis = v.col(c);
    Eigen::Index arg = 0;
    axis.cwiseAbs().maxCoeff(&arg);
    if (axis(arg) < 0) axis = -axis;
    const Eigen::VectorXd proj = x * axis;
    for (Eigen::Index i = 0; i < n; ++i) out(i, c) = proj(i);
  }
  return out;
}

EmbeddingExport export_embeddings(const model::Model& model, const std::vector<data::Window>& data) {
  if (data.empty()) throw ArgumentError("export_embeddings: empty dataset");
  std::vector<Tensor> feats(data.size());
  parallel_for(data.size(), [&](std::size_t i) { feats[i] = stage_outputs(model, data[i].signal).back(); });
  EmbeddingExport out;
  const std::size_t dim = feats.front().size();
  out.features = Tensor(data.size(), dim);
  for (std::size_t i = 0; i < data.size(); ++i) {
    out.subject_ids.push_back(data[i].subject_id);
    out.labels.push_back(data[i].label);
    std::copy(feats[i].values().begin(), feats[i].values().end(), out.features.row(i).begin());
  }
  out.coords = pca(out.features, 2);
  return out;
}

void write_activations_csv(const std::filesystem::path& path, const ActivationExport& a,
                           const std::vector<data::Window>& samples) {
  if (samples.size() != a.samples.size()) {
    throw ArgumentError("write_activations_csv: sample count mismatch");
  }
  auto out = open_csv(path);
  const std::size_t len = a.samples.empty() ? 0 : a.samples.front().cols();
  out << "sample,subject_id,label,channel" << time_header(len, "t") << '\n';
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    for (std::size_t c = 0; c < a.samples[i].rows(); ++c) {
      std::string line = std::to_string(i) + "," + samples[i].subject_id + "," +
                         std::to_string(samples[i].label) + "," + std::to_string(c);
      append_row(line, a.samples[i].row(c));
      out << line;
    }
  }
  finish(out, path);
}

void write_activation_summary_csv(const std::filesystem::path& path, const ActivationExport& a) {
  auto out = open_csv(path);
  const std::size_t len = a.classes.empty() ? 0 : a.classes.front().mean.cols();
  out << "label,statistic,channel" << time_header(len, "t") << '\n';
  for (const auto& ca : a.classes) {
    for (const auto& [name, t] : {std::pair{"mean", &ca.mean}, std::pair{"std", &ca.stddev}}) {
      for (std::size_t c = 0; c < t->rows(); ++c) {
        std::string line = std::to_string(ca.label) + "," + name + "," + std::to_string(c);
        append_row(line, t->row(c));
        out << line;
      }
    }
  }
  finish(out, path);
}

void write_spectrogram_csv(const std::filesystem::path& path, const ActivationExport& a,
                           std::size_t window, std::size_t hop) {
  auto out = open_csv(path);
  out << "label,frame" << time_header(window / 2 + 1, "bin") << '\n';
  for (const auto& ca : a.classes) {
    const Tensor spec = stft_spectrogram(ca.mean.row(a.representative_channel), window, hop);
    for (std::size_t f = 0; f < spec.rows(); ++f) {
      std::string line = std::to_string(ca.label) + "," + std::to_string(f);
      append_row(line, spec.row(f));
      out << line;
    }
  }
  finish(out, path);
}

void write_embeddings_csv(const std::filesystem::path& path, const EmbeddingExport& e) {
  auto out = open_csv(path);
  out << "subject_id,label" << time_header(e.features.cols(), "f") << ",pc1,pc2\n";
  for (std::size_t i = 0; i < e.features.rows(); ++i) {
    std::string line = e.subject_ids[i] + "," + std::to_string(e.labels[i]);
    append_row(line, e.features.row(i));
    line.pop_back();
    append_row(line, e.coords.row(i));
    out << line;
  }
  finish(out, path);
}

}  // namespace quanvnext::eval
