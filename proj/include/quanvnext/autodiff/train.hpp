#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "quanvnext/autodiff/nadam.hpp"
#include "quanvnext/data/pipeline.hpp"
#include "quanvnext/model/quanvnext.hpp"

namespace quanvnext::autodiff {

// Which epoch's weights become the selected model.
enum class Selection {
  kValidation,  // best accuracy on held-out train subjects (default)
  kTest,        // best accuracy on the test set, as in the original protocol
  kLast,
};

Selection parse_selection(const std::string& name);
std::string selection_name(Selection s);

// 0.00015 for dataset-1, 0.0025 for dataset-2 and custom configs.
double default_learning_rate(const std::string& preset);

struct TrainOptions {
  int epochs = 300;
  std::size_t batch_size = 64;
  double learning_rate = 0.0025;
  std::uint64_t seed = 0;
  // When set, epoch_{n}.ckpt is written here after every epoch (epoch_0 is the
  // initialization).
  std::filesystem::path checkpoint_dir;
  std::string checkpoint_metadata = "{}";
  Selection selection = Selection::kValidation;
  // Called after each epoch; handy for progress output.
  std::function<void(int epoch, double train_loss)> on_epoch;
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double val_accuracy = 0.0;
  double val_mcc = 0.0;
  double val_auc = 0.0;
};

struct TrainResult {
  model::Model final_model;
  model::Model selected_model;
  int selected_epoch = 0;
  std::vector<EpochLog> log;
};

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> gradient;  // follows Model::trainable()
};

// Cross-entropy of one window and its gradient over all trainable parameters.
LossAndGradient sample_gradient(const model::Model& model, const Tensor& x, int label);

// Mean loss and mean gradient over the listed windows. Per-sample work may run
// in parallel; the reduction is always in index order.
LossAndGradient batch_gradient(const model::Model& model, const std::vector<data::Window>& windows,
                               std::span<const std::size_t> indices);

// Mini-batch NAdam. `monitor` scores each epoch for the metric log and for
// checkpoint selection (pass validation or test windows per `selection`).
// Throws std::runtime_error if the loss becomes NaN.
TrainResult train(model::Model model, const std::vector<data::Window>& train_set,
                  const std::vector<data::Window>& monitor, const TrainOptions& options);

// epoch,train_loss,val_accuracy,val_mcc,val_auc with 9 significant digits.
std::string metrics_csv(const std::vector<EpochLog>& log);

}  // namespace quanvnext::autodiff
