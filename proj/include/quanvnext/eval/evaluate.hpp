#pragma once

#include <vector>

#include "quanvnext/data/pipeline.hpp"
#include "quanvnext/model/quanvnext.hpp"

namespace quanvnext::eval {

struct Predictions {
  std::vector<double> positive_probability;
  std::vector<int> predicted;
  std::vector<int> labels;
  std::vector<double> confidence;  // max-class probability
};

// Windows are fed as-is; callers normalize beforehand.
Predictions predict(const model::Model& model, const std::vector<data::Window>& windows);

struct Summary {
  std::size_t samples = 0;
  double accuracy = 0.0;
  double mcc = 0.0;
  double auc = 0.0;  // NaN when a class is missing
  double ece = 0.0;
  double mean_loss = 0.0;
};

Summary summarize(const Predictions& p);
Summary evaluate(const model::Model& model, const std::vector<data::Window>& windows);

}  // namespace quanvnext::eval
