#include "quanvnext/eval/evaluate.hpp"

#include <cmath>
#include <limits>

#include "quanvnext/autodiff/ops.hpp"
#include "quanvnext/eval/metrics.hpp"
#include "quanvnext/parallel.hpp"

namespace quanvnext::eval {

Predictions predict(const model::Model& model, const std::vector<data::Window>& windows) {
  const std::size_t n = windows.size();
  std::vector<std::vector<double>> probs(n);
  parallel_for(n, [&](std::size_t i) {
    const Tensor logits = model::quanvnext_forward(windows[i].signal, model);
    probs[i] = autodiff::softmax(logits.flat());
  });
  Predictions p;
  for (std::size_t i = 0; i < n; ++i) {
    p.positive_probability.push_back(probs[i][1]);
    p.predicted.push_back(probs[i][1] > probs[i][0] ? 1 : 0);
    p.confidence.push_back(std::max(probs[i][0], probs[i][1]));
    p.labels.push_back(windows[i].label);
  }
  return p;
}

Summary summarize(const Predictions& p) {
  Summary s;
  s.samples = p.labels.size();
  if (s.samples == 0) return s;
  const auto counts = confusion(p.predicted, p.labels);
  s.accuracy = accuracy(counts);
  s.mcc = mcc(counts);
  bool has0 = false, has1 = false;
  for (int l : p.labels) (l == 1 ? has1 : has0) = true;
  s.auc = has0 && has1 ? auc_roc(p.positive_probability, p.labels)
                       : std::numeric_limits<double>::quiet_NaN();
  std::vector<int> correct;
  double loss = 0.0;
  for (std::size_t i = 0; i < s.samples; ++i) {
    correct.push_back(p.predicted[i] == p.labels[i] ? 1 : 0);
    const double q = p.labels[i] == 1 ? p.positive_probability[i] : 1.0 - p.positive_probability[i];
    loss -= std::log(std::max(q, 1e-300));
  }
  s.ece = ece(p.confidence, correct, 10);
  s.mean_loss = loss / static_cast<double>(s.samples);
  return s;
}

Summary evaluate(const model::Model& model, const std::vector<data::Window>& windows) {
  return summarize(predict(model, windows));
}

}  // namespace quanvnext::eval
