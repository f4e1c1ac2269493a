#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace quanvnext::autodiff {

struct NAdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double momentum_decay = 0.004;
};

// Nesterov-accelerated Adam with the momentum schedule
// mu_t = beta1 * (1 - 0.5 * 0.96^(t * momentum_decay)).
class NAdam {
 public:
  NAdam(std::size_t n_params, NAdamOptions options = {});

  void step(std::span<double> params, std::span<const double> grads);

  std::size_t steps() const noexcept { return t_; }
  const std::vector<double>& first_moment() const noexcept { return m_; }
  const std::vector<double>& second_moment() const noexcept { return v_; }
  const NAdamOptions& options() const noexcept { return options_; }

 private:
  NAdamOptions options_;
  std::vector<double> m_;
  std::vector<double> v_;
  double mu_product_ = 1.0;
  std::size_t t_ = 0;
};

}  // namespace quanvnext::autodiff
