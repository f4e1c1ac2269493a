#include "quanvnext/autodiff/nadam.hpp"

#include <cmath>

#include "quanvnext/error.hpp"

namespace quanvnext::autodiff {

NAdam::NAdam(std::size_t n_params, NAdamOptions options)
    : options_(options), m_(n_params, 0.0), v_(n_params, 0.0) {}

void NAdam::step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw ArgumentError("NAdam::step: parameter/gradient size mismatch");
  }
  ++t_;
  const auto& o = options_;
  const double t = static_cast<double>(t_);
  const double mu = o.beta1 * (1.0 - 0.5 * std::pow(0.96, t * o.momentum_decay));
  const double mu_next = o.beta1 * (1.0 - 0.5 * std::pow(0.96, (t + 1.0) * o.momentum_decay));
  mu_product_ *= mu;
  const double mu_product_next = mu_product_ * mu_next;
  const double bias2 = 1.0 - std::pow(o.beta2, t);
  const double grad_coef = o.learning_rate * (1.0 - mu) / (1.0 - mu_product_);
  const double mom_coef = o.learning_rate * mu_next / (1.0 - mu_product_next);

  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    m_[i] = o.beta1 * m_[i] + (1.0 - o.beta1) * g;
    v_[i] = o.beta2 * v_[i] + (1.0 - o.beta2) * g * g;
    const double denom = std::sqrt(v_[i] / bias2) + o.epsilon;
    params[i] -= grad_coef * g / denom + mom_coef * m_[i] / denom;
  }
}

}  // namespace quanvnext::autodiff
