#include "quanvnext/quanv/quanv1d.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "quanvnext/error.hpp"

namespace quanvnext::quanv {

int QuanvConfig::n_qubits() const noexcept {
  const auto m = static_cast<unsigned>(std::max(patch_size(), 1));
  const int n = static_cast<int>(std::bit_width(m - 1));
  return std::max(n, 1);
}

int QuanvConfig::n_filters() const noexcept {
  const int n = n_qubits();
  return (c_out + n - 1) / n;
}

void QuanvConfig::validate() const {
  if (c_in < 1 || c_out < 1 || kernel < 1 || stride < 1 || dilation < 1 || depth < 1) {
    throw ArgumentError("QuanvConfig: channels, kernel, stride, dilation and depth must be positive");
  }
  if (padding < 0) throw ArgumentError("QuanvConfig: padding must be non-negative");
  if (!(temperature > 0.0)) throw ArgumentError("QuanvConfig: temperature must be positive");
  if (n_qubits() > 20) throw ArgumentError("QuanvConfig: patch too large to simulate");
}

std::size_t output_length(std::size_t l_in, int kernel, int stride, int padding, int dilation) {
  if (kernel < 1 || stride < 1 || dilation < 1 || padding < 0) {
    throw ArgumentError("output_length: kernel, stride, dilation must be positive, padding >= 0");
  }
  const long long padded = static_cast<long long>(l_in) + 2LL * padding;
  const long long span = static_cast<long long>(dilation) * (kernel - 1) + 1;
  if (span > padded) {
    throw ArgumentError("output_length: effective kernel " + std::to_string(span) +
                        " exceeds padded length " + std::to_string(padded));
  }
  return static_cast<std::size_t>((padded - span) / stride + 1);
}

Tensor extract_patches(const Tensor& x, const QuanvConfig& cfg) {
  cfg.validate();
  if (x.rows() != static_cast<std::size_t>(cfg.c_in)) {
    throw ArgumentError("extract_patches: input has " + std::to_string(x.rows()) +
                        " channels, layer expects " + std::to_string(cfg.c_in));
  }
  const std::size_t l_in = x.cols();
  const std::size_t l_out = output_length(l_in, cfg.kernel, cfg.stride, cfg.padding, cfg.dilation);
  const auto k = static_cast<std::size_t>(cfg.kernel);
  Tensor patches(l_out, static_cast<std::size_t>(cfg.patch_size()));
  for (std::size_t t = 0; t < l_out; ++t) {
    auto row = patches.row(t);
    const long long start = static_cast<long long>(t) * cfg.stride - cfg.padding;
    for (std::size_t c = 0; c < x.rows(); ++c) {
      for (std::size_t j = 0; j < k; ++j) {
        const long long pos = start + static_cast<long long>(j) * cfg.dilation;
        if (pos >= 0 && pos < static_cast<long long>(l_in)) {
          row[c * k + j] = x(c, static_cast<std::size_t>(pos));
        }
      }
    }
  }
  return patches;
}

std::vector<double> normalize_patch(std::span<const double> patch, double temperature,
                                    std::size_t target_dim) {
  if (!(temperature > 0.0)) throw ArgumentError("normalize_patch: temperature must be positive");
  if (patch.empty() || patch.size() > target_dim) {
    throw ArgumentError("normalize_patch: patch length must be in [1, target_dim]");
  }
  std::vector<double> out(target_dim, 0.0);
  const double peak = *std::max_element(patch.begin(), patch.end());
  double total = 0.0;
  for (std::size_t i = 0; i < patch.size(); ++i) {
    out[i] = std::exp((patch[i] - peak) / temperature);
    total += out[i];
  }
  for (std::size_t i = 0; i < patch.size(); ++i) out[i] = std::sqrt(out[i] / total);
  return out;
}

QuanvLayer QuanvLayer::random(const QuanvConfig& cfg, std::mt19937_64& rng) {
  cfg.validate();
  QuanvLayer layer = identity(cfg);
  for (int f = 0; f < cfg.n_filters(); ++f) {
    const auto circuit = qsim::FilterCircuit::random(cfg.n_qubits(), cfg.depth, rng);
    for (int l = 0; l < cfg.depth; ++l) {
      const auto dst = static_cast<std::size_t>(f * cfg.depth + l);
      const auto src = static_cast<std::size_t>(l);
      std::ranges::copy(circuit.theta().row(src), layer.theta.row(dst).begin());
      std::ranges::copy(circuit.lambda().row(src), layer.lambda.row(dst).begin());
      std::ranges::copy(circuit.phi().row(src), layer.phi.row(dst).begin());
    }
  }
  return layer;
}

QuanvLayer QuanvLayer::identity(const QuanvConfig& cfg) {
  cfg.validate();
  const auto rows = static_cast<std::size_t>(cfg.n_filters() * cfg.depth);
  const auto cols = static_cast<std::size_t>(cfg.n_qubits());
  return {cfg, Tensor(rows, cols), Tensor(rows, cols), Tensor(rows, cols)};
}

void QuanvLayer::check_shapes() const {
  const auto rows = static_cast<std::size_t>(cfg.n_filters() * cfg.depth);
  const auto cols = static_cast<std::size_t>(cfg.n_qubits());
  for (const Tensor* t : {&theta, &lambda, &phi}) {
    if (t->rows() != rows || t->cols() != cols) {
      throw ArgumentError("QuanvLayer: angle tensor shape " + t->shape_string() +
                          " does not match config");
    }
  }
}

qsim::FilterCircuit QuanvLayer::filter(int f) const {
  const auto rows = static_cast<std::size_t>(cfg.depth);
  const auto cols = static_cast<std::size_t>(cfg.n_qubits());
  Tensor th(rows, cols), la(rows, cols), ph(rows, cols);
  for (std::size_t l = 0; l < rows; ++l) {
    const auto src = static_cast<std::size_t>(f) * rows + l;
    std::ranges::copy(theta.row(src), th.row(l).begin());
    std::ranges::copy(lambda.row(src), la.row(l).begin());
    std::ranges::copy(phi.row(src), ph.row(l).begin());
  }
  return {cfg.n_qubits(), cfg.depth, std::move(th), std::move(la), std::move(ph)};
}

namespace {

std::vector<qsim::CompiledFilter> compile_bank(const QuanvLayer& layer) {
  std::vector<qsim::CompiledFilter> bank;
  bank.reserve(static_cast<std::size_t>(layer.cfg.n_filters()));
  for (int f = 0; f < layer.cfg.n_filters(); ++f) bank.emplace_back(layer.filter(f));
  return bank;
}

}  // namespace

Tensor quanv1d_forward(const Tensor& x, const QuanvLayer& layer, QuanvContext* ctx) {
  layer.check_shapes();
  const QuanvConfig& cfg = layer.cfg;
  const Tensor patches = extract_patches(x, cfg);
  const std::size_t l_out = patches.rows();
  const std::size_t dim = cfg.state_dim();
  const auto n = static_cast<std::size_t>(cfg.n_qubits());
  const auto c_out = static_cast<std::size_t>(cfg.c_out);
  const auto bank = compile_bank(layer);

  Tensor out(c_out, l_out);
  Tensor amplitudes(l_out, dim);
  for (std::size_t t = 0; t < l_out; ++t) {
    const auto amp = normalize_patch(patches.row(t), cfg.temperature, dim);
    std::ranges::copy(amp, amplitudes.row(t).begin());
    for (std::size_t f = 0; f < bank.size(); ++f) {
      const auto e = bank[f].run(amp);
      for (std::size_t i = 0; i < n && f * n + i < c_out; ++i) out(f * n + i, t) = e[i];
    }
  }
  if (ctx) {
    ctx->input_length = x.cols();
    ctx->amplitudes = std::move(amplitudes);
  }
  return out;
}

QuanvGradients quanv1d_backward(const Tensor& upstream, const QuanvContext& ctx,
                                const QuanvLayer& layer) {
  if (!ctx.valid()) throw StateError("quanv1d_backward: no forward context recorded");
  layer.check_shapes();
  const QuanvConfig& cfg = layer.cfg;
  const std::size_t l_out = ctx.amplitudes.rows();
  const auto c_out = static_cast<std::size_t>(cfg.c_out);
  if (upstream.rows() != c_out || upstream.cols() != l_out) {
    throw ArgumentError("quanv1d_backward: upstream shape " + upstream.shape_string() +
                        " does not match forward output");
  }
  const auto n = static_cast<std::size_t>(cfg.n_qubits());
  const auto m = static_cast<std::size_t>(cfg.patch_size());
  const auto k = static_cast<std::size_t>(cfg.kernel);
  const auto depth = static_cast<std::size_t>(cfg.depth);
  const double inv_2t = 1.0 / (2.0 * cfg.temperature);
  const auto bank = compile_bank(layer);

  QuanvGradients grads{Tensor(layer.theta.rows(), layer.theta.cols()),
                       Tensor(layer.lambda.rows(), layer.lambda.cols()),
                       Tensor(static_cast<std::size_t>(cfg.c_in), ctx.input_length)};
  std::vector<double> u(n);
  std::vector<double> amp_grad(ctx.amplitudes.cols());
  for (std::size_t t = 0; t < l_out; ++t) {
    const auto amp = ctx.amplitudes.row(t);
    std::ranges::fill(amp_grad, 0.0);
    bool touched = false;
    for (std::size_t f = 0; f < bank.size(); ++f) {
      bool any = false;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ch = f * n + i;
        u[i] = ch < c_out ? upstream(ch, t) : 0.0;
        any = any || u[i] != 0.0;
      }
      if (!any) continue;
      touched = true;
      const auto g = bank[f].gradients(amp, u);
      for (std::size_t l = 0; l < depth; ++l) {
        for (std::size_t q = 0; q < n; ++q) {
          grads.theta(f * depth + l, q) += g.theta(l, q);
          grads.lambda(f * depth + l, q) += g.lambda(l, q);
        }
      }
      for (std::size_t j = 0; j < amp_grad.size(); ++j) amp_grad[j] += g.features[j];
    }
    if (!touched) continue;

    // a = sqrt(softmax(z/T)):  dL/dz_k = (g_k a_k - p_k Σ_j g_j a_j) / (2T)
    double ga = 0.0;
    for (std::size_t j = 0; j < m; ++j) ga += amp_grad[j] * amp[j];
    const long long start = static_cast<long long>(t) * cfg.stride - cfg.padding;
    for (std::size_t c = 0; c < static_cast<std::size_t>(cfg.c_in); ++c) {
      for (std::size_t j = 0; j < k; ++j) {
        const long long pos = start + static_cast<long long>(j) * cfg.dilation;
        if (pos < 0 || pos >= static_cast<long long>(ctx.input_length)) continue;
        const std::size_t idx = c * k + j;
        const double a = amp[idx];
        grads.input(c, static_cast<std::size_t>(pos)) += inv_2t * (amp_grad[idx] * a - a * a * ga);
      }
    }
  }
  return grads;
}

}  // namespace quanvnext::quanv
