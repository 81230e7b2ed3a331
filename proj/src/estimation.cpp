#include "tibwb/estimation.hpp"

#include <stdexcept>
#include <vector>

#include "tibwb/dsp.hpp"

namespace tibwb {

namespace {

constexpr double kFlagLevel = 1e-12;

}  // namespace

std::string to_string(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::Perfect: return "perfect";
    case EstimatorKind::A: return "A";
    case EstimatorKind::B: return "B";
    case EstimatorKind::C: return "C";
  }
  return "?";
}

EstimatorKind parse_estimator(const std::string& s) {
  if (s == "perfect") return EstimatorKind::Perfect;
  if (s == "A" || s == "a") return EstimatorKind::A;
  if (s == "B" || s == "b") return EstimatorKind::B;
  if (s == "C" || s == "c") return EstimatorKind::C;
  throw std::invalid_argument("unknown estimator '" + s + "' (expected perfect, A, B or C)");
}

ComplexBuffer estimate_ls(const ComplexBuffer& rx, const ComplexBuffer& tx) {
  if (rx.size() != tx.size()) throw std::invalid_argument("estimate_ls: length mismatch");
  const Index n = rx.size();
  ComplexBuffer h(n);
  std::vector<Index> valid;
  for (Index k = 0; k < n; ++k) {
    if (std::abs(tx(k)) >= kFlagLevel) {
      h(k) = rx(k) / tx(k);
      valid.push_back(k);
    }
  }
  if (valid.empty()) throw std::invalid_argument("estimate_ls: reference has no usable bins");
  if (static_cast<Index>(valid.size()) == n) return h;

  std::size_t next = 0;  // first valid index >= k
  for (Index k = 0; k < n; ++k) {
    while (next < valid.size() && valid[next] < k) ++next;
    if (next < valid.size() && valid[next] == k) continue;
    if (next == 0) {
      h(k) = h(valid.front());
    } else if (next == valid.size()) {
      h(k) = h(valid.back());
    } else {
      const Index a = valid[next - 1], b = valid[next];
      const double t = static_cast<double>(k - a) / static_cast<double>(b - a);
      h(k) = (1.0 - t) * h(a) + t * h(b);
    }
  }
  return h;
}

CfrEstimate algorithm_a(const ComplexBuffer& rx_preamble, const PreambleBlock& preamble, Index n_b,
                        std::optional<Index> cir_taps) {
  const Index m = preamble.size();
  if (rx_preamble.size() != m) throw std::invalid_argument("algorithm_a: observation must span N_ZP + N_p samples");
  if (n_b < m) throw std::invalid_argument("algorithm_a: n_b shorter than the preamble");
  const Index keep = cir_taps.value_or(preamble.n_zp > 0 ? preamble.n_zp : m);
  if (keep < 1 || keep > m) throw std::invalid_argument("algorithm_a: cir_taps must lie in [1, N_ZP + N_p]");

  const ComplexBuffer h_low = estimate_ls(dsp::dft(rx_preamble), dsp::dft(preamble.samples));
  const ComplexBuffer cir = dsp::idft(h_low);
  ComplexBuffer padded = ComplexBuffer::Zero(n_b);
  padded.head(keep) = cir.head(keep);
  return {dsp::dft(padded), EstimatorKind::A, std::nullopt};
}

CfrEstimate algorithm_b(const ComplexBuffer& rx_block, const ComplexBuffer& decided) {
  return {estimate_ls(rx_block, decided), EstimatorKind::B, std::nullopt};
}

CfrEstimate algorithm_c(const CfrEstimate& est_zc, const CfrEstimate& est_data, double var_zc, double var_data) {
  if (!(var_zc > 0.0) || !(var_data > 0.0)) throw std::invalid_argument("algorithm_c: variances must be positive");
  if (est_zc.values.size() != est_data.values.size()) throw std::invalid_argument("algorithm_c: length mismatch");
  const double w_zc = 1.0 / var_zc;
  const double w_data = std::isinf(var_data) ? 0.0 : 1.0 / var_data;
  CfrEstimate out;
  out.source = EstimatorKind::C;
  out.values = (est_data.values * w_data + est_zc.values * w_zc) / (w_data + w_zc);
  return out;
}

double estimator_mse(const CfrEstimate& est, const ComplexBuffer& truth) {
  if (est.values.size() != truth.size() || truth.size() == 0)
    throw std::invalid_argument("estimator_mse: length mismatch");
  return (est.values - truth).squaredNorm() / static_cast<double>(truth.size());
}

double analytic_var_zc(const PreambleBlock& preamble, double noise_var, std::optional<Index> cir_taps) {
  const Index m = preamble.size();
  const Index keep = cir_taps.value_or(preamble.n_zp > 0 ? preamble.n_zp : m);
  const ComplexBuffer p = dsp::dft(preamble.samples);
  double inv = 0.0;
  Index used = 0;
  for (Index k = 0; k < m; ++k) {
    const double a = std::norm(p(k));
    if (a >= kFlagLevel * kFlagLevel) {
      inv += 1.0 / a;
      ++used;
    }
  }
  // Pseudo-CIR taps each carry noise_var * mean(1/|P_k|^2); the block DFT sums `keep` of them.
  return static_cast<double>(keep) * noise_var * inv / static_cast<double>(used);
}

double analytic_var_data(const ComplexBuffer& decided, double noise_var) {
  double inv = 0.0;
  Index used = 0;
  for (Index k = 0; k < decided.size(); ++k) {
    const double a = std::norm(decided(k));
    if (a >= kFlagLevel * kFlagLevel) {
      inv += 1.0 / a;
      ++used;
    }
  }
  if (used == 0) throw std::invalid_argument("analytic_var_data: no usable bins");
  // Block-DFT noise carries N_b * noise_var per bin.
  return static_cast<double>(decided.size()) * noise_var * inv / static_cast<double>(used);
}

}  // namespace tibwb
