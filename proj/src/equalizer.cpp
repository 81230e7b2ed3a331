#include "tibwb/equalizer.hpp"

#include <algorithm>
#include <stdexcept>

#include "tibwb/dsp.hpp"

namespace tibwb {

std::string to_string(EqualizerKind k) {
  switch (k) {
    case EqualizerKind::ZF: return "zf";
    case EqualizerKind::MMSE: return "mmse";
    case EqualizerKind::IBDFE: return "ibdfe";
  }
  return "?";
}

EqualizerKind parse_equalizer(const std::string& s) {
  if (s == "zf") return EqualizerKind::ZF;
  if (s == "mmse") return EqualizerKind::MMSE;
  if (s == "ibdfe") return EqualizerKind::IBDFE;
  throw std::invalid_argument("unknown equalizer '" + s + "' (expected zf, mmse or ibdfe)");
}

EqualizerWeights zf_weights(const CfrEstimate& cfr) {
  EqualizerWeights w;
  w.feedforward = zf_filter(cfr.values);
  return w;
}

EqualizerWeights mmse_weights(const CfrEstimate& cfr, SnrPoint snr) {
  if (!(snr.gamma > 0.0)) throw std::invalid_argument("mmse_weights: gamma must be positive");
  EqualizerWeights w;
  w.feedforward = mmse_filter(cfr.values, snr.gamma);
  return w;
}

EqualizerWeights ibdfe_weights(const CfrEstimate& cfr, SnrPoint snr, double rho, int iteration) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("ibdfe_weights: rho must lie in [0, 1]");
  if (!(snr.gamma > 0.0)) throw std::invalid_argument("ibdfe_weights: gamma must be positive");
  if (std::isinf(snr.gamma) && rho == 1.0)
    throw std::invalid_argument("ibdfe_weights: rho = 1 without noise leaves the feedforward undefined");
  const ComplexBuffer& h = cfr.values;
  EqualizerWeights w;
  w.iteration = iteration;
  w.rho = rho;
  w.feedforward = ibdfe_feedforward(h, snr.gamma, rho);
  const double gain = (w.feedforward.array() * h.array()).real().mean();
  w.kappa = gain > 0.0 ? 1.0 / gain : 1.0;
  w.feedforward *= w.kappa;
  w.feedback = (rho * ((w.feedforward.array() * h.array()) - 1.0)).matrix();
  return w;
}

ComplexBuffer unformat(const ComplexBuffer& block_freq, const SystemConfig& cfg) {
  const int n = cfg.n_subcarriers;
  const int w = cfg.windowed_len();
  if (block_freq.size() != cfg.block_len()) throw std::invalid_argument("unformat: block must have N_b samples");
  const Eigen::MatrixXcd m = deinterleave(dsp::idft(block_freq), w, cfg.n_symbols);
  const RealBuffer h = srrc_window<double>(n, cfg.rolloff);
  const double scale = 1.0 / std::sqrt(static_cast<double>(w));
  const int first = n - w / 2;
  ComplexBuffer out(cfg.symbols_per_block());
  ComplexBuffer fold(n);
  for (int i = 0; i < cfg.n_symbols; ++i) {
    fold.setZero();
    for (int r = 0; r < w; ++r) {
      const int j = first + r;
      fold(j % n) += m(r, i) * h(j);
    }
    out.segment(static_cast<Index>(i) * n, n) = dsp::dft(fold) * scale;
  }
  return out;
}

ComplexBuffer reformat(const ComplexBuffer& symbols, const SystemConfig& cfg) {
  return dsp::dft(build_block(symbols, cfg));
}

double estimate_rho(const ComplexBuffer& decided, const ComplexBuffer& soft) {
  if (decided.size() != soft.size()) throw std::invalid_argument("estimate_rho: length mismatch");
  const double e = soft.squaredNorm();
  if (e <= 0.0) return 0.0;
  // soft.dot(decided) = sum conj(soft) decided
  const double r = std::abs(soft.dot(decided)) / e;
  return std::clamp(r, 0.0, 1.0);
}

double estimate_rho(const EqualizedBlock& decided, const EqualizedBlock& soft) {
  return estimate_rho(decided.decided_symbols, soft.soft_symbols);
}

namespace {

void finish_block(EqualizedBlock& b, const SystemConfig& cfg) {
  b.soft_symbols = unformat(b.freq_symbols, cfg);
  b.decided_symbols = decide_qpsk(b.soft_symbols);
  b.decided = reformat(b.decided_symbols, cfg);
  b.bits = demap_qpsk_hard(b.soft_symbols);
  b.rho_next = estimate_rho(b.decided_symbols, b.soft_symbols);
}

}  // namespace

EqualizedBlock linear_equalize(const ComplexBuffer& y, const EqualizerWeights& w, const SystemConfig& cfg) {
  if (y.size() != w.feedforward.size()) throw std::invalid_argument("linear_equalize: length mismatch");
  EqualizedBlock b;
  b.iteration = w.iteration;
  b.freq_symbols = (w.feedforward.array() * y.array()).matrix();
  finish_block(b, cfg);
  return b;
}

EqualizedBlock ibdfe_iterate(const ComplexBuffer& y, const CfrEstimate& cfr, SnrPoint snr,
                             const EqualizedBlock* prev, double rho, const SystemConfig& cfg) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("ibdfe_iterate: rho must lie in [0, 1]");
  if (y.size() != cfr.values.size()) throw std::invalid_argument("ibdfe_iterate: length mismatch");
  const double used_rho = prev ? rho : 0.0;
  const int iteration = prev ? prev->iteration + 1 : 1;
  const EqualizerWeights w = ibdfe_weights(cfr, snr, used_rho, iteration);
  EqualizedBlock b;
  b.iteration = iteration;
  b.rho = used_rho;
  b.freq_symbols = (w.feedforward.array() * y.array()).matrix();
  if (prev) b.freq_symbols -= (w.feedback->array() * prev->decided.array()).matrix();
  finish_block(b, cfg);
  return b;
}

}  // namespace tibwb
