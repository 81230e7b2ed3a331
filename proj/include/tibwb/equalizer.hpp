#pragma once

#include <optional>
#include <string>

#include "tibwb/channel.hpp"
#include "tibwb/estimation.hpp"
#include "tibwb/tx.hpp"
#include "tibwb/types.hpp"

namespace tibwb {

enum class EqualizerKind { ZF, MMSE, IBDFE };

std::string to_string(EqualizerKind k);
EqualizerKind parse_equalizer(const std::string& s);

/// Deep-fade guard for the zero-forcing inverse.
inline constexpr double kZfFloor = 1e-9;

/// F_k = 1/H_k, with |H_k| < 1e-9 replaced by a 1e9-magnitude gain of matching phase.
template <typename Derived>
CVector<RealOf<Derived>> zf_filter(const Eigen::MatrixBase<Derived>& h) {
  using Real = RealOf<Derived>;
  CVector<Real> f(h.size());
  for (Index k = 0; k < h.size(); ++k) {
    const std::complex<Real> v = h(k);
    const Real mag = std::abs(v);
    if (mag < Real(kZfFloor))
      f(k) = mag > Real(0) ? std::polar(Real(1) / Real(kZfFloor), -std::arg(v))
                           : std::complex<Real>(Real(1) / Real(kZfFloor));
    else
      f(k) = Real(1) / v;
  }
  return f;
}

/// F_k = H_k^* / (|H_k|^2 + 1/gamma).
template <typename Derived>
CVector<RealOf<Derived>> mmse_filter(const Eigen::MatrixBase<Derived>& h, double gamma) {
  using Real = RealOf<Derived>;
  const Real inv_gamma = std::isinf(gamma) ? Real(0) : Real(1.0 / gamma);
  return (h.conjugate().array() / (h.cwiseAbs2().array() + inv_gamma).template cast<std::complex<Real>>()).matrix();
}

/// Unnormalised IB-DFE feedforward H_k^* / (1/gamma + (1 - rho^2)|H_k|^2).
template <typename Derived>
CVector<RealOf<Derived>> ibdfe_feedforward(const Eigen::MatrixBase<Derived>& h, double gamma, double rho) {
  using Real = RealOf<Derived>;
  const Real inv_gamma = std::isinf(gamma) ? Real(0) : Real(1.0 / gamma);
  const Real shrink = Real(1.0 - rho * rho);
  return (h.conjugate().array() /
          (inv_gamma + shrink * h.cwiseAbs2().array()).template cast<std::complex<Real>>())
      .matrix();
}

struct EqualizerWeights {
  ComplexBuffer feedforward;
  std::optional<ComplexBuffer> feedback;
  int iteration = 1;
  double rho = 0.0;
  double kappa = 1.0;
};

EqualizerWeights zf_weights(const CfrEstimate& cfr);
EqualizerWeights mmse_weights(const CfrEstimate& cfr, SnrPoint snr);
/// kappa chosen so that mean(F_k H_k) == 1; B_k = rho (F_k H_k - 1).
EqualizerWeights ibdfe_weights(const CfrEstimate& cfr, SnrPoint snr, double rho, int iteration = 1);

struct EqualizedBlock {
  /// Equalized block spectrum X~_k.
  ComplexBuffer freq_symbols;
  /// Soft constellation-domain symbols after unformatting (N_s N entries).
  ComplexBuffer soft_symbols;
  /// Hard QPSK decisions in the constellation domain.
  ComplexBuffer decided_symbols;
  /// The same decisions carried back to the block spectrum, Xhat_k.
  ComplexBuffer decided;
  Bits bits;
  int iteration = 1;
  /// Correlation factor used for this iteration.
  double rho = 0.0;
  /// Correlation estimate to be used by the next iteration.
  double rho_next = 0.0;
};

/// Block spectrum -> constellation symbols: IDFT, deinterleave, SRRC matched
/// filter, fold the two halves, per-symbol DFT.
ComplexBuffer unformat(const ComplexBuffer& block_freq, const SystemConfig& cfg);

/// Constellation symbols -> block spectrum (build_block then the N_b-point DFT).
ComplexBuffer reformat(const ComplexBuffer& symbols, const SystemConfig& cfg);

/// |sum decided conj(soft)| / sum |soft|^2, clipped to [0, 1]; 0 for a silent soft block.
double estimate_rho(const ComplexBuffer& decided, const ComplexBuffer& soft);
double estimate_rho(const EqualizedBlock& decided, const EqualizedBlock& soft);

/// Single linear FDE pass X~ = F Y followed by decisions.
EqualizedBlock linear_equalize(const ComplexBuffer& y, const EqualizerWeights& w, const SystemConfig& cfg);

/// One IB-DFE iteration. Without a previous block rho is forced to 0 and the
/// feedback vanishes.
EqualizedBlock ibdfe_iterate(const ComplexBuffer& y, const CfrEstimate& cfr, SnrPoint snr,
                             const EqualizedBlock* prev, double rho, const SystemConfig& cfg);

}  // namespace tibwb
