#pragma once

#include <limits>

#include "tibwb/dsp.hpp"
#include "tibwb/types.hpp"

namespace tibwb {

/// Linear per-sample SNR against the unit data power. gamma may be +inf (noiseless).
struct SnrPoint {
  double gamma = std::numeric_limits<double>::infinity();

  static SnrPoint from_db(double db) { return {dsp::db_to_linear(db)}; }
  static SnrPoint noiseless() { return {}; }
  double noise_variance() const { return std::isinf(gamma) ? 0.0 : 1.0 / gamma; }
  double db() const { return dsp::linear_to_db(gamma); }
};

struct ChannelRealization {
  ComplexBuffer taps;
  RealBuffer power_profile;

  Index length() const { return taps.size(); }
  /// Deterministic channel from given taps (profile set to |tap|^2).
  static ChannelRealization fixed(const ComplexBuffer& taps);
};

/// Uncorrelated Rayleigh taps with a uniform power-delay profile (sum 1).
ChannelRealization draw_channel(dsp::RngStream& rng, int taps, int n_zp = 32);

/// Linear convolution with the taps plus AWGN of variance 1/gamma.
ComplexBuffer apply(const ComplexBuffer& frame, const ChannelRealization& ch, SnrPoint snr,
                    dsp::RngStream& rng);

/// DFT of the zero-padded taps.
ComplexBuffer exact_cfr(const ChannelRealization& ch, Index size);

}  // namespace tibwb
