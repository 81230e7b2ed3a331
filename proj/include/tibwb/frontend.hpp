#pragma once

// Receiver block extraction. Each observation window [start, start+len) is
// turned into a circular-convolution observation by folding the channel
// spill that lands just after the window back onto its head. The first
// `wrap` samples after the window must carry no transmitted energy of their
// own: after the preamble they are the payload's leading zeros, after the
// payload they are the trailing zero pad.

#include "tibwb/tx.hpp"
#include "tibwb/types.hpp"

namespace tibwb {

/// out[j] = rx[start+len+j] for j < wrap, rx[start+j] otherwise; samples
/// rx[start+len+j] for j in [wrap, ola_end) are added on top. Indices past
/// the end of rx read as zero.
ComplexBuffer circular_window(const ComplexBuffer& rx, Index start, Index len, Index wrap, Index ola_end = 0);

/// Spill samples safely wrapped behind each window for this configuration.
inline Index wrap_len(const SystemConfig& cfg) {
  return std::min<Index>(cfg.leading_zeros(), cfg.n_zp);
}

/// [ZP, ZC] observation of N_ZP + N_p samples for a frame starting at head.
ComplexBuffer preamble_observation(const ComplexBuffer& rx, Index head, const SystemConfig& cfg);

/// N_b-point spectrum Y_k of the payload block of a frame starting at head.
ComplexBuffer payload_spectrum(const ComplexBuffer& rx, Index head, const SystemConfig& cfg);

}  // namespace tibwb
