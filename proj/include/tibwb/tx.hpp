#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tibwb/dsp.hpp"
#include "tibwb/preamble.hpp"
#include "tibwb/types.hpp"

namespace tibwb {

/// Waveform and frame parameters. Defaults reproduce the reference setup
/// (64 carriers, 42 symbols, roll-off 0.5, ZC root 34 of length 95 padded to 96).
struct SystemConfig {
  int n_subcarriers = 64;
  int n_symbols = 42;
  double rolloff = 0.5;
  ZcSpec zc{};
  int n_zp = 32;
  double boost_db = 0.0;
  bool coded = false;
  int interleave_words = 10;

  /// Samples kept per windowed OFDM symbol, N(1+beta).
  int windowed_len() const { return static_cast<int>(std::lround(n_subcarriers * (1.0 + rolloff))); }
  /// N_b = N_s N (1+beta).
  int block_len() const { return n_symbols * windowed_len(); }
  int preamble_len() const { return n_zp + zc.pad_to; }
  int frame_len() const { return preamble_len() + block_len() + n_zp; }
  int symbols_per_block() const { return n_symbols * n_subcarriers; }
  int coded_bits_per_block() const { return 2 * symbols_per_block(); }
  /// Exactly-zero samples at the head of every payload block.
  int leading_zeros() const { return rolloff > 0.0 ? n_symbols : 0; }

  void validate() const;
  bool operator==(const SystemConfig&) const = default;
};

/// SRRC time window of length 2N; entry j holds h_n for n = j - N.
template <typename Scalar = double>
RVector<Scalar> srrc_window(int n, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("srrc_window: beta must lie in [0, 1]");
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("srrc_window: N must be a positive even count");
  const double lo = n / 2.0 * (1.0 - beta);
  const double hi = n / 2.0 * (1.0 + beta);
  if (std::abs(lo - std::round(lo)) > 1e-9 || std::abs(hi - std::round(hi)) > 1e-9)
    throw std::invalid_argument("srrc_window: N(1 +/- beta)/2 must be integers");
  RVector<Scalar> h(2 * n);
  for (int j = 0; j < 2 * n; ++j) {
    const int idx = j - n;
    const double a = std::abs(idx);
    double v;
    if (beta == 0.0) {
      v = (idx >= -n / 2 && idx < n / 2) ? 1.0 : 0.0;
    } else if (a < lo) {
      v = 1.0;
    } else if (a < hi) {
      v = std::cos(std::numbers::pi / (4.0 * beta) * (2.0 * a / n - (1.0 - beta)));
    } else {
      v = 0.0;
    }
    h(j) = static_cast<Scalar>(v);
  }
  return h;
}

/// Gray QPSK: 00 -> (+1+j)/sqrt2, 01 -> (-1+j)/sqrt2, 11 -> (-1-j)/sqrt2, 10 -> (+1-j)/sqrt2.
ComplexBuffer map_qpsk(const Bits& bits);
Bits demap_qpsk_hard(const ComplexBuffer& symbols);
/// Nearest QPSK constellation point per sample.
ComplexBuffer decide_qpsk(const ComplexBuffer& symbols);

/// Row-major read of a (rows x cols) column-stacked symbol matrix.
ComplexBuffer interleave(const Eigen::Ref<const Eigen::MatrixXcd>& columns);
/// Inverse of interleave: returns the (rows x cols) matrix.
Eigen::MatrixXcd deinterleave(const ComplexBuffer& samples, Index rows, Index cols);

/// N_s windowed OFDM symbols packed and sample-interleaved into one block.
ComplexBuffer build_block(const ComplexBuffer& data_symbols, const SystemConfig& cfg);

struct TibwbFrame {
  PreambleBlock preamble;
  ComplexBuffer payload;
  ComplexBuffer trailing_zp;
  Bits tx_bits;

  Index size() const { return preamble.size() + payload.size() + trailing_zp.size(); }
  ComplexBuffer samples() const;
};

TibwbFrame assemble_frame(const ComplexBuffer& payload, const SystemConfig& cfg);

/// Uncoded frame carrying 2 N_s N random bits.
TibwbFrame random_uncoded_frame(const SystemConfig& cfg, dsp::RngStream& rng);

}  // namespace tibwb
