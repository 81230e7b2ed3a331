#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tibwb/dsp.hpp"
#include "tibwb/types.hpp"

namespace tibwb {

/// Zadoff-Chu root, length and zero-padded length.
struct ZcSpec {
  int root = 34;
  int length = 95;
  int pad_to = 96;

  void validate() const {
    if (length < 1 || length % 2 == 0)
      throw std::invalid_argument("ZcSpec: length must be a positive odd integer");
    if (root < 1 || root >= length)
      throw std::invalid_argument("ZcSpec: root must lie in [1, length-1], got " + std::to_string(root));
    if (std::gcd(root, length) != 1)
      throw std::invalid_argument("ZcSpec: root must be coprime with length");
    if (pad_to < length) throw std::invalid_argument("ZcSpec: pad_to must be >= length");
  }

  bool operator==(const ZcSpec&) const = default;
};

/// zc[q] = exp(-j pi root q (q+1) / length), then zero-padded to pad_to.
template <typename Scalar = double>
CVector<Scalar> generate_zc(const ZcSpec& spec) {
  spec.validate();
  CVector<Scalar> out = CVector<Scalar>::Zero(spec.pad_to);
  const std::int64_t two_n = 2 * static_cast<std::int64_t>(spec.length);
  for (std::int64_t q = 0; q < spec.length; ++q) {
    // Reduce the phase exactly in integers; exp(-j pi m / N) has period 2N in m.
    const std::int64_t m = (static_cast<std::int64_t>(spec.root) * ((q * (q + 1)) % two_n)) % two_n;
    const Scalar phase = -std::numbers::pi_v<Scalar> * static_cast<Scalar>(m) / static_cast<Scalar>(spec.length);
    out(q) = std::polar(Scalar(1), phase);
  }
  return out;
}

/// Preamble as transmitted: n_zp zeros followed by the boosted, padded ZC.
struct PreambleBlock {
  ComplexBuffer samples;
  double boost_db = 0.0;
  int n_zp = 0;
  ZcSpec zc;

  double gain() const { return std::pow(10.0, boost_db / 20.0); }
  /// The non-zero ZC region (length N_ZC), used as the correlation template.
  auto zc_part() const { return samples.segment(n_zp, zc.length); }
  Index size() const { return samples.size(); }
};

inline PreambleBlock build_preamble(const ZcSpec& spec, int n_zp, double boost_db) {
  if (n_zp < 0) throw std::invalid_argument("build_preamble: n_zp must be non-negative");
  PreambleBlock p;
  p.boost_db = boost_db;
  p.n_zp = n_zp;
  p.zc = spec;
  p.samples = ComplexBuffer::Zero(n_zp + spec.pad_to);
  p.samples.tail(spec.pad_to) = generate_zc<double>(spec) * p.gain();
  return p;
}

/// Autocorrelation peak P_zc of the boosted preamble.
inline double expected_peak(const ZcSpec& spec, double boost_db) {
  spec.validate();
  return static_cast<double>(spec.length) * dsp::db_to_linear(boost_db);
}

}  // namespace tibwb
