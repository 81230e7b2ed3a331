#pragma once

#include <vector>

#include "oracles.hpp"
#include "tibwb/dsp.hpp"

namespace support {

inline tibwb::ComplexBuffer random_buffer(tibwb::dsp::RngStream& rng, tibwb::Index n) {
  return tibwb::dsp::gaussian_noise(rng, n, 1.0);
}

inline oracle::cvec to_std(const tibwb::ComplexBuffer& x) { return {x.data(), x.data() + x.size()}; }

inline tibwb::ComplexBuffer from_std(const oracle::cvec& x) {
  return Eigen::Map<const tibwb::ComplexBuffer>(x.data(), static_cast<tibwb::Index>(x.size()));
}

inline double max_abs_diff(const tibwb::ComplexBuffer& a, const oracle::cvec& b) {
  double m = 0;
  for (tibwb::Index i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a(i) - b[i]));
  return m;
}

inline tibwb::Bits random_bits(tibwb::dsp::RngStream& rng, std::size_t n) {
  tibwb::Bits b(n);
  for (auto& x : b) x = rng.bit();
  return b;
}

}  // namespace support
