#pragma once

// Numeric primitives shared by every stage of the link: DFTs of arbitrary
// length, linear/circular correlation, convolution and reproducible noise.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include "tibwb/types.hpp"

namespace tibwb::dsp {

namespace detail {

// Eigen::FFT caches plans per length and is not safe to share across threads.
template <typename Scalar>
Eigen::FFT<Scalar>& fft_engine() {
  thread_local Eigen::FFT<Scalar> engine;
  return engine;
}

}  // namespace detail

/// Unnormalized forward DFT: X_k = sum_n x_n exp(-j 2 pi k n / size).
template <typename Derived>
CVector<RealOf<Derived>> dft(const Eigen::MatrixBase<Derived>& x, Index size) {
  using Real = RealOf<Derived>;
  if (size <= 0) throw std::invalid_argument("dft: size must be positive");
  if (x.size() != size) throw std::invalid_argument("dft: size must equal input length");
  const CVector<Real> in = x.template cast<std::complex<Real>>();
  if (size == 1) return in;  // kissfft does not handle a length-1 plan
  CVector<Real> out(size);
  detail::fft_engine<Real>().fwd(out.data(), in.data(), size);
  return out;
}

template <typename Derived>
CVector<RealOf<Derived>> dft(const Eigen::MatrixBase<Derived>& x) {
  return dft(x, x.size());
}

/// Inverse DFT with 1/size scaling, so idft(dft(x)) == x.
template <typename Derived>
CVector<RealOf<Derived>> idft(const Eigen::MatrixBase<Derived>& x, Index size) {
  using Real = RealOf<Derived>;
  if (size <= 0) throw std::invalid_argument("idft: size must be positive");
  if (x.size() != size) throw std::invalid_argument("idft: size must equal input length");
  const CVector<Real> in = x.template cast<std::complex<Real>>();
  if (size == 1) return in;
  CVector<Real> out(size);
  detail::fft_engine<Real>().inv(out.data(), in.data(), size);
  return out;
}

template <typename Derived>
CVector<RealOf<Derived>> idft(const Eigen::MatrixBase<Derived>& x) {
  return idft(x, x.size());
}

/// Full linear cross-correlation C(l) = sum_m y(m) conj(p(l + m)).
///
/// The result has y.size() + p.size() - 1 entries. Entry i holds the lag
/// l = p.size() - 1 - i, i.e. the alignment where the last sample of p sits
/// on y(i). A copy of p starting at y(d) therefore peaks at i = d + p.size() - 1,
/// and xcorr(p, p) peaks at the centre with value sum |p|^2.
template <typename DerivedY, typename DerivedP>
CVector<RealOf<DerivedY>> xcorr(const Eigen::MatrixBase<DerivedY>& y,
                                const Eigen::MatrixBase<DerivedP>& p) {
  using Real = RealOf<DerivedY>;
  const Index ny = y.size();
  const Index np = p.size();
  if (ny < 1 || np < 1) throw std::invalid_argument("xcorr: inputs must be non-empty");
  const CVector<Real> yy = y.template cast<std::complex<Real>>();
  const CVector<Real> pp = p.template cast<std::complex<Real>>();
  CVector<Real> out(ny + np - 1);
  for (Index i = 0; i < out.size(); ++i) {
    const Index start = i - (np - 1);  // y index aligned with p(0)
    const Index k0 = std::max<Index>(0, -start);
    const Index k1 = std::min<Index>(np, ny - start);
    // dot() conjugates its left operand.
    out(i) = pp.segment(k0, k1 - k0).dot(yy.segment(start + k0, k1 - k0));
  }
  return out;
}

/// Periodic correlation C[l] = sum_m a[m] conj(b[(m + l) mod n]).
template <typename DerivedA, typename DerivedB>
CVector<RealOf<DerivedA>> circular_xcorr(const Eigen::MatrixBase<DerivedA>& a,
                                         const Eigen::MatrixBase<DerivedB>& b) {
  using Real = RealOf<DerivedA>;
  const Index n = a.size();
  if (n < 1 || b.size() != n)
    throw std::invalid_argument("circular_xcorr: inputs must be non-empty and of equal length");
  CVector<Real> out = CVector<Real>::Zero(n);
  for (Index l = 0; l < n; ++l)
    for (Index m = 0; m < n; ++m)
      out(l) += std::complex<Real>(a(m)) * std::conj(std::complex<Real>(b((m + l) % n)));
  return out;
}

/// Linear convolution, output length x.size() + h.size() - 1.
template <typename DerivedX, typename DerivedH>
CVector<RealOf<DerivedX>> convolve(const Eigen::MatrixBase<DerivedX>& x,
                                   const Eigen::MatrixBase<DerivedH>& h) {
  using Real = RealOf<DerivedX>;
  if (x.size() < 1 || h.size() < 1) throw std::invalid_argument("convolve: inputs must be non-empty");
  CVector<Real> out = CVector<Real>::Zero(x.size() + h.size() - 1);
  for (Index l = 0; l < h.size(); ++l) {
    const std::complex<Real> tap(h(l));
    if (tap == std::complex<Real>(0)) continue;
    out.segment(l, x.size()) += tap * x.template cast<std::complex<Real>>();
  }
  return out;
}

/// Independent, reproducible random stream. Identical (seed, stream_id)
/// pairs yield identical sequences; each Monte-Carlo trial owns one.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id),
                      static_cast<std::uint32_t>(stream_id >> 32), 0x71b5u};
    engine_.seed(seq);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::mt19937_64& engine() { return engine_; }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double normal() { return normal_(engine_); }
  std::uint8_t bit() { return static_cast<std::uint8_t>(engine_() >> 63); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

  /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
  std::complex<double> complex_normal(double variance) {
    const double s = std::sqrt(variance / 2.0);
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

/// Stream identifier for (experiment lane, trial index).
inline std::uint64_t stream_id(std::uint64_t lane, std::uint64_t trial) {
  return (lane << 40) ^ trial;
}

template <typename Scalar = double>
CVector<Scalar> gaussian_noise(RngStream& rng, Index n, double variance) {
  if (variance < 0.0) throw std::invalid_argument("gaussian_noise: variance must be non-negative");
  if (n < 0) throw std::invalid_argument("gaussian_noise: negative length");
  CVector<Scalar> out(n);
  if (variance == 0.0) {
    out.setZero();
    return out;
  }
  for (Index i = 0; i < n; ++i) out(i) = std::complex<Scalar>(rng.complex_normal(variance));
  return out;
}

template <typename Derived>
RealOf<Derived> energy(const Eigen::MatrixBase<Derived>& x) {
  return x.squaredNorm();
}

template <typename Derived>
RealOf<Derived> mean_power(const Eigen::MatrixBase<Derived>& x) {
  return x.size() == 0 ? RealOf<Derived>(0) : x.squaredNorm() / static_cast<RealOf<Derived>>(x.size());
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace tibwb::dsp
