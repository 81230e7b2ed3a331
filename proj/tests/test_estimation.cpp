#include <doctest.h>

#include "support.hpp"
#include "tibwb/channel.hpp"
#include "tibwb/equalizer.hpp"
#include "tibwb/estimation.hpp"
#include "tibwb/frontend.hpp"

using namespace tibwb;

namespace {

struct Observed {
  ComplexBuffer rx;
  ChannelRealization ch;
  TibwbFrame frame;
};

constexpr Index kHead = 40;

Observed observe(const SystemConfig& cfg, const ChannelRealization& ch, SnrPoint snr, dsp::RngStream& rng) {
  Observed o;
  o.frame = random_uncoded_frame(cfg, rng);
  o.ch = ch;
  ComplexBuffer tx = ComplexBuffer::Zero(kHead + o.frame.size());
  tx.tail(o.frame.size()) = o.frame.samples();
  o.rx = apply(tx, ch, snr, rng);
  return o;
}

}  // namespace

TEST_CASE("LS estimate examples") {
  dsp::RngStream rng(51, 0);
  const ComplexBuffer x = support::random_buffer(rng, 64);
  const ComplexBuffer h = support::random_buffer(rng, 64);
  const ComplexBuffer y = (h.array() * x.array()).matrix();
  CHECK((estimate_ls(y, x) - h).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(estimate_ls(y, ComplexBuffer::Ones(64)) == y);
  CHECK_THROWS_AS(estimate_ls(y, ComplexBuffer::Ones(3)), std::invalid_argument);
}

TEST_CASE("LS flagged bins are interpolated") {
  ComplexBuffer x = ComplexBuffer::Ones(6);
  ComplexBuffer y(6);
  y << 1.0, 2.0, 0.0, 4.0, 5.0, 0.0;
  x(0) = 0.0;
  x(2) = 0.0;
  x(5) = 1e-13;
  const ComplexBuffer h = estimate_ls(y, x);
  CHECK(h(0) == std::complex<double>(2.0));  // edge copy
  CHECK(h(2) == std::complex<double>(3.0));  // midway between 2 and 4
  CHECK(h(5) == std::complex<double>(5.0));
  CHECK_THROWS_AS(estimate_ls(y, ComplexBuffer::Zero(6)), std::invalid_argument);
}

TEST_CASE("LS noise variance is sigma^2 / |X|^2") {
  dsp::RngStream rng(52, 0);
  ComplexBuffer x(4);
  x << 1.0, 2.0, std::complex<double>(0, 0.5), 3.0;
  const ComplexBuffer h = ComplexBuffer::Ones(4);
  const double sigma2 = 0.2;
  RealBuffer err = RealBuffer::Zero(4);
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    const ComplexBuffer y = (h.array() * x.array()).matrix() + dsp::gaussian_noise(rng, 4, sigma2);
    err += (estimate_ls(y, x) - h).cwiseAbs2();
  }
  for (int k = 0; k < 4; ++k) CHECK(std::abs(err(k) / trials / (sigma2 / std::norm(x(k))) - 1.0) < 0.05);
}

TEST_CASE("Algorithm A on an identity channel") {
  const SystemConfig cfg;
  dsp::RngStream rng(53, 0);
  const Observed o = observe(cfg, ChannelRealization::fixed(ComplexBuffer::Ones(1)), SnrPoint::noiseless(), rng);
  const CfrEstimate e = algorithm_a(preamble_observation(o.rx, kHead, cfg), o.frame.preamble, cfg.block_len());
  CHECK(e.source == EstimatorKind::A);
  CHECK(e.values.size() == cfg.block_len());
  CHECK((e.values.array() - 1.0).abs().maxCoeff() < 1e-9);
}

TEST_CASE("Algorithm A on a known two-tap channel") {
  const SystemConfig cfg;
  dsp::RngStream rng(54, 0);
  ComplexBuffer taps(2);
  taps << 1.0, 0.5;
  const ChannelRealization ch = ChannelRealization::fixed(taps);
  const Observed o = observe(cfg, ch, SnrPoint::noiseless(), rng);
  const CfrEstimate e = algorithm_a(preamble_observation(o.rx, kHead, cfg), o.frame.preamble, cfg.block_len());
  CHECK((e.values - exact_cfr(ch, cfg.block_len())).cwiseAbs().maxCoeff() < 1e-6);
  // Keeping every pseudo-CIR tap is exact as well without noise.
  const CfrEstimate full =
      algorithm_a(preamble_observation(o.rx, kHead, cfg), o.frame.preamble, cfg.block_len(), cfg.preamble_len());
  CHECK((full.values - exact_cfr(ch, cfg.block_len())).cwiseAbs().maxCoeff() < 1e-6);
  CHECK_THROWS_AS(algorithm_a(ComplexBuffer::Zero(5), o.frame.preamble, cfg.block_len()), std::invalid_argument);
}

TEST_CASE("Algorithm A error falls with preamble boost") {
  const SystemConfig base;
  const SnrPoint snr = SnrPoint::from_db(10.0);
  double mse[3] = {0, 0, 0};
  const double boosts[3] = {0.0, 3.0, 6.0};
  const int trials = 1000;
  for (int b = 0; b < 3; ++b) {
    SystemConfig cfg = base;
    cfg.boost_db = boosts[b];
    for (int t = 0; t < trials; ++t) {
      dsp::RngStream rng(55, static_cast<std::uint64_t>(t));
      const Observed o = observe(cfg, draw_channel(rng, 8), snr, rng);
      const CfrEstimate e = algorithm_a(preamble_observation(o.rx, kHead, cfg), o.frame.preamble, cfg.block_len());
      mse[b] += estimator_mse(e, exact_cfr(o.ch, cfg.block_len()));
    }
  }
  CHECK(mse[1] < mse[0]);
  CHECK(mse[2] < mse[1]);
}

TEST_CASE("analytic Algorithm A variance tracks the measured error") {
  SystemConfig cfg;
  cfg.boost_db = 3.0;
  const SnrPoint snr = SnrPoint::from_db(10.0);
  double mse = 0;
  const int trials = 400;
  for (int t = 0; t < trials; ++t) {
    dsp::RngStream rng(56, static_cast<std::uint64_t>(t));
    const Observed o = observe(cfg, draw_channel(rng, 8), snr, rng);
    const CfrEstimate e = algorithm_a(preamble_observation(o.rx, kHead, cfg), o.frame.preamble, cfg.block_len());
    mse += estimator_mse(e, exact_cfr(o.ch, cfg.block_len()));
  }
  const double predicted = analytic_var_zc(build_preamble(cfg.zc, cfg.n_zp, 3.0), snr.noise_variance());
  CHECK(std::abs(mse / trials / predicted - 1.0) < 0.05);
}

TEST_CASE("Algorithm B examples") {
  dsp::RngStream rng(57, 0);
  const ComplexBuffer x = support::random_buffer(rng, 32);
  const ComplexBuffer h = support::random_buffer(rng, 32);
  const ComplexBuffer y = (h.array() * x.array()).matrix();
  CHECK((algorithm_b(y, x).values - h).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((algorithm_b(y, y).values.array() - 1.0).abs().maxCoeff() < 1e-15);
  CHECK(algorithm_b(y, x).source == EstimatorKind::B);
}

TEST_CASE("Algorithm B with wrong decisions on a flat channel") {
  SystemConfig cfg;
  cfg.n_symbols = 4;
  dsp::RngStream rng(58, 0);
  const Bits bits = support::random_bits(rng, static_cast<std::size_t>(cfg.coded_bits_per_block()));
  const ComplexBuffer sym = map_qpsk(bits);
  ComplexBuffer wrong = sym;
  for (Index i = 0; i < wrong.size(); i += 10) wrong(i) *= std::complex<double>(0, 1);
  const ComplexBuffer y = reformat(sym, cfg);
  const ComplexBuffer xd = reformat(wrong, cfg);
  const CfrEstimate e = algorithm_b(y, xd);
  // The ratio equals one wherever the decided block spectrum matches the transmitted one.
  for (Index k = 0; k < y.size(); ++k)
    if (std::abs(y(k) - xd(k)) < 1e-12) CHECK(std::abs(e.values(k) - 1.0) < 1e-9);
  // Correct decisions give a perfectly flat estimate.
  CHECK((algorithm_b(y, y).values.array() - 1.0).abs().maxCoeff() < 1e-12);
  CHECK((e.values.array() - 1.0).abs().maxCoeff() > 1e-3);
}

TEST_CASE("Algorithm C fusion") {
  CfrEstimate a{ComplexBuffer::Constant(3, 1.0), EstimatorKind::A, {}};
  CfrEstimate b{ComplexBuffer::Constant(3, 3.0), EstimatorKind::B, {}};
  CHECK((algorithm_c(a, b, 0.5, 0.5).values.array() - 2.0).abs().maxCoeff() < 1e-15);
  CHECK((algorithm_c(a, b, 1.0, 2.0).values.array() - 5.0 / 3.0).abs().maxCoeff() < 1e-15);
  CHECK((algorithm_c(a, b, 1.0, std::numeric_limits<double>::infinity()).values.array() - 1.0).abs().maxCoeff() == 0.0);
  CHECK((algorithm_c(a, b, 1.0, 1e300).values.array() - 1.0).abs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(algorithm_c(a, b, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(algorithm_c(a, b, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("Algorithm C is a convex combination") {
  dsp::RngStream rng(59, 0);
  for (int t = 0; t < 50; ++t) {
    const CfrEstimate a{support::random_buffer(rng, 16), EstimatorKind::A, {}};
    const CfrEstimate b{support::random_buffer(rng, 16), EstimatorKind::B, {}};
    const double va = 0.01 + rng.uniform(), vb = 0.01 + rng.uniform();
    const ComplexBuffer c = algorithm_c(a, b, va, vb).values;
    for (Index k = 0; k < 16; ++k) {
      // c - a is a non-negative real multiple t of b - a with t in [0, 1].
      const std::complex<double> t_k = (c(k) - a.values(k)) / (b.values(k) - a.values(k));
      CHECK(std::abs(t_k.imag()) < 1e-9);
      CHECK(t_k.real() >= -1e-12);
      CHECK(t_k.real() <= 1 + 1e-12);
    }
  }
}

TEST_CASE("oracle-weighted fusion is never worse than the worse input") {
  const SystemConfig cfg;
  const SnrPoint snr = SnrPoint::from_db(10.0);
  double ma = 0, mb = 0, mc = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    dsp::RngStream rng(60, static_cast<std::uint64_t>(t));
    const Observed o = observe(cfg, draw_channel(rng, 8), snr, rng);
    const ComplexBuffer h = exact_cfr(o.ch, cfg.block_len());
    const CfrEstimate a = algorithm_a(preamble_observation(o.rx, kHead, cfg), o.frame.preamble, cfg.block_len());
    const ComplexBuffer y = payload_spectrum(o.rx, kHead, cfg);
    const EqualizedBlock blk = linear_equalize(y, mmse_weights(a, snr), cfg);
    const CfrEstimate b = algorithm_b(y, blk.decided);
    const double va = estimator_mse(a, h), vb = estimator_mse(b, h);
    const CfrEstimate c = algorithm_c(a, b, va, vb);
    ma += va;
    mb += vb;
    mc += estimator_mse(c, h);
  }
  CHECK(mc / trials <= std::max(ma, mb) / trials + 1e-9);
}

TEST_CASE("estimator_mse") {
  dsp::RngStream rng(61, 0);
  const ComplexBuffer h = support::random_buffer(rng, 20);
  const CfrEstimate same{h, EstimatorKind::A, {}};
  CHECK(estimator_mse(same, h) == 0.0);
  const CfrEstimate shifted{(h.array() + 1.0).matrix(), EstimatorKind::A, {}};
  CHECK(estimator_mse(shifted, h) == doctest::Approx(1.0).epsilon(1e-12));
  const CfrEstimate other{support::random_buffer(rng, 20), EstimatorKind::A, {}};
  double direct = 0;
  for (Index k = 0; k < 20; ++k) direct += std::norm(h(k) - other.values(k));
  CHECK(estimator_mse(other, h) == doctest::Approx(direct / 20).epsilon(1e-14));
  CHECK_THROWS_AS(estimator_mse(other, ComplexBuffer::Zero(3)), std::invalid_argument);
}
