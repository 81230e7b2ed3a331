#include <doctest.h>

#include "support.hpp"
#include "tibwb/preamble.hpp"

using namespace tibwb;

TEST_CASE("ZC first sample is one") {
  for (int root : {1, 2, 34, 94}) {
    const ZcSpec s{root, 95, 95};
    if (std::gcd(root, 95) != 1) continue;
    CHECK(std::abs(generate_zc(s)(0) - std::complex<double>(1.0)) < 1e-15);
  }
}

TEST_CASE("ZC root 34 length 95 is constant amplitude with a delta autocorrelation") {
  const ComplexBuffer zc = generate_zc(ZcSpec{34, 95, 95});
  REQUIRE(zc.size() == 95);
  CHECK((zc.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
  const auto c = oracle::circular_xcorr(support::to_std(zc), support::to_std(zc));
  CHECK(std::abs(c[0] - 95.0) < 1e-9);
  for (std::size_t l = 1; l < c.size(); ++l) CHECK(std::abs(c[l]) < 1e-9 * 95);
}

TEST_CASE("ZC phase matches the closed form") {
  const ComplexBuffer zc = generate_zc(ZcSpec{34, 95, 95});
  for (int q = 0; q < 95; ++q) {
    const double ang = -std::numbers::pi * 34.0 * q * (q + 1) / 95.0;
    CHECK(std::abs(zc(q) - std::polar(1.0, ang)) < 1e-9);
  }
}

TEST_CASE("ZC padding is trailing zeros") {
  const ComplexBuffer zc = generate_zc(ZcSpec{34, 95, 96});
  REQUIRE(zc.size() == 96);
  CHECK(zc(95) == std::complex<double>(0.0));
}

TEST_CASE("ZcSpec validation") {
  CHECK_THROWS_AS(generate_zc(ZcSpec{3, 94, 96}), std::invalid_argument);
  CHECK_THROWS_AS(generate_zc(ZcSpec{0, 95, 96}), std::invalid_argument);
  CHECK_THROWS_AS(generate_zc(ZcSpec{95, 95, 96}), std::invalid_argument);
  CHECK_THROWS_AS(generate_zc(ZcSpec{5, 95, 96}), std::invalid_argument);  // shares a factor with 95
  CHECK_THROWS_AS(generate_zc(ZcSpec{1, 95, 90}), std::invalid_argument);
}

TEST_CASE("cross-correlation of prime-length ZC sequences is flat") {
  for (int n : {31, 61, 97}) {
    const ComplexBuffer a = generate_zc(ZcSpec{1, n, n});
    const ComplexBuffer b = generate_zc(ZcSpec{n - 2, n, n});
    const auto c = oracle::circular_xcorr(support::to_std(a), support::to_std(b));
    for (const auto& v : c) CHECK(std::abs(std::abs(v) / n - 1.0 / std::sqrt(n)) < 1e-9);
  }
}

TEST_CASE("build_preamble layout and power") {
  const PreambleBlock p0 = build_preamble(ZcSpec{}, 32, 0.0);
  REQUIRE(p0.size() == 128);
  CHECK(p0.samples.head(32).cwiseAbs().maxCoeff() == 0.0);
  CHECK((p0.zc_part().cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);

  const PreambleBlock p6 = build_preamble(ZcSpec{}, 32, 6.0);
  CHECK(std::abs(p6.zc_part().squaredNorm() / 95.0 - std::pow(10.0, 0.6)) < 1e-12);

  const PreambleBlock bare = build_preamble(ZcSpec{}, 0, 0.0);
  CHECK(bare.samples == generate_zc(ZcSpec{}));
  CHECK_THROWS_AS(build_preamble(ZcSpec{}, -1, 0.0), std::invalid_argument);
}

TEST_CASE("expected_peak closed form and self-correlation") {
  CHECK(std::abs(expected_peak(ZcSpec{}, 0.0) - 95.0) < 1e-12);
  CHECK(std::abs(expected_peak(ZcSpec{}, 3.0) - 95.0 * std::pow(10.0, 0.3)) < 1e-9);
  CHECK(std::abs(expected_peak(ZcSpec{}, 3.0) - 189.55) < 0.01);
  for (double boost : {0.0, 3.0, 6.0})
    for (int root : {1, 34, 47}) {
      const ZcSpec s{root, 95, 96};
      const PreambleBlock p = build_preamble(s, 32, boost);
      const double peak = dsp::xcorr(p.samples, p.samples).cwiseAbs().maxCoeff();
      CHECK(std::abs(peak - expected_peak(s, boost)) < 1e-10 * peak);
    }
}
