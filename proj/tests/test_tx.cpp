#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "support.hpp"
#include "tibwb/equalizer.hpp"
#include "tibwb/tx.hpp"

using namespace tibwb;

namespace {

ComplexBuffer random_qpsk(dsp::RngStream& rng, const SystemConfig& cfg) {
  return map_qpsk(support::random_bits(rng, static_cast<std::size_t>(cfg.coded_bits_per_block())));
}

}  // namespace

TEST_CASE("reference sizes") {
  const SystemConfig cfg;
  CHECK(cfg.windowed_len() == 96);
  CHECK(cfg.block_len() == 4032);
  CHECK(cfg.frame_len() == 4192);
  CHECK(cfg.preamble_len() == 128);
}

TEST_CASE("srrc window values") {
  const RealBuffer h = srrc_window(64, 0.5);
  REQUIRE(h.size() == 128);
  CHECK(h(64) == 1.0);
  for (int n = -64; n < 64; ++n)
    if (std::abs(n) >= 48) CHECK(h(n + 64) == 0.0);
  CHECK(std::abs(h(64 + 32) - std::cos(std::numbers::pi / 4)) < 1e-12);
  CHECK(std::abs(h(64 + 32) - 0.70711) < 1e-5);
  for (int n = -64; n < 64; ++n) CHECK(std::abs(h(n + 64) - oracle::srrc(n, 64, 0.5)) < 1e-15);
}

TEST_CASE("srrc window is symmetric and reconstructs") {
  for (auto [n, beta] : {std::pair{64, 0.5}, std::pair{32, 0.25}, std::pair{16, 1.0}, std::pair{64, 0.0}}) {
    const RealBuffer h = srrc_window(n, beta);
    for (int m = 0; m < n; ++m) CHECK(std::abs(h(m) * h(m) + h(m + n) * h(m + n) - 1.0) < 1e-12);
    if (beta > 0)
      for (int k = 1; k < n; ++k) CHECK(h(n + k) == doctest::Approx(h(n - k)).epsilon(1e-15));
  }
}

TEST_CASE("srrc window rejects bad parameters") {
  CHECK_THROWS_AS(srrc_window(64, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(srrc_window(64, 1.1), std::invalid_argument);
  CHECK_THROWS_AS(srrc_window(64, 0.3), std::invalid_argument);  // 22.4 is not a sample index
}

TEST_CASE("QPSK map") {
  const double a = 1.0 / std::sqrt(2.0);
  const ComplexBuffer s = map_qpsk({0, 0, 0, 1, 1, 1, 1, 0});
  CHECK(std::abs(s(0) - std::complex<double>(a, a)) < 1e-15);
  CHECK(std::abs(s(1) - std::complex<double>(-a, a)) < 1e-15);
  CHECK(std::abs(s(2) - std::complex<double>(-a, -a)) < 1e-15);
  CHECK(std::abs(s(3) - std::complex<double>(a, -a)) < 1e-15);
  CHECK_THROWS_AS(map_qpsk({0, 1, 1}), std::invalid_argument);

  dsp::RngStream rng(21, 0);
  const Bits bits = support::random_bits(rng, 10000);
  const ComplexBuffer sym = map_qpsk(bits);
  CHECK((sym.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-15);
  CHECK(demap_qpsk_hard(sym) == bits);
  CHECK(decide_qpsk(sym * 3.0) == sym);
}

TEST_CASE("interleaver permutation") {
  Eigen::MatrixXcd m(6, 2);
  for (int r = 0; r < 6; ++r) {
    m(r, 0) = std::complex<double>(r, 0);        // a_r
    m(r, 1) = std::complex<double>(r, 1);        // b_r
  }
  const ComplexBuffer out = interleave(m);
  for (int r = 0; r < 6; ++r) {
    CHECK(out(2 * r) == std::complex<double>(r, 0));
    CHECK(out(2 * r + 1) == std::complex<double>(r, 1));
  }
  CHECK(deinterleave(out, 6, 2) == m);

  Eigen::MatrixXcd single = Eigen::MatrixXcd::Random(7, 1);
  CHECK(interleave(single) == ComplexBuffer(single.col(0)));

  // The image of 0..N_b-1 is a permutation.
  const SystemConfig cfg;
  Eigen::MatrixXcd idx(cfg.windowed_len(), cfg.n_symbols);
  for (Index i = 0; i < idx.size(); ++i) idx.data()[i] = static_cast<double>(i);
  const ComplexBuffer perm = interleave(idx);
  std::vector<int> seen(perm.size());
  for (Index i = 0; i < perm.size(); ++i) seen[i] = static_cast<int>(perm(i).real());
  std::sort(seen.begin(), seen.end());
  for (int i = 0; i < static_cast<int>(seen.size()); ++i) CHECK(seen[i] == i);
  CHECK_THROWS_AS(deinterleave(perm, 5, 5), std::invalid_argument);
}

TEST_CASE("build_block size, power and leading zeros") {
  const SystemConfig cfg;
  dsp::RngStream rng(22, 0);
  const ComplexBuffer block = build_block(random_qpsk(rng, cfg), cfg);
  CHECK(block.size() == 4032);
  CHECK(std::abs(dsp::mean_power(block) - 1.0) < 0.02);
  CHECK(block.head(cfg.leading_zeros()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::abs(block(cfg.leading_zeros())) > 0.0);
  CHECK_THROWS_AS(build_block(ComplexBuffer::Zero(10), cfg), std::invalid_argument);
}

TEST_CASE("rectangular window block is the rotated symbol IDFTs") {
  SystemConfig cfg;
  cfg.rolloff = 0.0;
  cfg.n_symbols = 1;  // a single column makes the interleaver the identity
  dsp::RngStream rng(23, 0);
  const ComplexBuffer x = random_qpsk(rng, cfg);
  const ComplexBuffer block = build_block(x, cfg);
  const ComplexBuffer s = dsp::idft(x) * std::sqrt(64.0);
  for (int r = 0; r < 64; ++r) CHECK(std::abs(block(r) - s((r + 32) % 64)) < 1e-12);
  CHECK(cfg.leading_zeros() == 0);
}

TEST_CASE("unformat inverts build_block") {
  for (auto [n, beta, ns] : {std::tuple{64, 0.5, 42}, std::tuple{32, 0.25, 5}, std::tuple{64, 0.0, 3}}) {
    SystemConfig cfg;
    cfg.n_subcarriers = n;
    cfg.rolloff = beta;
    cfg.n_symbols = ns;
    dsp::RngStream rng(24, static_cast<std::uint64_t>(n * 10 + ns));
    const ComplexBuffer x = random_qpsk(rng, cfg);
    const ComplexBuffer back = unformat(dsp::dft(build_block(x, cfg)), cfg);
    CHECK((back - x).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("assemble_frame layout") {
  const SystemConfig cfg;
  dsp::RngStream rng(25, 0);
  double power = 0;
  for (int i = 0; i < 100; ++i) {
    const TibwbFrame f = random_uncoded_frame(cfg, rng);
    power += dsp::mean_power(f.payload);
    if (i == 0) {
      const ComplexBuffer s = f.samples();
      CHECK(s.size() == 4192);
      CHECK(s.head(32).cwiseAbs().maxCoeff() == 0.0);
      CHECK(s.tail(32).cwiseAbs().maxCoeff() == 0.0);
      CHECK(f.tx_bits.size() == 5376);
    }
  }
  CHECK(std::abs(power / 100 - 1.0) < 0.02);
  CHECK_THROWS_AS(assemble_frame(ComplexBuffer::Zero(3), cfg), std::invalid_argument);
}
