#include "tibwb/tx.hpp"

#include <string>

namespace tibwb {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

}  // namespace

void SystemConfig::validate() const {
  if (n_subcarriers < 2 || n_subcarriers % 2 != 0)
    throw std::invalid_argument("n_subcarriers must be a positive even count");
  if (n_symbols < 1) throw std::invalid_argument("n_symbols must be >= 1");
  if (!(rolloff >= 0.0 && rolloff <= 1.0)) throw std::invalid_argument("rolloff must lie in [0, 1]");
  srrc_window<double>(n_subcarriers, rolloff);  // breakpoint check
  zc.validate();
  if (n_zp < 0) throw std::invalid_argument("n_zp must be non-negative");
  if (interleave_words < 1) throw std::invalid_argument("interleave_words must be >= 1");
}

ComplexBuffer map_qpsk(const Bits& bits) {
  if (bits.size() % 2 != 0) throw std::invalid_argument("map_qpsk: bit count must be even");
  ComplexBuffer out(static_cast<Index>(bits.size() / 2));
  for (Index i = 0; i < out.size(); ++i) {
    const double im = bits[2 * i] ? -kInvSqrt2 : kInvSqrt2;
    const double re = bits[2 * i + 1] ? -kInvSqrt2 : kInvSqrt2;
    out(i) = {re, im};
  }
  return out;
}

Bits demap_qpsk_hard(const ComplexBuffer& symbols) {
  Bits out(2 * static_cast<std::size_t>(symbols.size()));
  for (Index i = 0; i < symbols.size(); ++i) {
    out[2 * i] = symbols(i).imag() < 0.0;
    out[2 * i + 1] = symbols(i).real() < 0.0;
  }
  return out;
}

ComplexBuffer decide_qpsk(const ComplexBuffer& symbols) {
  ComplexBuffer out(symbols.size());
  for (Index i = 0; i < symbols.size(); ++i)
    out(i) = {symbols(i).real() < 0.0 ? -kInvSqrt2 : kInvSqrt2,
              symbols(i).imag() < 0.0 ? -kInvSqrt2 : kInvSqrt2};
  return out;
}

ComplexBuffer interleave(const Eigen::Ref<const Eigen::MatrixXcd>& columns) {
  using RowMajor = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  ComplexBuffer out(columns.size());
  Eigen::Map<RowMajor>(out.data(), columns.rows(), columns.cols()) = columns;
  return out;
}

Eigen::MatrixXcd deinterleave(const ComplexBuffer& samples, Index rows, Index cols) {
  using RowMajor = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  if (rows < 1 || cols < 1 || samples.size() != rows * cols)
    throw std::invalid_argument("deinterleave: size mismatch");
  return Eigen::Map<const RowMajor>(samples.data(), rows, cols);
}

ComplexBuffer build_block(const ComplexBuffer& data_symbols, const SystemConfig& cfg) {
  const int n = cfg.n_subcarriers;
  const int w = cfg.windowed_len();
  if (data_symbols.size() != static_cast<Index>(cfg.symbols_per_block()))
    throw std::invalid_argument("build_block: expected " + std::to_string(cfg.symbols_per_block()) +
                                " symbols, got " + std::to_string(data_symbols.size()));
  const RealBuffer h = srrc_window<double>(n, cfg.rolloff);
  const double scale = std::sqrt(static_cast<double>(w));
  const int first = n - w / 2;
  Eigen::MatrixXcd m(w, cfg.n_symbols);
  for (int i = 0; i < cfg.n_symbols; ++i) {
    const ComplexBuffer s = dsp::idft(data_symbols.segment(static_cast<Index>(i) * n, n)) * scale;
    for (int r = 0; r < w; ++r) {
      const int j = first + r;
      m(r, i) = s(j % n) * h(j);
    }
  }
  return interleave(m);
}

ComplexBuffer TibwbFrame::samples() const {
  ComplexBuffer out(size());
  out << preamble.samples, payload, trailing_zp;
  return out;
}

TibwbFrame assemble_frame(const ComplexBuffer& payload, const SystemConfig& cfg) {
  if (payload.size() != cfg.block_len())
    throw std::invalid_argument("assemble_frame: payload must have N_b samples");
  TibwbFrame f;
  f.preamble = build_preamble(cfg.zc, cfg.n_zp, cfg.boost_db);
  f.payload = payload;
  f.trailing_zp = ComplexBuffer::Zero(cfg.n_zp);
  return f;
}

TibwbFrame random_uncoded_frame(const SystemConfig& cfg, dsp::RngStream& rng) {
  Bits bits(static_cast<std::size_t>(cfg.coded_bits_per_block()));
  for (auto& b : bits) b = rng.bit();
  TibwbFrame f = assemble_frame(build_block(map_qpsk(bits), cfg), cfg);
  f.tx_bits = std::move(bits);
  return f;
}

}  // namespace tibwb
