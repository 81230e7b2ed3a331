#include "tibwb/frontend.hpp"

#include <stdexcept>

namespace tibwb {

namespace {

std::complex<double> at(const ComplexBuffer& rx, Index i) {
  return (i >= 0 && i < rx.size()) ? rx(i) : std::complex<double>{};
}

}  // namespace

ComplexBuffer circular_window(const ComplexBuffer& rx, Index start, Index len, Index wrap, Index ola_end) {
  if (len < 1) throw std::invalid_argument("circular_window: len must be positive");
  if (wrap < 0 || wrap > len || ola_end > len)
    throw std::invalid_argument("circular_window: wrap and ola_end must lie in [0, len]");
  ComplexBuffer out(len);
  for (Index j = 0; j < len; ++j) out(j) = j < wrap ? at(rx, start + len + j) : at(rx, start + j);
  for (Index j = wrap; j < ola_end; ++j) out(j) += at(rx, start + len + j);
  return out;
}

ComplexBuffer preamble_observation(const ComplexBuffer& rx, Index head, const SystemConfig& cfg) {
  return circular_window(rx, head, cfg.preamble_len(), wrap_len(cfg));
}

ComplexBuffer payload_spectrum(const ComplexBuffer& rx, Index head, const SystemConfig& cfg) {
  return dsp::dft(circular_window(rx, head + cfg.preamble_len(), cfg.block_len(), wrap_len(cfg), cfg.n_zp));
}

}  // namespace tibwb
