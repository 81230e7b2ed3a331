#include "tibwb/channel.hpp"

#include <stdexcept>
#include <string>

namespace tibwb {

ChannelRealization ChannelRealization::fixed(const ComplexBuffer& taps) {
  if (taps.size() < 1) throw std::invalid_argument("channel: at least one tap required");
  return {taps, taps.cwiseAbs2()};
}

ChannelRealization draw_channel(dsp::RngStream& rng, int taps, int n_zp) {
  if (taps < 1) throw std::invalid_argument("draw_channel: need at least one tap");
  if (taps > n_zp)
    throw std::invalid_argument("draw_channel: " + std::to_string(taps) + " taps exceed the zero pad of " +
                                std::to_string(n_zp));
  ChannelRealization ch;
  ch.power_profile = RealBuffer::Constant(taps, 1.0 / taps);
  ch.taps.resize(taps);
  for (int i = 0; i < taps; ++i) ch.taps(i) = rng.complex_normal(ch.power_profile(i));
  return ch;
}

ComplexBuffer apply(const ComplexBuffer& frame, const ChannelRealization& ch, SnrPoint snr,
                    dsp::RngStream& rng) {
  if (ch.taps.size() < 1) throw std::invalid_argument("apply: empty channel");
  if (frame.size() < 1) throw std::invalid_argument("apply: empty frame");
  ComplexBuffer out = dsp::convolve(frame, ch.taps);
  out += dsp::gaussian_noise(rng, out.size(), snr.noise_variance());
  return out;
}

ComplexBuffer exact_cfr(const ChannelRealization& ch, Index size) {
  if (size < ch.taps.size()) throw std::invalid_argument("exact_cfr: size shorter than the channel");
  ComplexBuffer padded = ComplexBuffer::Zero(size);
  padded.head(ch.taps.size()) = ch.taps;
  return dsp::dft(padded);
}

}  // namespace tibwb
