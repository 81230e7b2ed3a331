#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tibwb/types.hpp"

namespace tibwb {

/// Sparse binary parity-check matrix plus decoder settings.
struct CodeSpec {
  int n = 128;
  int k = 64;
  /// (row, col) coordinates of the ones, sorted.
  std::vector<std::pair<int, int>> ones;
  int max_iters = 50;

  int checks() const { return n - k; }

  /// Seed-fixed regular (3,6) construction with 4-cycle avoidance. The same
  /// seed gives the same matrix on every platform.
  static CodeSpec generate(int n = 128, int k = 64, std::uint64_t seed = 0x1d9c128064ULL);
  static CodeSpec load(const std::string& path);
  static CodeSpec from_text(const std::string& text);
  std::string to_text() const;
  void save(const std::string& path) const;

  /// Dense (n-k) x n copy of the matrix.
  std::vector<std::vector<std::uint8_t>> dense() const;

  bool operator==(const CodeSpec&) const = default;
};

/// Systematic encoder and flooding sum-product decoder for a full-rank H.
class LdpcCodec {
 public:
  explicit LdpcCodec(CodeSpec spec);

  const CodeSpec& spec() const { return spec_; }
  /// Codeword positions carrying information bits, in order.
  const std::vector<int>& info_positions() const { return info_pos_; }

  /// Concatenated codewords for an info stream whose length is a multiple of k.
  Bits encode(const Bits& info) const;
  /// Hard info bits for a stream of LLRs (positive favours 0), length a multiple of n.
  Bits decode(const std::vector<double>& llrs) const;
  /// Decoded codeword bits of a single codeword plus iterations used.
  std::pair<Bits, int> decode_codeword(const double* llr) const;
  /// True when every check of every codeword in the stream is satisfied.
  bool check(const Bits& codewords) const;

 private:
  CodeSpec spec_;
  std::vector<int> info_pos_;
  std::vector<int> parity_pos_;
  /// parity bit j = XOR of info bits listed in parity_taps_[j].
  std::vector<std::vector<int>> parity_taps_;
  // Tanner graph: edges grouped by check; var_edges_ lists edge ids per variable.
  std::vector<int> edge_var_;
  std::vector<int> check_start_;
  std::vector<std::vector<int>> var_edges_;
};

/// Row-column interleaver: write `depth` rows of `width`, read columns.
template <typename T>
std::vector<T> block_interleave(const std::vector<T>& in, std::size_t depth, std::size_t width) {
  if (in.size() != depth * width) throw std::invalid_argument("block_interleave: size mismatch");
  std::vector<T> out(in.size());
  for (std::size_t r = 0; r < depth; ++r)
    for (std::size_t c = 0; c < width; ++c) out[c * depth + r] = in[r * width + c];
  return out;
}

template <typename T>
std::vector<T> block_deinterleave(const std::vector<T>& in, std::size_t depth, std::size_t width) {
  if (in.size() != depth * width) throw std::invalid_argument("block_deinterleave: size mismatch");
  std::vector<T> out(in.size());
  for (std::size_t r = 0; r < depth; ++r)
    for (std::size_t c = 0; c < width; ++c) out[r * width + c] = in[c * depth + r];
  return out;
}

/// Interleave a stream of codewords in groups of `words` (the last group may be shorter).
template <typename T>
std::vector<T> interleave_words(const std::vector<T>& in, std::size_t words, std::size_t width, bool inverse = false) {
  if (width == 0 || words == 0 || in.size() % width != 0)
    throw std::invalid_argument("interleave_words: stream is not a whole number of codewords");
  std::vector<T> out;
  out.reserve(in.size());
  const std::size_t total = in.size() / width;
  for (std::size_t w0 = 0; w0 < total; w0 += words) {
    const std::size_t depth = std::min(words, total - w0);
    std::vector<T> group(in.begin() + static_cast<std::ptrdiff_t>(w0 * width),
                         in.begin() + static_cast<std::ptrdiff_t>((w0 + depth) * width));
    group = inverse ? block_deinterleave(group, depth, width) : block_interleave(group, depth, width);
    out.insert(out.end(), group.begin(), group.end());
  }
  return out;
}

inline constexpr std::size_t kInterleaveDepth = 10;
inline constexpr std::size_t kCodewordBits = 128;

/// 10 x 128 row-column interleaver.
Bits bit_interleave(const Bits& bits);
Bits bit_deinterleave(const Bits& bits);

/// Per-bit LLRs for the Gray QPSK map: [2 sqrt2 Im/nv, 2 sqrt2 Re/nv] per symbol.
std::vector<double> demap_qpsk_llr(const ComplexBuffer& symbols, double noise_var);

}  // namespace tibwb
