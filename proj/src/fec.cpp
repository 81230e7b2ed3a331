#include "tibwb/fec.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace tibwb {

namespace {

using DenseBits = std::vector<std::vector<std::uint8_t>>;

struct Reduction {
  std::vector<int> info;
  std::vector<int> parity;
  std::vector<std::vector<int>> taps;
};

// Gauss-Jordan over GF(2), pivots taken from the rightmost columns first.
Reduction reduce(DenseBits h, int n) {
  const int m = static_cast<int>(h.size());
  std::vector<int> pivot_col(m, -1);
  std::vector<bool> is_pivot(n, false);
  int rank = 0;
  for (int c = n - 1; c >= 0 && rank < m; --c) {
    int sel = -1;
    for (int r = rank; r < m; ++r)
      if (h[r][c]) {
        sel = r;
        break;
      }
    if (sel < 0) continue;
    std::swap(h[sel], h[rank]);
    for (int r = 0; r < m; ++r)
      if (r != rank && h[r][c])
        for (int j = 0; j < n; ++j) h[r][j] ^= h[rank][j];
    pivot_col[rank] = c;
    is_pivot[c] = true;
    ++rank;
  }
  if (rank < m) throw std::invalid_argument("LDPC parity-check matrix is rank deficient");

  Reduction out;
  std::vector<int> info_index(n, -1);
  for (int c = 0; c < n; ++c)
    if (!is_pivot[c]) {
      info_index[c] = static_cast<int>(out.info.size());
      out.info.push_back(c);
    }
  // Order parity rows by their pivot column so the codeword layout is [info | parity] when possible.
  std::vector<int> order(m);
  for (int r = 0; r < m; ++r) order[r] = r;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return pivot_col[a] < pivot_col[b]; });
  for (int r : order) {
    out.parity.push_back(pivot_col[r]);
    std::vector<int> t;
    for (int c = 0; c < n; ++c)
      if (h[r][c] && !is_pivot[c]) t.push_back(info_index[c]);
    out.taps.push_back(std::move(t));
  }
  return out;
}

std::uint64_t pick(std::mt19937_64& eng, std::size_t count) { return eng() % count; }

bool try_generate(int n, int m, std::uint64_t seed, std::vector<std::pair<int, int>>& ones) {
  constexpr int kColWeight = 3;
  const int row_cap = (n * kColWeight + m - 1) / m;
  std::mt19937_64 eng(seed);
  std::vector<std::vector<int>> rows_of_col(n), cols_of_row(m);
  std::vector<int> deg(m, 0);
  for (int c = 0; c < n; ++c) {
    for (int e = 0; e < kColWeight; ++e) {
      std::vector<bool> blocked(m, false);
      for (int r0 : rows_of_col[c]) {
        blocked[r0] = true;
        for (int c2 : cols_of_row[r0])
          for (int r2 : rows_of_col[c2]) blocked[r2] = true;
      }
      std::vector<int> cand;
      for (int strict = 1; strict >= 0 && cand.empty(); --strict) {
        int best = row_cap;
        for (int r = 0; r < m; ++r) {
          const bool in_col = std::find(rows_of_col[c].begin(), rows_of_col[c].end(), r) != rows_of_col[c].end();
          if (deg[r] >= row_cap || in_col || (strict && blocked[r])) continue;
          if (deg[r] < best) {
            best = deg[r];
            cand.clear();
          }
          if (deg[r] == best) cand.push_back(r);
        }
      }
      if (cand.empty()) return false;
      const int r = cand[pick(eng, cand.size())];
      rows_of_col[c].push_back(r);
      cols_of_row[r].push_back(c);
      ++deg[r];
    }
  }
  ones.clear();
  for (int c = 0; c < n; ++c)
    for (int r : rows_of_col[c]) ones.emplace_back(r, c);
  std::sort(ones.begin(), ones.end());
  return true;
}

}  // namespace

CodeSpec CodeSpec::generate(int n, int k, std::uint64_t seed) {
  if (k < 1 || k >= n) throw std::invalid_argument("CodeSpec::generate: need 0 < k < n");
  CodeSpec spec;
  spec.n = n;
  spec.k = k;
  for (std::uint64_t attempt = 0; attempt < 10000; ++attempt) {
    if (!try_generate(n, n - k, seed + attempt, spec.ones)) continue;
    try {
      const Reduction red = reduce(spec.dense(), n);
      bool systematic = true;
      for (int i = 0; i < k; ++i) systematic = systematic && red.info[i] == i;
      if (systematic) return spec;
    } catch (const std::invalid_argument&) {
    }
  }
  throw std::runtime_error("CodeSpec::generate: no systematic full-rank matrix found");
}

CodeSpec CodeSpec::from_text(const std::string& text) {
  std::istringstream in(text);
  CodeSpec spec;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    int a = 0, b = 0;
    std::string rest;
    if (!(ls >> a >> b) || (ls >> rest))
      throw std::invalid_argument("parity-check file line " + std::to_string(line_no) + ": expected two integers");
    if (!have_header) {
      spec.n = a;
      spec.k = b;
      if (spec.k < 1 || spec.k >= spec.n)
        throw std::invalid_argument("parity-check file: header must be 'n k' with 0 < k < n");
      have_header = true;
      continue;
    }
    if (a < 0 || a >= spec.checks() || b < 0 || b >= spec.n)
      throw std::invalid_argument("parity-check file line " + std::to_string(line_no) + ": index out of range");
    spec.ones.emplace_back(a, b);
  }
  if (!have_header) throw std::invalid_argument("parity-check file: missing 'n k' header");
  std::sort(spec.ones.begin(), spec.ones.end());
  spec.ones.erase(std::unique(spec.ones.begin(), spec.ones.end()), spec.ones.end());
  return spec;
}

CodeSpec CodeSpec::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open parity-check file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return from_text(ss.str());
}

std::string CodeSpec::to_text() const {
  std::ostringstream out;
  out << n << ' ' << k << '\n';
  for (const auto& [r, c] : ones) out << r << ' ' << c << '\n';
  return out.str();
}

void CodeSpec::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write parity-check file " + path);
  f << to_text();
}

DenseBits CodeSpec::dense() const {
  DenseBits h(checks(), std::vector<std::uint8_t>(n, 0));
  for (const auto& [r, c] : ones) h[r][c] = 1;
  return h;
}

LdpcCodec::LdpcCodec(CodeSpec spec) : spec_(std::move(spec)) {
  if (spec_.max_iters < 1) throw std::invalid_argument("LdpcCodec: max_iters must be >= 1");
  Reduction red = reduce(spec_.dense(), spec_.n);
  info_pos_ = std::move(red.info);
  parity_pos_ = std::move(red.parity);
  parity_taps_ = std::move(red.taps);

  const int m = spec_.checks();
  check_start_.assign(m + 1, 0);
  var_edges_.assign(spec_.n, {});
  for (const auto& [r, c] : spec_.ones) ++check_start_[r + 1];
  for (int r = 0; r < m; ++r) check_start_[r + 1] += check_start_[r];
  edge_var_.resize(spec_.ones.size());
  for (std::size_t e = 0; e < spec_.ones.size(); ++e) {
    edge_var_[e] = spec_.ones[e].second;
    var_edges_[spec_.ones[e].second].push_back(static_cast<int>(e));
  }
}

Bits LdpcCodec::encode(const Bits& info) const {
  const std::size_t k = spec_.k, n = spec_.n;
  if (info.size() % k != 0) throw std::invalid_argument("encode: info length must be a multiple of k");
  Bits out(info.size() / k * n, 0);
  for (std::size_t w = 0; w < info.size() / k; ++w) {
    const std::uint8_t* u = info.data() + w * k;
    std::uint8_t* cw = out.data() + w * n;
    for (std::size_t i = 0; i < k; ++i) cw[info_pos_[i]] = u[i] & 1u;
    for (std::size_t j = 0; j < parity_pos_.size(); ++j) {
      std::uint8_t p = 0;
      for (int t : parity_taps_[j]) p ^= u[t] & 1u;
      cw[parity_pos_[j]] = p;
    }
  }
  return out;
}

namespace {

bool syndrome_ok(const std::vector<int>& check_start, const std::vector<int>& edge_var, const std::uint8_t* bits) {
  for (std::size_t r = 0; r + 1 < check_start.size(); ++r) {
    std::uint8_t s = 0;
    for (int e = check_start[r]; e < check_start[r + 1]; ++e) s ^= bits[edge_var[e]];
    if (s) return false;
  }
  return true;
}

}  // namespace

std::pair<Bits, int> LdpcCodec::decode_codeword(const double* llr) const {
  constexpr double kLlrClip = 50.0;
  constexpr double kTanhClip = 1.0 - 1e-15;
  const int n = spec_.n;
  std::vector<double> ch(n);
  Bits hard(n);
  for (int v = 0; v < n; ++v) {
    ch[v] = std::isfinite(llr[v]) ? std::clamp(llr[v], -kLlrClip, kLlrClip) : 0.0;
    hard[v] = ch[v] < 0.0;
  }
  if (syndrome_ok(check_start_, edge_var_, hard.data())) return {hard, 0};

  const std::size_t edges = edge_var_.size();
  std::vector<double> v2c(edges), c2v(edges, 0.0), t(edges);
  for (std::size_t e = 0; e < edges; ++e) v2c[e] = ch[edge_var_[e]];

  for (int it = 1; it <= spec_.max_iters; ++it) {
    for (std::size_t r = 0; r + 1 < check_start_.size(); ++r) {
      const int e0 = check_start_[r], e1 = check_start_[r + 1];
      for (int e = e0; e < e1; ++e) t[e] = std::tanh(0.5 * v2c[e]);
      for (int e = e0; e < e1; ++e) {
        double prod = 1.0;
        for (int f = e0; f < e1; ++f)
          if (f != e) prod *= t[f];
        c2v[e] = 2.0 * std::atanh(std::clamp(prod, -kTanhClip, kTanhClip));
      }
    }
    for (int v = 0; v < n; ++v) {
      double total = ch[v];
      for (int e : var_edges_[v]) total += c2v[e];
      hard[v] = total < 0.0;
      for (int e : var_edges_[v]) v2c[e] = std::clamp(total - c2v[e], -kLlrClip, kLlrClip);
    }
    if (syndrome_ok(check_start_, edge_var_, hard.data())) return {hard, it};
  }
  return {hard, spec_.max_iters};
}

Bits LdpcCodec::decode(const std::vector<double>& llrs) const {
  const std::size_t n = spec_.n;
  if (llrs.size() % n != 0) throw std::invalid_argument("decode: LLR count must be a multiple of n");
  Bits out;
  out.reserve(llrs.size() / n * spec_.k);
  for (std::size_t w = 0; w < llrs.size() / n; ++w) {
    const Bits cw = decode_codeword(llrs.data() + w * n).first;
    for (int p : info_pos_) out.push_back(cw[p]);
  }
  return out;
}

bool LdpcCodec::check(const Bits& codewords) const {
  const std::size_t n = spec_.n;
  if (codewords.size() % n != 0) throw std::invalid_argument("check: length must be a multiple of n");
  for (std::size_t w = 0; w < codewords.size() / n; ++w)
    if (!syndrome_ok(check_start_, edge_var_, codewords.data() + w * n)) return false;
  return true;
}

Bits bit_interleave(const Bits& bits) {
  if (bits.size() != kInterleaveDepth * kCodewordBits)
    throw std::invalid_argument("bit_interleave: expected 1280 bits");
  return block_interleave(bits, kInterleaveDepth, kCodewordBits);
}

Bits bit_deinterleave(const Bits& bits) {
  if (bits.size() != kInterleaveDepth * kCodewordBits)
    throw std::invalid_argument("bit_deinterleave: expected 1280 bits");
  return block_deinterleave(bits, kInterleaveDepth, kCodewordBits);
}

std::vector<double> demap_qpsk_llr(const ComplexBuffer& symbols, double noise_var) {
  if (!(noise_var > 0.0)) throw std::invalid_argument("demap_qpsk_llr: noise_var must be positive");
  const double s = 2.0 * std::sqrt(2.0) / noise_var;
  std::vector<double> out(2 * static_cast<std::size_t>(symbols.size()));
  for (Index i = 0; i < symbols.size(); ++i) {
    out[2 * i] = s * symbols(i).imag();
    out[2 * i + 1] = s * symbols(i).real();
  }
  return out;
}

}  // namespace tibwb
