#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "tibwb/harness.hpp"

namespace tibwb {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + fmt_double(v[i]);
  return out;
}

class LineParser {
 public:
  LineParser(int line, std::string key, std::string value)
      : line_(line), key_(std::move(key)), value_(std::move(value)) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("line " + std::to_string(line_) + ": key '" + key_ + "': " + what);
  }

  double real() const {
    try {
      std::size_t used = 0;
      const double v = std::stod(value_, &used);
      if (used != value_.size() || !std::isfinite(v)) fail("expected a finite number, got '" + value_ + "'");
      return v;
    } catch (const std::logic_error&) {
      fail("expected a number, got '" + value_ + "'");
    }
  }

  long long integer() const {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(value_, &used);
      if (used != value_.size()) fail("expected an integer, got '" + value_ + "'");
      return v;
    } catch (const std::logic_error&) {
      fail("expected an integer, got '" + value_ + "'");
    }
  }

  int int32() const {
    const long long v = integer();
    if (v < -2147483647LL || v > 2147483647LL) fail("integer out of range");
    return static_cast<int>(v);
  }

  std::uint64_t u64() const {
    if (value_.empty() || value_[0] == '-') fail("expected an unsigned integer, got '" + value_ + "'");
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(value_, &used, 0);
      if (used != value_.size()) fail("expected an unsigned integer, got '" + value_ + "'");
      return v;
    } catch (const std::logic_error&) {
      fail("expected an unsigned integer, got '" + value_ + "'");
    }
  }

  bool boolean() const {
    if (value_ == "true" || value_ == "1" || value_ == "yes" || value_ == "on") return true;
    if (value_ == "false" || value_ == "0" || value_ == "no" || value_ == "off") return false;
    fail("expected true or false, got '" + value_ + "'");
  }

  std::vector<double> reals() const {
    std::vector<double> out;
    std::stringstream ss(value_);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(LineParser(line_, key_, trim(item)).real());
    if (out.empty()) fail("expected a comma-separated list of numbers");
    return out;
  }

  const std::string& text() const { return value_; }

  template <typename F>
  auto convert(F&& f) const {
    try {
      return f(value_);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }

 private:
  int line_;
  std::string key_;
  std::string value_;
};

}  // namespace

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::ThresholdSweep: return "threshold_sweep";
    case ExperimentKind::BerSweep: return "ber_sweep";
    case ExperimentKind::DetectStream: return "detect_stream";
  }
  return "?";
}

ExperimentKind parse_kind(const std::string& s) {
  if (s == "threshold_sweep" || s == "threshold-sweep") return ExperimentKind::ThresholdSweep;
  if (s == "ber_sweep" || s == "ber-sweep") return ExperimentKind::BerSweep;
  if (s == "detect_stream" || s == "detect-stream") return ExperimentKind::DetectStream;
  throw std::invalid_argument("unknown experiment kind '" + s + "'");
}

std::vector<double> make_grid(double start, double stop, double step) {
  if (!(step > 0.0)) throw ConfigError("SNR grid step must be positive");
  if (stop < start) throw ConfigError("SNR grid stop must not precede start");
  std::vector<double> out;
  const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9)) + 1;
  for (long long i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

void ExperimentSpec::validate() const {
  try {
    system.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (frames < 1) throw ConfigError("frames must be >= 1");
  if (snr_grid_db.empty()) throw ConfigError("snr_grid_db must not be empty");
  if (thresholds.empty()) throw ConfigError("thresholds must not be empty");
  for (double t : thresholds)
    if (!(t > 0.0 && t <= 1.0)) throw ConfigError("thresholds must lie in (0, 1]");
  if (!(sync_delta > 0.0 && sync_delta <= 1.0)) throw ConfigError("sync_delta must lie in (0, 1]");
  if (channel_taps < 1 || channel_taps > system.n_zp)
    throw ConfigError("channel_taps must lie in [1, n_zp]");
  if (ibdfe_iters < 1) throw ConfigError("ibdfe_iters must be >= 1");
  if (sweep_boosts_db.empty()) throw ConfigError("sweep_boosts_db must not be empty");
  if (data_frames < 0 || noise_frames < 0 || data_frames + noise_frames < 1)
    throw ConfigError("data_frames + noise_frames must be >= 1");
  if (sync_window < 0) throw ConfigError("sync_window must be non-negative");
  if (min_errors < 0 || min_frames < 0) throw ConfigError("min_errors and min_frames must be non-negative");
  if (cir_taps < 0 || cir_taps > system.preamble_len()) throw ConfigError("cir_taps must lie in [0, n_zp + zc_pad]");
  if (decoder_iters < 1) throw ConfigError("decoder_iters must be >= 1");
  if (batch_frames < 1) throw ConfigError("batch_frames must be >= 1");
  if (coded && system.coded_bits_per_block() < static_cast<int>(kCodewordBits))
    throw ConfigError("coded mode needs at least one codeword per block");
}

int ExperimentSpec::iterations() const {
  if (equalizer == EqualizerKind::IBDFE) return ibdfe_iters;
  if (estimator == EstimatorKind::B || estimator == EstimatorKind::C) return ibdfe_iters;
  return 1;
}

ExperimentSpec parse_config(const std::string& text) {
  ExperimentSpec spec;
  std::set<std::string> seen;
  std::map<std::string, double> grid_parts;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const LineParser v(line_no, key, trim(line.substr(eq + 1)));
    if (!seen.insert(key).second) v.fail("duplicate key");

    if (key == "kind") spec.kind = v.convert(parse_kind);
    else if (key == "seed") spec.seed = v.u64();
    else if (key == "frames") spec.frames = v.int32();
    else if (key == "snr_grid_db") spec.snr_grid_db = v.reals();
    else if (key == "snr_db_start" || key == "snr_db_stop" || key == "snr_db_step") grid_parts[key] = v.real();
    else if (key == "thresholds") spec.thresholds = v.reals();
    else if (key == "channel_taps") spec.channel_taps = v.int32();
    else if (key == "boost_db") spec.boost_db = v.real();
    else if (key == "estimator") spec.estimator = v.convert(parse_estimator);
    else if (key == "equalizer") spec.equalizer = v.convert(parse_equalizer);
    else if (key == "ibdfe_iters") spec.ibdfe_iters = v.int32();
    else if (key == "coded") spec.coded = v.boolean();
    else if (key == "n_subcarriers") spec.system.n_subcarriers = v.int32();
    else if (key == "n_symbols") spec.system.n_symbols = v.int32();
    else if (key == "rolloff") spec.system.rolloff = v.real();
    else if (key == "zc_root") spec.system.zc.root = v.int32();
    else if (key == "zc_length") spec.system.zc.length = v.int32();
    else if (key == "zc_pad") spec.system.zc.pad_to = v.int32();
    else if (key == "n_zp") spec.system.n_zp = v.int32();
    else if (key == "interleave_words") spec.system.interleave_words = v.int32();
    else if (key == "sweep_boosts_db") spec.sweep_boosts_db = v.reals();
    else if (key == "data_frames") spec.data_frames = v.int32();
    else if (key == "noise_frames") spec.noise_frames = v.int32();
    else if (key == "sync_snr_db") spec.sync_snr_db = v.real();
    else if (key == "sync_delta") spec.sync_delta = v.real();
    else if (key == "sync_window") spec.sync_window = v.int32();
    else if (key == "oracle_sync") spec.oracle_sync = v.boolean();
    else if (key == "fading") spec.fading = v.boolean();
    else if (key == "min_errors") spec.min_errors = v.int32();
    else if (key == "min_frames") spec.min_frames = v.int32();
    else if (key == "cir_taps") spec.cir_taps = v.int32();
    else if (key == "fusion_weights") {
      if (v.text() == "oracle") spec.fusion_weights = FusionWeights::Oracle;
      else if (v.text() == "analytic") spec.fusion_weights = FusionWeights::Analytic;
      else v.fail("expected oracle or analytic");
    } else if (key == "decoder_iters") spec.decoder_iters = v.int32();
    else if (key == "ldpc_matrix") spec.ldpc_matrix = v.text();
    else if (key == "batch_frames") spec.batch_frames = v.int32();
    else v.fail("unknown key");
  }
  for (const char* req : {"kind", "seed", "frames"})
    if (!seen.count(req)) throw ConfigError(std::string("missing required key '") + req + "'");
  if (!grid_parts.empty()) {
    if (grid_parts.size() != 3)
      throw ConfigError("snr_db_start, snr_db_stop and snr_db_step must be given together");
    if (seen.count("snr_grid_db")) throw ConfigError("give either snr_grid_db or snr_db_start/stop/step, not both");
    spec.snr_grid_db = make_grid(grid_parts["snr_db_start"], grid_parts["snr_db_stop"], grid_parts["snr_db_step"]);
  }
  spec.system.boost_db = spec.boost_db;
  spec.system.coded = spec.coded;
  spec.validate();
  return spec;
}

ExperimentSpec load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string save_config(const ExperimentSpec& s) {
  std::ostringstream o;
  o << "kind=" << to_string(s.kind) << '\n'
    << "seed=" << s.seed << '\n'
    << "frames=" << s.frames << '\n'
    << "snr_grid_db=" << fmt_list(s.snr_grid_db) << '\n'
    << "thresholds=" << fmt_list(s.thresholds) << '\n'
    << "channel_taps=" << s.channel_taps << '\n'
    << "boost_db=" << fmt_double(s.boost_db) << '\n'
    << "estimator=" << to_string(s.estimator) << '\n'
    << "equalizer=" << to_string(s.equalizer) << '\n'
    << "ibdfe_iters=" << s.ibdfe_iters << '\n'
    << "coded=" << (s.coded ? "true" : "false") << '\n'
    << "n_subcarriers=" << s.system.n_subcarriers << '\n'
    << "n_symbols=" << s.system.n_symbols << '\n'
    << "rolloff=" << fmt_double(s.system.rolloff) << '\n'
    << "zc_root=" << s.system.zc.root << '\n'
    << "zc_length=" << s.system.zc.length << '\n'
    << "zc_pad=" << s.system.zc.pad_to << '\n'
    << "n_zp=" << s.system.n_zp << '\n'
    << "interleave_words=" << s.system.interleave_words << '\n'
    << "sweep_boosts_db=" << fmt_list(s.sweep_boosts_db) << '\n'
    << "data_frames=" << s.data_frames << '\n'
    << "noise_frames=" << s.noise_frames << '\n'
    << "sync_snr_db=" << fmt_double(s.sync_snr_db) << '\n'
    << "sync_delta=" << fmt_double(s.sync_delta) << '\n'
    << "sync_window=" << s.sync_window << '\n'
    << "oracle_sync=" << (s.oracle_sync ? "true" : "false") << '\n'
    << "fading=" << (s.fading ? "true" : "false") << '\n'
    << "min_errors=" << s.min_errors << '\n'
    << "min_frames=" << s.min_frames << '\n'
    << "cir_taps=" << s.cir_taps << '\n'
    << "fusion_weights=" << (s.fusion_weights == FusionWeights::Oracle ? "oracle" : "analytic") << '\n'
    << "decoder_iters=" << s.decoder_iters << '\n';
  if (!s.ldpc_matrix.empty()) o << "ldpc_matrix=" << s.ldpc_matrix << '\n';
  o << "batch_frames=" << s.batch_frames << '\n';
  return o.str();
}

}  // namespace tibwb
