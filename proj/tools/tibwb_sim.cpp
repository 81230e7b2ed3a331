// Monte-Carlo driver: threshold sweeps, BER sweeps and stream detection.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tibwb/harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  unsigned workers = 0;
  std::optional<double> snr_start, snr_stop, snr_step;
  std::optional<int> taps;
  std::optional<double> boost;
  std::optional<std::string> estimator, equalizer;
  std::optional<int> ibdfe_iters;
  bool coded = false;
  std::string stream;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "Experiment config file (key=value)")->required();
  sub->add_option("--seed", o.seed, "Override the RNG seed");
  sub->add_option("--out", o.out, "Output CSV path (stdout when omitted)");
  sub->add_option("--workers", o.workers, "Worker threads (default: hardware concurrency)");
  sub->add_option("--snr-db-start", o.snr_start, "First Eb/N0 grid point in dB");
  sub->add_option("--snr-db-stop", o.snr_stop, "Last Eb/N0 grid point in dB");
  sub->add_option("--snr-db-step", o.snr_step, "Eb/N0 grid step in dB");
  sub->add_option("--taps", o.taps, "Channel taps")->check(CLI::IsMember({8, 32}));
  sub->add_option("--boost-db", o.boost, "Preamble boost in dB")->check(CLI::IsMember({0.0, 3.0, 6.0}));
  sub->add_option("--estimator", o.estimator, "perfect, A, B or C");
  sub->add_option("--equalizer", o.equalizer, "zf, mmse or ibdfe");
  sub->add_option("--ibdfe-iters", o.ibdfe_iters, "IB-DFE iterations");
  sub->add_flag("--coded", o.coded, "Enable LDPC(128,64) coding");
}

tibwb::ExperimentSpec resolve(const Overrides& o, tibwb::ExperimentKind kind) {
  using tibwb::ConfigError;
  tibwb::ExperimentSpec spec = tibwb::load_config(o.config);
  spec.kind = kind;
  if (o.seed) spec.seed = *o.seed;
  const int grid_flags = (o.snr_start ? 1 : 0) + (o.snr_stop ? 1 : 0) + (o.snr_step ? 1 : 0);
  if (grid_flags == 3) spec.snr_grid_db = tibwb::make_grid(*o.snr_start, *o.snr_stop, *o.snr_step);
  else if (grid_flags != 0) throw ConfigError("--snr-db-start, --snr-db-stop and --snr-db-step go together");
  if (o.taps) spec.channel_taps = *o.taps;
  if (o.boost) spec.boost_db = *o.boost;
  try {
    if (o.estimator) spec.estimator = tibwb::parse_estimator(*o.estimator);
    if (o.equalizer) spec.equalizer = tibwb::parse_equalizer(*o.equalizer);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (o.ibdfe_iters) spec.ibdfe_iters = *o.ibdfe_iters;
  if (o.coded) spec.coded = true;
  spec.system.boost_db = spec.boost_db;
  spec.system.coded = spec.coded;
  spec.validate();
  return spec;
}

template <typename Rows>
void write(const Rows& rows, const tibwb::ExperimentSpec& spec, const std::string& out) {
  if (out.empty()) {
    tibwb::emit_csv(rows, spec, std::cout);
    return;
  }
  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot write " + out);
  tibwb::emit_csv(rows, spec, f);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TIBWB-OFDM frame sync, channel estimation and equalization simulator"};
  app.require_subcommand(1);
  Overrides o;
  CLI::App* thr = app.add_subcommand("threshold-sweep", "Detection probability versus threshold");
  CLI::App* ber = app.add_subcommand("ber-sweep", "Bit error rate versus Eb/N0");
  CLI::App* det = app.add_subcommand("detect-stream", "Per-interval frame detection verdicts");
  for (CLI::App* sub : {thr, ber, det}) add_common(sub, o);
  det->add_option("--stream", o.stream, "Sample file of 're im' lines (generated when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const unsigned workers = o.workers > 0 ? o.workers : tibwb::default_workers();
    if (*thr) {
      const auto spec = resolve(o, tibwb::ExperimentKind::ThresholdSweep);
      write(tibwb::run_threshold_sweep(spec, workers), spec, o.out);
    } else if (*ber) {
      const auto spec = resolve(o, tibwb::ExperimentKind::BerSweep);
      write(tibwb::run_ber_sweep(spec, workers), spec, o.out);
    } else {
      const auto spec = resolve(o, tibwb::ExperimentKind::DetectStream);
      std::optional<tibwb::ComplexBuffer> stream;
      if (!o.stream.empty()) stream = tibwb::load_stream(o.stream);
      write(tibwb::detect_stream(spec, stream ? &*stream : nullptr, workers), spec, o.out);
    }
  } catch (const tibwb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
