#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tibwb/equalizer.hpp"
#include "tibwb/estimation.hpp"
#include "tibwb/fec.hpp"
#include "tibwb/sync.hpp"
#include "tibwb/tx.hpp"

namespace tibwb {

/// Raised for malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { ThresholdSweep, BerSweep, DetectStream };

std::string to_string(ExperimentKind k);
ExperimentKind parse_kind(const std::string& s);

enum class FusionWeights { Oracle, Analytic };

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::BerSweep;
  /// Eb/N0 grid for BER sweeps.
  std::vector<double> snr_grid_db{0, 2, 4, 6, 8, 10, 12, 14, 16};
  /// delta_decision grid for threshold sweeps.
  std::vector<double> thresholds{0.05, 0.1, 0.15, 0.2, 0.25, 0.275, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 1.0};
  /// Frame cap per SNR point.
  int frames = 1000;
  int channel_taps = 8;
  double boost_db = 0.0;
  EstimatorKind estimator = EstimatorKind::A;
  EqualizerKind equalizer = EqualizerKind::MMSE;
  int ibdfe_iters = 4;
  std::uint64_t seed = 1;
  bool coded = false;

  SystemConfig system{};
  std::vector<double> sweep_boosts_db{0, 3, 6};
  int data_frames = 700;
  int noise_frames = 300;
  /// Per-sample SNR of the data region in the sync experiments.
  double sync_snr_db = 10.0;
  double sync_delta = 0.275;
  int sync_window = 0;
  bool oracle_sync = true;
  bool fading = true;
  int min_errors = 200;
  int min_frames = 0;
  /// Pseudo-CIR taps kept by Algorithm A; 0 selects N_ZP.
  int cir_taps = 0;
  FusionWeights fusion_weights = FusionWeights::Oracle;
  int decoder_iters = 50;
  /// Parity-check file; empty selects the built-in matrix.
  std::string ldpc_matrix;
  /// Frames simulated between two evaluations of the stopping rule.
  int batch_frames = 32;

  void validate() const;
  /// Equalizer passes reported per SNR point.
  int iterations() const;
  bool operator==(const ExperimentSpec&) const = default;
};

/// Flat key=value text; '#' starts a comment. Unknown keys and malformed
/// values raise ConfigError naming the line.
ExperimentSpec parse_config(const std::string& text);
ExperimentSpec load_config(const std::string& path);
std::string save_config(const ExperimentSpec& spec);

/// Evenly spaced inclusive grid start, start+step, ... <= stop.
std::vector<double> make_grid(double start, double stop, double step);

struct BerRecord {
  double snr_db = 0.0;
  std::string estimator;
  std::string equalizer;
  int iteration = 1;
  double boost_db = 0.0;
  int taps = 0;
  std::uint64_t bit_errors = 0;
  std::uint64_t bits_total = 0;
  std::uint64_t frames = 0;
  double ber = 0.0;
};

inline constexpr const char* kBerCsvHeader = "snr_db,estimator,equalizer,iteration,boost_db,taps,bit_errors,bits_total,ber";

struct ThresholdRecord {
  double boost_db = 0.0;
  double threshold = 0.0;
  DetectionScore score;
};

inline constexpr const char* kThresholdCsvHeader =
    "boost_db,threshold,p_d,p_m,p_f,detection_rate,false_alarm_rate,data_intervals,noise_intervals";

struct StreamInterval {
  Index interval = 0;
  std::optional<Hypothesis> truth;
  Hypothesis verdict = Hypothesis::H0;
  std::optional<Index> peak_index;
  double peak_value = 0.0;
  std::optional<Index> frame_start;
};

inline constexpr const char* kStreamCsvHeader = "interval,truth,verdict,peak_index,peak_value,frame_start";

/// Runs fn(i) for i in [0, count) on up to `workers` threads; rethrows the first exception.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn);

unsigned default_workers();

/// Information bits carried by one block under the spec's coding mode.
int info_bits_per_block(const ExperimentSpec& spec);
/// Per-sample SNR gamma for an Eb/N0 value in dB.
SnrPoint snr_from_ebn0(double ebn0_db, const ExperimentSpec& spec);

std::vector<BerRecord> run_ber_sweep(const ExperimentSpec& spec, unsigned workers = 1);
std::vector<ThresholdRecord> run_threshold_sweep(const ExperimentSpec& spec, unsigned workers = 1);

/// Mixed data/noise stream used by the sync experiments, with its slot labels.
struct LabelledStream {
  ComplexBuffer samples;
  std::vector<Hypothesis> truth;
  std::vector<Index> frame_starts;
};
LabelledStream build_sync_stream(const ExperimentSpec& spec, double boost_db, unsigned workers = 1);

std::vector<StreamInterval> detect_stream(const ExperimentSpec& spec, const ComplexBuffer* stream = nullptr,
                                          unsigned workers = 1);

/// Whitespace-separated "re im" sample lines.
ComplexBuffer load_stream(const std::string& path);

void emit_csv(const std::vector<BerRecord>& rows, const ExperimentSpec& spec, std::ostream& out);
void emit_csv(const std::vector<ThresholdRecord>& rows, const ExperimentSpec& spec, std::ostream& out);
void emit_csv(const std::vector<StreamInterval>& rows, const ExperimentSpec& spec, std::ostream& out);
void emit_csv(const std::vector<BerRecord>& rows, const ExperimentSpec& spec, const std::string& path);

/// Codec for the spec's parity-check matrix (built-in matrix when none is named).
LdpcCodec make_codec(const ExperimentSpec& spec);

/// Per-iteration bit errors for a single frame trial.
struct TrialResult {
  std::vector<std::uint64_t> errors;
  std::uint64_t bits = 0;
};
TrialResult run_ber_trial(const ExperimentSpec& spec, const LdpcCodec* codec, std::size_t snr_index,
                          std::uint64_t trial, SnrPoint snr);

}  // namespace tibwb
