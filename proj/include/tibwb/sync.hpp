#pragma once

#include <optional>
#include <vector>

#include "tibwb/preamble.hpp"
#include "tibwb/types.hpp"

namespace tibwb {

struct SyncConfig {
  /// Threshold as a fraction of the preamble autocorrelation peak P_zc.
  double delta_decision = 0.275;
  /// Peak-tracking window length; 0 selects 2 N_p.
  Index window_len = 0;
  /// Analysis interval (frame slot) length; 0 selects the frame length
  /// implied by the preamble and the block length given to detect_frames.
  Index interval_len = 0;

  void validate() const;
};

enum class Hypothesis { H0, H1 };

struct DetectionReport {
  std::vector<Hypothesis> verdicts;
  /// Per interval: estimated frame start and normalised peak value (H1 only).
  std::vector<std::optional<Index>> frame_starts;
  std::vector<double> interval_peaks;
  /// Every accepted peak, in increasing sample order.
  std::vector<Index> peak_indices;
  std::vector<double> peak_values;
  /// Accepted peaks that fell outside every expected preamble window.
  Index rejected_peaks = 0;
  std::optional<std::vector<Hypothesis>> truth;
  double p_zc = 0.0;
  double threshold = 0.0;
  Index window_len = 0;
  Index interval_len = 0;
};

struct DetectionScore {
  /// Prior-weighted probability of a correct verdict.
  double p_d = 0.0;
  /// H1 chosen given H0.
  double p_m = 0.0;
  /// H0 chosen given H1.
  double p_f = 0.0;
  /// Conventional names for the same two conditionals: Pr{H1 | data}, Pr{H1 | noise}.
  double detection_rate = 0.0;
  double false_alarm_rate = 0.0;
  Index data_intervals = 0;
  Index noise_intervals = 0;
};

/// |xcorr(stream, zc part)| / P_zc; entry i corresponds to the ZC's last sample on stream(i).
RealBuffer correlate_preamble(const ComplexBuffer& stream, const PreambleBlock& preamble);

/// Greedy window tracking: candidates >= threshold in descending value order,
/// each accepted only if no already accepted peak lies closer than window_len.
/// Returns accepted indices in increasing order.
std::vector<Index> track_peaks(const RealBuffer& metric, double threshold, Index window_len);

/// Verdicts from a precomputed correlation metric over a stream of stream_len samples.
DetectionReport classify(const RealBuffer& metric, Index stream_len, const PreambleBlock& preamble,
                         const SyncConfig& cfg, Index block_len);

DetectionReport detect_frames(const ComplexBuffer& stream, const PreambleBlock& preamble,
                              const SyncConfig& cfg, Index block_len);

DetectionScore score(const DetectionReport& report);

}  // namespace tibwb
