#include "tibwb/sync.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "tibwb/dsp.hpp"

namespace tibwb {

void SyncConfig::validate() const {
  if (!(delta_decision > 0.0 && delta_decision <= 1.0))
    throw std::invalid_argument("delta_decision must lie in (0, 1]");
  if (window_len < 0) throw std::invalid_argument("window_len must be non-negative");
  if (interval_len < 0) throw std::invalid_argument("interval_len must be non-negative");
}

RealBuffer correlate_preamble(const ComplexBuffer& stream, const PreambleBlock& preamble) {
  if (stream.size() < 1) throw std::invalid_argument("correlate_preamble: empty stream");
  const double p_zc = expected_peak(preamble.zc, preamble.boost_db);
  return dsp::xcorr(stream, preamble.zc_part()).cwiseAbs() / p_zc;
}

std::vector<Index> track_peaks(const RealBuffer& metric, double threshold, Index window_len) {
  if (window_len < 1) throw std::invalid_argument("track_peaks: window_len must be positive");
  std::vector<Index> candidates;
  for (Index i = 0; i < metric.size(); ++i)
    if (metric(i) >= threshold) candidates.push_back(i);
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](Index a, Index b) { return metric(a) > metric(b); });

  // Buckets of width window_len: any accepted peak within distance
  // < window_len of i lives in i's bucket or one of its two neighbours.
  std::unordered_map<Index, std::vector<Index>> buckets;
  std::vector<Index> accepted;
  for (Index i : candidates) {
    const Index b = i / window_len;
    bool clear = true;
    for (Index nb = b - 1; nb <= b + 1 && clear; ++nb) {
      auto it = buckets.find(nb);
      if (it == buckets.end()) continue;
      for (Index j : it->second)
        if (std::abs(j - i) < window_len) {
          clear = false;
          break;
        }
    }
    if (!clear) continue;
    buckets[b].push_back(i);
    accepted.push_back(i);
  }
  std::sort(accepted.begin(), accepted.end());
  return accepted;
}

DetectionReport detect_frames(const ComplexBuffer& stream, const PreambleBlock& preamble,
                              const SyncConfig& cfg, Index block_len) {
  if (stream.size() < 1) throw std::invalid_argument("detect_frames: empty stream");
  return classify(correlate_preamble(stream, preamble), stream.size(), preamble, cfg, block_len);
}

DetectionReport classify(const RealBuffer& c, Index stream_len, const PreambleBlock& preamble,
                         const SyncConfig& cfg, Index block_len) {
  cfg.validate();
  if (stream_len < 1) throw std::invalid_argument("classify: empty stream");
  DetectionReport rep;
  rep.p_zc = expected_peak(preamble.zc, preamble.boost_db);
  rep.threshold = cfg.delta_decision;
  rep.window_len = cfg.window_len > 0 ? cfg.window_len : 2 * static_cast<Index>(preamble.zc.pad_to);
  rep.interval_len = cfg.interval_len > 0 ? cfg.interval_len : preamble.size() + block_len + preamble.n_zp;

  rep.peak_indices = track_peaks(c, cfg.delta_decision, rep.window_len);
  for (Index i : rep.peak_indices) rep.peak_values.push_back(c(i));

  const Index intervals = std::max<Index>(1, stream_len / rep.interval_len);
  const Index offset = preamble.n_zp + preamble.zc.length - 1;  // peak index of a frame at head 0
  const Index half = rep.window_len / 2;
  rep.verdicts.assign(intervals, Hypothesis::H0);
  rep.frame_starts.assign(intervals, std::nullopt);
  rep.interval_peaks.assign(intervals, 0.0);

  for (std::size_t p = 0; p < rep.peak_indices.size(); ++p) {
    const Index i = rep.peak_indices[p];
    // Slot whose expected window [e - half, e + half) may contain i.
    const Index k = (i - offset + half) >= 0 ? (i - offset + half) / rep.interval_len : -1;
    const Index e = k * rep.interval_len + offset;
    const bool inside = k >= 0 && k < intervals && i >= e - half && i < e + half;
    if (!inside) {
      ++rep.rejected_peaks;
      continue;
    }
    if (rep.verdicts[k] == Hypothesis::H1 && rep.peak_values[p] <= rep.interval_peaks[k]) continue;
    rep.verdicts[k] = Hypothesis::H1;
    rep.interval_peaks[k] = rep.peak_values[p];
    rep.frame_starts[k] = i - offset;
  }
  return rep;
}

DetectionScore score(const DetectionReport& report) {
  if (!report.truth) throw std::invalid_argument("score: report carries no truth labels");
  const auto& truth = *report.truth;
  if (truth.size() != report.verdicts.size())
    throw std::invalid_argument("score: truth and verdict counts differ");
  DetectionScore s;
  Index correct = 0, h1_given_h0 = 0, h0_given_h1 = 0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const bool data = truth[k] == Hypothesis::H1;
    const bool said_data = report.verdicts[k] == Hypothesis::H1;
    (data ? s.data_intervals : s.noise_intervals)++;
    if (data == said_data) ++correct;
    if (!data && said_data) ++h1_given_h0;
    if (data && !said_data) ++h0_given_h1;
  }
  const auto ratio = [](Index a, Index b) { return b > 0 ? static_cast<double>(a) / b : 0.0; };
  s.p_d = ratio(correct, static_cast<Index>(truth.size()));
  s.p_m = ratio(h1_given_h0, s.noise_intervals);
  s.p_f = ratio(h0_given_h1, s.data_intervals);
  s.detection_rate = s.data_intervals > 0 ? 1.0 - s.p_f : 0.0;
  s.false_alarm_rate = s.p_m;
  return s;
}

}  // namespace tibwb
