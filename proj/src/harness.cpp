#include "tibwb/harness.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "tibwb/channel.hpp"
#include "tibwb/frontend.hpp"

namespace tibwb {

namespace {

constexpr std::uint64_t kLaneSync = 1u << 20;
// Idle samples ahead of the frame in BER trials; gives the sync search room.
constexpr Index kLeadSamples = 64;
// Keeps oracle fusion weights finite when an estimate is error free.
constexpr double kVarianceFloor = 1e-30;

SystemConfig system_for(const ExperimentSpec& spec, double boost_db) {
  SystemConfig cfg = spec.system;
  cfg.boost_db = boost_db;
  cfg.coded = spec.coded;
  return cfg;
}

std::optional<Index> cir_taps_of(const ExperimentSpec& spec) {
  return spec.cir_taps > 0 ? std::optional<Index>(spec.cir_taps) : std::nullopt;
}

int codewords_per_block(const SystemConfig& cfg) {
  return cfg.coded_bits_per_block() / static_cast<int>(kCodewordBits);
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

struct Payload {
  Bits reference;  // bits scored against
  ComplexBuffer symbols;
};

Payload draw_payload(const SystemConfig& cfg, const LdpcCodec* codec, dsp::RngStream& rng) {
  Payload p;
  if (!cfg.coded) {
    p.reference.resize(static_cast<std::size_t>(cfg.coded_bits_per_block()));
    for (auto& b : p.reference) b = rng.bit();
    p.symbols = map_qpsk(p.reference);
    return p;
  }
  const int words = codewords_per_block(cfg);
  p.reference.resize(static_cast<std::size_t>(words) * codec->spec().k);
  for (auto& b : p.reference) b = rng.bit();
  Bits chan = interleave_words(codec->encode(p.reference), cfg.interleave_words, kCodewordBits);
  while (chan.size() < static_cast<std::size_t>(cfg.coded_bits_per_block())) chan.push_back(rng.bit());
  p.symbols = map_qpsk(chan);
  return p;
}

std::uint64_t count_errors(const Bits& a, const Bits& b) {
  std::uint64_t e = 0;
  for (std::size_t i = 0; i < a.size(); ++i) e += (a[i] != b[i]);
  return e;
}

// Decision-directed LLRs: fit soft = mu * decision + noise, then scale.
Bits decode_block(const EqualizedBlock& blk, const SystemConfig& cfg, const LdpcCodec& codec) {
  const ComplexBuffer& soft = blk.soft_symbols;
  const ComplexBuffer& dec = blk.decided_symbols;
  const double mu = std::max(1e-12, (soft.array() * dec.array().conjugate()).real().mean());
  const double v = std::max(1e-12, (soft - mu * dec).squaredNorm() / static_cast<double>(soft.size()));
  std::vector<double> llr = demap_qpsk_llr(soft / mu, v / (mu * mu));
  llr.resize(static_cast<std::size_t>(codewords_per_block(cfg)) * kCodewordBits);
  return codec.decode(interleave_words(llr, cfg.interleave_words, kCodewordBits, true));
}

}  // namespace

unsigned default_workers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n > 0 ? n : 1;
}

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  const std::size_t n = std::min<std::size_t>(workers, count);
  pool.reserve(n);
  for (std::size_t t = 0; t < n; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

LdpcCodec make_codec(const ExperimentSpec& spec) {
  CodeSpec cs = spec.ldpc_matrix.empty() ? CodeSpec::generate() : CodeSpec::load(spec.ldpc_matrix);
  cs.max_iters = spec.decoder_iters;
  return LdpcCodec(std::move(cs));
}

int info_bits_per_block(const ExperimentSpec& spec) {
  const SystemConfig cfg = system_for(spec, spec.boost_db);
  if (!spec.coded) return cfg.coded_bits_per_block();
  return codewords_per_block(cfg) * static_cast<int>(kCodewordBits / 2);
}

SnrPoint snr_from_ebn0(double ebn0_db, const ExperimentSpec& spec) {
  const double bits = info_bits_per_block(spec);
  return {dsp::db_to_linear(ebn0_db) * bits / static_cast<double>(spec.system.block_len())};
}

TrialResult run_ber_trial(const ExperimentSpec& spec, const LdpcCodec* codec, std::size_t snr_index,
                          std::uint64_t trial, SnrPoint snr) {
  const SystemConfig cfg = system_for(spec, spec.boost_db);
  if (cfg.coded && !codec) throw std::invalid_argument("run_ber_trial: coded mode needs a codec");
  dsp::RngStream rng(spec.seed, dsp::stream_id(snr_index + 1, trial));
  const Payload payload = draw_payload(cfg, codec, rng);
  const TibwbFrame frame = assemble_frame(build_block(payload.symbols, cfg), cfg);
  const ChannelRealization ch = spec.fading ? draw_channel(rng, spec.channel_taps, cfg.n_zp)
                                            : ChannelRealization::fixed(ComplexBuffer::Ones(1));
  ComplexBuffer tx = ComplexBuffer::Zero(kLeadSamples + frame.size());
  tx.tail(frame.size()) = frame.samples();
  const ComplexBuffer rx = apply(tx, ch, snr, rng);

  const int iters = spec.iterations();
  TrialResult out;
  out.bits = payload.reference.size();
  out.errors.assign(iters, 0);

  Index head = kLeadSamples;
  if (!spec.oracle_sync) {
    const RealBuffer c = correlate_preamble(rx, frame.preamble);
    const Index window = spec.sync_window > 0 ? spec.sync_window : 2 * static_cast<Index>(cfg.zc.pad_to);
    const std::vector<Index> peaks = track_peaks(c, spec.sync_delta, window);
    if (peaks.empty()) {
      const Bits zeros(payload.reference.size(), 0);
      out.errors.assign(iters, count_errors(zeros, payload.reference));
      return out;
    }
    Index best = peaks.front();
    for (Index p : peaks)
      if (c(p) > c(best)) best = p;
    head = best - (cfg.n_zp + cfg.zc.length - 1);
  }

  const Index nb = cfg.block_len();
  const ComplexBuffer y = payload_spectrum(rx, head, cfg);
  const ComplexBuffer h_true = exact_cfr(ch, nb);
  std::optional<CfrEstimate> est_a;
  if (spec.estimator != EstimatorKind::Perfect)
    est_a = algorithm_a(preamble_observation(rx, head, cfg), frame.preamble, nb, cir_taps_of(spec));

  EqualizedBlock last;
  for (int it = 1; it <= iters; ++it) {
    CfrEstimate cfr;
    switch (spec.estimator) {
      case EstimatorKind::Perfect: cfr = {h_true, EstimatorKind::Perfect, 0.0}; break;
      case EstimatorKind::A: cfr = *est_a; break;
      case EstimatorKind::B: cfr = it == 1 ? *est_a : algorithm_b(y, last.decided); break;
      case EstimatorKind::C:
        if (it == 1) {
          cfr = *est_a;
        } else {
          const CfrEstimate est_b = algorithm_b(y, last.decided);
          double var_zc, var_data;
          if (spec.fusion_weights == FusionWeights::Oracle) {
            var_zc = estimator_mse(*est_a, h_true);
            var_data = estimator_mse(est_b, h_true);
          } else {
            var_zc = analytic_var_zc(frame.preamble, snr.noise_variance(), cir_taps_of(spec));
            var_data = analytic_var_data(last.decided, snr.noise_variance());
          }
          cfr = algorithm_c(*est_a, est_b, std::max(var_zc, kVarianceFloor), std::max(var_data, kVarianceFloor));
        }
        break;
    }

    EqualizedBlock blk;
    switch (spec.equalizer) {
      case EqualizerKind::ZF: blk = linear_equalize(y, zf_weights(cfr), cfg); break;
      case EqualizerKind::MMSE: blk = linear_equalize(y, mmse_weights(cfr, snr), cfg); break;
      case EqualizerKind::IBDFE:
        blk = ibdfe_iterate(y, cfr, snr, it == 1 ? nullptr : &last, it == 1 ? 0.0 : last.rho_next, cfg);
        break;
    }
    blk.iteration = it;
    const Bits decided = cfg.coded ? decode_block(blk, cfg, *codec) : blk.bits;
    out.errors[it - 1] = count_errors(decided, payload.reference);
    last = std::move(blk);
  }
  return out;
}

std::vector<BerRecord> run_ber_sweep(const ExperimentSpec& spec, unsigned workers) {
  spec.validate();
  std::optional<LdpcCodec> codec;
  if (spec.coded) codec.emplace(make_codec(spec));
  const int iters = spec.iterations();
  std::vector<BerRecord> rows;
  for (std::size_t si = 0; si < spec.snr_grid_db.size(); ++si) {
    const SnrPoint snr = snr_from_ebn0(spec.snr_grid_db[si], spec);
    std::vector<std::uint64_t> errors(iters, 0);
    std::uint64_t bits = 0;
    std::uint64_t done = 0;
    const std::uint64_t cap = static_cast<std::uint64_t>(spec.frames);
    while (done < cap) {
      const std::size_t batch = static_cast<std::size_t>(std::min<std::uint64_t>(spec.batch_frames, cap - done));
      std::vector<TrialResult> results(batch);
      parallel_for(batch, workers, [&](std::size_t i) {
        results[i] = run_ber_trial(spec, codec ? &*codec : nullptr, si, done + i, snr);
      });
      for (const TrialResult& r : results) {
        for (int i = 0; i < iters; ++i) errors[i] += r.errors[i];
        bits += r.bits;
      }
      done += batch;
      if (errors.back() >= static_cast<std::uint64_t>(spec.min_errors) &&
          done >= static_cast<std::uint64_t>(spec.min_frames))
        break;
    }
    for (int i = 0; i < iters; ++i) {
      BerRecord r;
      r.snr_db = spec.snr_grid_db[si];
      r.estimator = to_string(spec.estimator);
      r.equalizer = to_string(spec.equalizer);
      r.iteration = i + 1;
      r.boost_db = spec.boost_db;
      r.taps = spec.fading ? spec.channel_taps : 1;
      r.bit_errors = errors[i];
      r.bits_total = bits;
      r.frames = done;
      r.ber = static_cast<double>(errors[i]) / static_cast<double>(bits);
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

LabelledStream build_sync_stream(const ExperimentSpec& spec, double boost_db, unsigned workers) {
  spec.validate();
  const SystemConfig cfg = system_for(spec, boost_db);
  const Index slot = cfg.frame_len();
  const std::size_t slots = static_cast<std::size_t>(spec.data_frames + spec.noise_frames);
  const int taps = spec.fading ? spec.channel_taps : 1;
  const double noise_var = 1.0 / dsp::db_to_linear(spec.sync_snr_db);

  LabelledStream out;
  out.truth.assign(static_cast<std::size_t>(spec.data_frames), Hypothesis::H1);
  out.truth.resize(slots, Hypothesis::H0);
  dsp::RngStream label_rng(spec.seed, dsp::stream_id(kLaneSync, 0));
  for (std::size_t i = slots; i > 1; --i) std::swap(out.truth[i - 1], out.truth[label_rng.below(i)]);

  std::vector<ComplexBuffer> parts(slots);
  parallel_for(slots, workers, [&](std::size_t k) {
    dsp::RngStream rng(spec.seed, dsp::stream_id(kLaneSync, k + 1));
    ComplexBuffer part = ComplexBuffer::Zero(slot + taps - 1);
    if (out.truth[k] == Hypothesis::H1) {
      const TibwbFrame f = random_uncoded_frame(cfg, rng);
      const ChannelRealization ch = spec.fading ? draw_channel(rng, taps, cfg.n_zp)
                                                : ChannelRealization::fixed(ComplexBuffer::Ones(1));
      part = dsp::convolve(f.samples(), ch.taps);
    }
    part.head(slot) += dsp::gaussian_noise(rng, slot, noise_var);
    parts[k] = std::move(part);
  });

  out.samples = ComplexBuffer::Zero(static_cast<Index>(slots) * slot + taps - 1);
  out.samples.tail(taps - 1) = dsp::gaussian_noise(label_rng, taps - 1, noise_var);
  for (std::size_t k = 0; k < slots; ++k) {
    out.samples.segment(static_cast<Index>(k) * slot, parts[k].size()) += parts[k];
    out.frame_starts.push_back(out.truth[k] == Hypothesis::H1 ? static_cast<Index>(k) * slot : -1);
  }
  return out;
}

std::vector<ThresholdRecord> run_threshold_sweep(const ExperimentSpec& spec, unsigned workers) {
  spec.validate();
  std::vector<ThresholdRecord> rows;
  for (double boost : spec.sweep_boosts_db) {
    const SystemConfig cfg = system_for(spec, boost);
    const LabelledStream stream = build_sync_stream(spec, boost, workers);
    const PreambleBlock preamble = build_preamble(cfg.zc, cfg.n_zp, boost);
    const RealBuffer metric = correlate_preamble(stream.samples, preamble);
    for (double delta : spec.thresholds) {
      SyncConfig sc;
      sc.delta_decision = delta;
      sc.window_len = spec.sync_window;
      DetectionReport rep = classify(metric, stream.samples.size(), preamble, sc, cfg.block_len());
      rep.truth = stream.truth;
      rows.push_back({boost, delta, score(rep)});
    }
  }
  return rows;
}

std::vector<StreamInterval> detect_stream(const ExperimentSpec& spec, const ComplexBuffer* stream, unsigned workers) {
  spec.validate();
  const SystemConfig cfg = system_for(spec, spec.boost_db);
  const PreambleBlock preamble = build_preamble(cfg.zc, cfg.n_zp, spec.boost_db);
  std::optional<LabelledStream> generated;
  if (!stream) {
    generated = build_sync_stream(spec, spec.boost_db, workers);
    stream = &generated->samples;
  }
  SyncConfig sc;
  sc.delta_decision = spec.sync_delta;
  sc.window_len = spec.sync_window;
  const DetectionReport rep = detect_frames(*stream, preamble, sc, cfg.block_len());
  const Index offset = cfg.n_zp + cfg.zc.length - 1;
  std::vector<StreamInterval> rows;
  for (std::size_t k = 0; k < rep.verdicts.size(); ++k) {
    StreamInterval r;
    r.interval = static_cast<Index>(k);
    if (generated && k < generated->truth.size()) r.truth = generated->truth[k];
    r.verdict = rep.verdicts[k];
    r.frame_start = rep.frame_starts[k];
    if (r.frame_start) r.peak_index = *r.frame_start + offset;
    r.peak_value = rep.interval_peaks[k];
    rows.push_back(r);
  }
  return rows;
}

ComplexBuffer load_stream(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open stream file " + path);
  std::vector<std::complex<double>> v;
  std::string line;
  int line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double re = 0, im = 0;
    if (!(ls >> re >> im)) throw std::runtime_error(path + " line " + std::to_string(line_no) + ": expected 're im'");
    v.emplace_back(re, im);
  }
  if (v.empty()) throw std::runtime_error(path + ": stream is empty");
  return Eigen::Map<const ComplexBuffer>(v.data(), static_cast<Index>(v.size()));
}

namespace {

void emit_common(const ExperimentSpec& spec, std::ostream& out) {
  out << "# experiment=" << to_string(spec.kind) << " seed=" << spec.seed << " taps=" << spec.channel_taps
      << " fading=" << (spec.fading ? "true" : "false") << '\n';
}

const char* hyp(Hypothesis h) { return h == Hypothesis::H1 ? "H1" : "H0"; }

}  // namespace

void emit_csv(const std::vector<BerRecord>& rows, const ExperimentSpec& spec, std::ostream& out) {
  emit_common(spec, out);
  out << "# snr_db is Eb/N0 in dB; per-sample SNR gamma = Eb/N0 * " << info_bits_per_block(spec) << " info bits / "
      << spec.system.block_len() << " samples; noise variance 1/gamma against unit data power\n"
      << "# coded=" << (spec.coded ? "true" : "false") << " sync="
      << (spec.oracle_sync ? std::string("oracle") : "detected delta=" + fmt("%.6g", spec.sync_delta))
      << " cir_taps=" << (spec.cir_taps > 0 ? spec.cir_taps : spec.system.n_zp) << '\n'
      << "# stopping rule: per SNR point, batches of " << spec.batch_frames
      << " frames until last-iteration bit errors >= " << spec.min_errors << " and frames >= " << spec.min_frames
      << ", or the cap of " << spec.frames << " frames\n"
      << kBerCsvHeader << '\n';
  for (const BerRecord& r : rows)
    out << fmt("%.6g", r.snr_db) << ',' << r.estimator << ',' << r.equalizer << ',' << r.iteration << ','
        << fmt("%.6g", r.boost_db) << ',' << r.taps << ',' << r.bit_errors << ',' << r.bits_total << ','
        << fmt("%.9e", r.ber) << '\n';
}

void emit_csv(const std::vector<ThresholdRecord>& rows, const ExperimentSpec& spec, std::ostream& out) {
  emit_common(spec, out);
  out << "# data_frames=" << spec.data_frames << " noise_frames=" << spec.noise_frames
      << " sync_snr_db=" << fmt("%.6g", spec.sync_snr_db) << "; threshold is a fraction of P_zc\n"
      << "# p_d = prior-weighted correct rate, p_m = Pr{H1 | noise}, p_f = Pr{H0 | data}\n"
      << kThresholdCsvHeader << '\n';
  for (const ThresholdRecord& r : rows)
    out << fmt("%.6g", r.boost_db) << ',' << fmt("%.6g", r.threshold) << ',' << fmt("%.6f", r.score.p_d) << ','
        << fmt("%.6f", r.score.p_m) << ',' << fmt("%.6f", r.score.p_f) << ',' << fmt("%.6f", r.score.detection_rate)
        << ',' << fmt("%.6f", r.score.false_alarm_rate) << ',' << r.score.data_intervals << ','
        << r.score.noise_intervals << '\n';
}

void emit_csv(const std::vector<StreamInterval>& rows, const ExperimentSpec& spec, std::ostream& out) {
  emit_common(spec, out);
  out << "# boost_db=" << fmt("%.6g", spec.boost_db) << " delta=" << fmt("%.6g", spec.sync_delta) << '\n'
      << kStreamCsvHeader << '\n';
  for (const StreamInterval& r : rows) {
    out << r.interval << ',' << (r.truth ? hyp(*r.truth) : "") << ',' << hyp(r.verdict) << ',';
    if (r.peak_index) out << *r.peak_index;
    out << ',' << fmt("%.6f", r.peak_value) << ',';
    if (r.frame_start) out << *r.frame_start;
    out << '\n';
  }
}

void emit_csv(const std::vector<BerRecord>& rows, const ExperimentSpec& spec, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  emit_csv(rows, spec, f);
}

}  // namespace tibwb
