// Acceptance suite: runs the ten release criteria end to end and prints one
// pass/fail line each. Exits nonzero if any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "stdkit/bench.hpp"
#include "stdkit/detect.hpp"
#include "stdkit/flow.hpp"
#include "stdkit/metrics.hpp"
#include "stdkit/rng.hpp"
#include "stdkit/synth.hpp"
#include "stdkit/video.hpp"
#include "stdkit/window.hpp"
#include "support/corpus.hpp"
#include "support/oracles.hpp"

using namespace stdkit;
using namespace stdkit::testsupport;

namespace {

constexpr std::uint64_t kCorpusSeed = 20250810;
constexpr int kCorpusSize = 100;

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
  std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": " << name;
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << std::endl;
  if (!pass) ++g_failures;
}

std::uint64_t frame_hash(const Frame& f) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const std::uint8_t b : f.pixels) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

// --- criterion 1: metric formula fidelity on the hand-worked case ---
void criterion_1() {
  const std::vector<TransitionSegment> gts = {{4.0, 4.0, "cut"}};
  const DetectionResult preds{{{3.9, 4.2, ""}}, 0.0};
  const MetricsReport rep = evaluate(preds, gts, {25, 1}, 10.0);
  bool pass = false;
  std::ostringstream detail;
  for (const TauMetrics& row : rep.rows) {
    if (row.tau == 0.1) {
      const auto abe_v = row.abe();
      pass = abe_v.has_value() && std::abs(*abe_v - 0.15) <= 1e-12 && row.seg().f1 == 1.0;
      detail << "abe=" << (abe_v ? *abe_v : -1.0) << " segF1=" << row.seg().f1;
    }
  }
  report(1, "metric formula fidelity", pass, detail.str());
}

// --- criterion 2: greedy matching equals the brute-force reimplementation ---
void criterion_2() {
  Timer timer;
  Rng rng(424242);
  int mismatches = 0;
  const int instances = 10000;
  for (int trial = 0; trial < instances; ++trial) {
    const auto preds_raw = random_lattice_segments(rng, 5, 60.0);
    const auto gts_raw = random_lattice_segments(rng, 5, 60.0);
    const double tau = 0.1 * static_cast<double>(rng.next_below(6));
    const auto preds = prepare_segments(preds_raw, tau, 60.0);
    const auto gts = prepare_segments(gts_raw, tau, 60.0);
    const MatchSet a = sorted_pairs(greedy_match(preds, gts));
    const MatchSet b = sorted_pairs(brute_force_match(preds, gts));
    bool same = a.pairs.size() == b.pairs.size() && a.unmatched_preds == b.unmatched_preds &&
                a.unmatched_gts == b.unmatched_gts;
    for (std::size_t i = 0; same && i < a.pairs.size(); ++i) {
      same = a.pairs[i].pred == b.pairs[i].pred && a.pairs[i].gt == b.pairs[i].gt;
    }
    if (!same) ++mismatches;
  }
  std::ostringstream detail;
  detail << instances << " instances, " << mismatches << " mismatches, " << timer.seconds()
         << "s";
  report(2, "greedy-matching oracle equivalence", mismatches == 0 && timer.seconds() < 30.0,
         detail.str());
}

// --- criterion 3: zero-pad equivalence as exact tensor equality ---
void criterion_3() {
  Timer timer;
  Rng rng(7331);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int dk = static_cast<int>(rng.next_int(1, 3));
    const int hk = static_cast<int>(rng.next_int(1, 3));
    const int wk = static_cast<int>(rng.next_int(1, 3));
    const int out_c = static_cast<int>(rng.next_int(1, 4));
    const int t = dk * static_cast<int>(rng.next_int(1, 3));
    const int h = hk * static_cast<int>(rng.next_int(1, 4));
    const int w = wk * static_cast<int>(rng.next_int(1, 4));

    EmbedKernel k3;
    k3.out_channels = out_c;
    k3.in_channels = 3;
    k3.depth = dk;
    k3.height = hk;
    k3.width = wk;
    k3.weights.resize(static_cast<std::size_t>(out_c) * 3 * dk * hk * wk);
    for (double& v : k3.weights) v = rng.next_range(-1.0, 1.0);

    std::vector<Frame> color;
    std::vector<Frame> viz;
    for (int i = 0; i < t; ++i) {
      Frame cf(w, h);
      Frame vf(w, h);
      for (std::size_t k = 0; k < cf.pixels.size(); ++k) {
        cf.pixels[k] = static_cast<std::uint8_t>(rng.next_below(256));
        vf.pixels[k] = static_cast<std::uint8_t>(rng.next_below(256));
      }
      color.push_back(std::move(cf));
      viz.push_back(std::move(vf));
    }
    std::vector<FusedFrame> fused;
    for (int i = 0; i < t; ++i) fused.push_back(fuse_channels(color[static_cast<std::size_t>(i)],
                                                              viz[static_cast<std::size_t>(i)]));

    const TokenGrid plain = patch_embed(volume_from_frames(color), k3);
    const TokenGrid padded = patch_embed(volume_from_fused(fused), extend_kernel_zero_pad(k3));
    if (plain.values.size() != padded.values.size()) {
      worst = 1.0;
      break;
    }
    for (std::size_t i = 0; i < plain.values.size(); ++i) {
      worst = std::max(worst, std::abs(plain.values[i] - padded.values[i]));
    }
  }
  std::ostringstream detail;
  detail << "max abs diff " << worst << ", " << timer.seconds() << "s";
  report(3, "zero-pad equivalence", worst == 0.0 && timer.seconds() < 10.0, detail.str());
}

// --- criteria 4/5/6/10 share the 100-video corpus ---
struct CorpusRun {
  std::vector<CorpusVideo> videos;
};

void criterion_4(const CorpusRun& corpus) {
  Timer timer;
  std::set<std::string> effects_seen;
  long long outside_frames = 0;
  long long impure = 0;
  bool labels_ok = true;
  for (const CorpusVideo& video : corpus.videos) {
    for (const EffectSpec& spec : video.plan.specs) effects_seen.insert(spec.effect);
    std::set<std::uint64_t> shot_hashes;
    for (const VideoClip& shot : video.shots) {
      for (const Frame& f : shot.frames) shot_hashes.insert(frame_hash(f));
    }
    for (const TransitionSegment& label : video.labels) {
      labels_ok = labels_ok && label.start_s <= label.end_s;
      if (label.type == "cut") labels_ok = labels_ok && label.start_s == label.end_s;
    }
    for (std::size_t k = 0; k < video.clip.frames.size(); ++k) {
      const double t = video.clip.frame_time(static_cast<std::int64_t>(k));
      bool inside = false;
      for (const TransitionSegment& label : video.labels) {
        if (t >= label.start_s && t <= label.end_s) {
          inside = true;
          break;
        }
      }
      if (!inside) {
        ++outside_frames;
        if (!shot_hashes.contains(frame_hash(video.clip.frames[k]))) ++impure;
      }
    }
  }
  std::ostringstream detail;
  detail << corpus.videos.size() << " videos, " << effects_seen.size() << "/59 effects, "
         << outside_frames << " outside frames, " << impure << " impure, " << timer.seconds()
         << "s";
  report(4, "synthesis label purity",
         effects_seen.size() == 59 && impure == 0 && labels_ok && timer.seconds() < 300.0,
         detail.str());
}

void criterion_5(const CorpusRun& corpus) {
  Timer timer;
  MetricsReport aggregate;
  bool per_video_perfect = true;
  for (const CorpusVideo& video : corpus.videos) {
    DetectorOptions det;
    det.name = "oracle";
    det.seed = 77;
    const DetectionResult preds =
        run_pipeline(video.clip, make_window_detector(det, video.labels), {});
    const MetricsReport rep =
        evaluate(preds, video.labels, video.clip.fps, video.clip.duration_s());
    for (const TauMetrics& row : rep.rows) {
      const bool ok = row.seg().f1 == 1.0 && row.frame().f1 == 1.0 && row.abe().has_value() &&
                      *row.abe() <= 1e-12;
      per_video_perfect = per_video_perfect && ok;
    }
    aggregate.add(rep);
  }
  bool agg_ok = true;
  for (const TauMetrics& row : aggregate.rows) {
    agg_ok = agg_ok && row.seg().f1 == 1.0 && row.frame().f1 == 1.0 &&
             row.abe().value_or(1.0) <= 1e-12;
  }
  std::ostringstream detail;
  detail << "mean segF1 " << aggregate.seg_mean().f1 << ", mean frameF1 "
         << aggregate.frame_mean().f1 << ", " << timer.seconds() << "s";
  report(5, "oracle closed loop through the sliding-window pipeline",
         per_video_perfect && agg_ok && timer.seconds() < 120.0, detail.str());
}

void criterion_6(const CorpusRun& corpus) {
  Timer timer;
  MetricsReport aggregate;
  bool per_video_monotone = true;
  int video_index = 0;
  for (const CorpusVideo& video : corpus.videos) {
    const DetectionResult preds =
        oracle_detector(video.labels, 0.3, 0.0,
                        mix_seed(909, static_cast<std::uint64_t>(video_index++)),
                        video.clip.duration_s());
    const MetricsReport rep =
        evaluate(preds, video.labels, video.clip.fps, video.clip.duration_s());
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
      if (rep.rows[i].seg().f1 < rep.rows[i - 1].seg().f1 - 1e-12) per_video_monotone = false;
    }
    aggregate.add(rep);
  }
  bool agg_monotone = true;
  std::ostringstream curve;
  for (std::size_t i = 0; i < aggregate.rows.size(); ++i) {
    curve << (i ? " " : "") << aggregate.rows[i].seg().f1;
    if (i > 0 && aggregate.rows[i].seg().f1 < aggregate.rows[i - 1].seg().f1 - 1e-12) {
      agg_monotone = false;
    }
  }
  std::ostringstream detail;
  detail << "F1 over tau: " << curve.str() << ", " << timer.seconds() << "s";
  report(6, "tolerance monotonicity under 0.3s jitter",
         per_video_monotone && agg_monotone && timer.seconds() < 120.0, detail.str());
}

void criterion_7() {
  Timer timer;
  CorpusOptions opt;
  opt.min_shot_s = 2.6;
  opt.max_shot_s = 8.0;
  opt.cut_fraction = 0.3;
  opt.long_fraction = 0.75;
  MetricsReport aggregate;
  long long long_total = 0;
  long long all_total = 0;
  for (int v = 0; v < 40; ++v) {
    const CorpusVideo video = make_corpus_video(kCorpusSeed + 1, v, opt);
    for (const TransitionSegment& label : video.labels) {
      ++all_total;
      if (categorize(label) == TransitionCategory::Long) ++long_total;
    }
    DetectorOptions det;
    det.name = "content";
    const DetectionResult preds =
        run_pipeline(video.clip, make_window_detector(det, {}), {});
    aggregate.add(evaluate(preds, video.labels, video.clip.fps, video.clip.duration_s()));
  }
  double cut_recall = 0;
  double long_frame_f1 = 0;
  for (const TauMetrics& row : aggregate.rows) {
    cut_recall += row.category_recall(TransitionCategory::Cut);
    long_frame_f1 += row.category_frame(TransitionCategory::Long).f1;
  }
  cut_recall /= static_cast<double>(aggregate.rows.size());
  long_frame_f1 /= static_cast<double>(aggregate.rows.size());
  const double long_share = static_cast<double>(long_total) / static_cast<double>(all_total);
  std::ostringstream detail;
  detail << "long share " << long_share << ", cut recall " << cut_recall << ", long frame F1 "
         << long_frame_f1 << ", " << timer.seconds() << "s";
  report(7, "directional baseline replication (content detector)",
         long_share >= 0.5 && cut_recall >= 0.7 && long_frame_f1 <= 0.35 &&
             timer.seconds() < 300.0,
         detail.str());
}

void criterion_8() {
  Timer timer;
  std::vector<DatasetManifest> manifests;
  const auto make = [](const std::string& name, QualityTier tier) {
    DatasetManifest m;
    m.name = name;
    m.quality = tier;
    m.entries.push_back({name + ".stdv", name + ".json", {25, 1}});
    return m;
  };
  manifests.push_back(make("vh", QualityTier::VeryHigh));
  manifests.push_back(make("hi", QualityTier::High));
  manifests.push_back(make("md", QualityTier::Medium));
  QualityWeightedSampler sampler(manifests, {}, 55);
  std::array<long long, 3> counts{};
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    counts[static_cast<std::size_t>(sampler.tier_of(sampler.next().manifest))]++;
  }
  const std::array<double, 3> probs = {0.7, 0.2, 0.1};
  bool pass = true;
  std::ostringstream detail;
  for (std::size_t t = 0; t < 3; ++t) {
    const double freq = static_cast<double>(counts[t]) / n;
    const double sigma = std::sqrt(probs[t] * (1 - probs[t]) / n);
    pass = pass && std::abs(freq - probs[t]) <= 3.0 * sigma;
    detail << (t ? " " : "") << freq;
  }
  detail << ", " << timer.seconds() << "s";
  report(8, "sampler tier marginals (0.7/0.2/0.1)", pass && timer.seconds() < 5.0, detail.str());
}

void criterion_9() {
  Timer timer;
  // a cut in the overlap of windows [0,10] and [9,19]
  const VideoClip a = make_shot(611, 238, 24, 16, {25, 1});  // ends at 9.52 s
  const VideoClip b = make_shot(612, 462, 24, 16, {25, 1});
  SynthPlan plan;
  plan.specs.push_back({"cut", 0.0, 1, Easing::linear});
  const SynthResult synth = synthesize({a, b}, plan);
  DetectorOptions det;
  det.name = "oracle";
  det.seed = 5;
  const DetectionResult res =
      run_pipeline(synth.clip, make_window_detector(det, synth.labels), {});
  const bool once = res.segments.size() == 1 && res.segments[0].start_s == 9.52 &&
                    res.segments[0].end_s == 9.52;

  // idempotence on random candidate sets
  Rng rng(3131);
  bool idempotent = true;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<NmsCandidate> candidates;
    const int n = static_cast<int>(rng.next_below(8));
    for (int i = 0; i < n; ++i) {
      const double ws = rng.next_range(0.0, 30.0);
      const double we = ws + 10.0;
      const double s = rng.next_range(ws, we);
      const double e = std::min(we, s + rng.next_range(0.0, 3.0));
      candidates.push_back({{s, e, ""}, ws, we});
    }
    const auto once_out = temporal_nms(candidates, 0.5);
    std::vector<NmsCandidate> again;
    for (const TransitionSegment& seg : once_out) {
      again.push_back({seg, seg.start_s - 1.0, seg.end_s + 1.0});
    }
    if (temporal_nms(again, 0.5) != once_out) idempotent = false;
  }
  std::ostringstream detail;
  detail << "overlap cut reported " << res.segments.size() << "x, idempotent="
         << (idempotent ? "yes" : "no") << ", " << timer.seconds() << "s";
  report(9, "NMS duplicate suppression and idempotence",
         once && idempotent && timer.seconds() < 10.0, detail.str());
}

void criterion_10(const CorpusRun& corpus) {
  Timer timer;
  double inference = 0;
  double duration = 0;
  MetricsReport aggregate;
  for (const CorpusVideo& video : corpus.videos) {
    DetectorOptions det;
    det.name = "content";
    const DetectionResult preds =
        run_pipeline(video.clip, make_window_detector(det, {}), {});
    aggregate.add(evaluate(preds, video.labels, video.clip.fps, video.clip.duration_s()));
    inference += preds.wall_time_s;
    duration += video.clip.duration_s();
  }
  const double factor = rtf(inference, duration);
  std::ostringstream detail;
  detail << "RTF " << factor << " over " << duration << "s of video, wall " << timer.seconds()
         << "s";
  report(10, "pipeline real-time factor below 1.0", factor < 1.0, detail.str());
}

}  // namespace

int main() {
  std::cout << "stdkit acceptance suite" << std::endl;
  criterion_1();
  criterion_2();
  criterion_3();

  CorpusRun corpus;
  corpus.videos.reserve(kCorpusSize);
  for (int v = 0; v < kCorpusSize; ++v) {
    corpus.videos.push_back(make_corpus_video(kCorpusSeed, v, {}));
  }

  criterion_4(corpus);
  criterion_5(corpus);
  criterion_6(corpus);
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10(corpus);

  if (g_failures == 0) {
    std::cout << "all criteria passed" << std::endl;
    return 0;
  }
  std::cout << g_failures << " criteria failed" << std::endl;
  return 1;
}
