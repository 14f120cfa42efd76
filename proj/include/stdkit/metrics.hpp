#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stdkit/detect.hpp"
#include "stdkit/segment.hpp"
#include "stdkit/video.hpp"

namespace stdkit {

enum class TransitionCategory { Cut, Normal, Long };

// Duration rule: Cut < 0.1s, Normal <= 1s, Long > 1s.
TransitionCategory categorize(const TransitionSegment& label);
const char* category_name(TransitionCategory c);

// Symmetric boundary expansion by tau, clamped into [0, duration].
TransitionSegment expand(const TransitionSegment& seg, double tau_s, double duration_s);

// A segment ready for matching: the expanded extent, the unexpanded extent of
// its constituents (for boundary errors), and the original indices it covers
// (expansion can make neighbours overlap, in which case they are unioned).
struct EvalSegment {
  double start_s = 0.0;
  double end_s = 0.0;
  double orig_start_s = 0.0;
  double orig_end_s = 0.0;
  std::vector<int> members;
};

std::vector<EvalSegment> prepare_segments(const std::vector<TransitionSegment>& segments,
                                          double tau_s, double duration_s);

struct MatchedPair {
  int pred = -1;
  int gt = -1;
  double intersection_s = 0.0;
};

struct MatchSet {
  std::vector<MatchedPair> pairs;
  std::vector<int> unmatched_preds;
  std::vector<int> unmatched_gts;
};

// One-to-one greedy matching over pairs with positive temporal intersection,
// largest intersection first (ties: earlier ground-truth start, then earlier
// prediction start). A zero-length segment whose point lies inside the other
// segment's closed interval is also admissible; without that convention an
// exactly reproduced cut could never match its own label at tau = 0.
MatchSet greedy_match(const std::vector<EvalSegment>& preds, const std::vector<EvalSegment>& gts);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

Prf prf_from_counts(long long tp, long long fp, long long fn);
Prf segment_prf(const MatchSet& match);

// Frame index interval of a segment: round(start*fps) .. round(end*fps), inclusive.
struct FrameSpan {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};
FrameSpan frame_span(double start_s, double end_s, Fps fps);

struct FrameCounts {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
};

// Frame-level TP is the union of per-pair frame intersections; FP and FN are
// the prediction/ground-truth frame unions minus TP.
FrameCounts frame_counts(const MatchSet& match, const std::vector<EvalSegment>& preds,
                         const std::vector<EvalSegment>& gts, Fps fps);

// Mean absolute boundary offset over matched pairs, computed on unexpanded
// boundaries; absent when nothing matched.
std::optional<double> abe(const MatchSet& match, const std::vector<EvalSegment>& preds,
                          const std::vector<EvalSegment>& gts);

// Real-time factor: inference time over video time; < 1 is faster than real time.
double rtf(double inference_s, double video_s);

// Raw counts for one tolerance value; additive across videos (micro-averaging).
struct TauMetrics {
  double tau = 0.0;
  long long seg_tp = 0, seg_fp = 0, seg_fn = 0;
  long long frame_tp = 0, frame_fp = 0, frame_fn = 0;
  double abe_abs_sum = 0.0;     // sum of |boundary offsets| over matched pairs
  long long abe_boundaries = 0;  // 2 * matched pairs
  std::array<long long, 3> cat_matched{};  // per TransitionCategory
  std::array<long long, 3> cat_total{};
  std::array<FrameCounts, 3> cat_frames{};  // predictions vs that category only

  Prf seg() const { return prf_from_counts(seg_tp, seg_fp, seg_fn); }
  Prf frame() const { return prf_from_counts(frame_tp, frame_fp, frame_fn); }
  std::optional<double> abe() const;
  double category_recall(TransitionCategory c) const;
  Prf category_frame(TransitionCategory c) const;
  void add(const TauMetrics& other);
};

struct MetricsReport {
  std::vector<TauMetrics> rows;  // one per tau, ascending
  double inference_s = 0.0;
  double video_s = 0.0;

  double rtf() const;
  Prf seg_mean() const;
  Prf frame_mean() const;
  std::optional<double> abe_mean() const;  // over rows where ABE is defined
  void add(const MetricsReport& other);    // micro-aggregation across videos
};

const std::vector<double>& default_tau_grid();  // 0.0 .. 0.5 step 0.1

MetricsReport evaluate(const DetectionResult& preds, const std::vector<TransitionSegment>& labels,
                       Fps fps, double duration_s,
                       const std::vector<double>& tau_grid = default_tau_grid());

// CSV rows (one per tau plus a mean row) and a human-readable table.
std::string report_csv(const MetricsReport& report, const std::string& video,
                       const std::string& dataset, bool with_header);
std::string report_table(const MetricsReport& report, const std::string& title);

}  // namespace stdkit
