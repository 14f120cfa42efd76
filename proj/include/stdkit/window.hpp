#pragma once

#include <functional>
#include <vector>

#include "stdkit/detect.hpp"
#include "stdkit/segment.hpp"
#include "stdkit/video.hpp"

namespace stdkit {

struct Window {
  int index = 0;
  double global_start_s = 0.0;
  double global_end_s = 0.0;
  bool is_last = false;

  double length_s() const { return global_end_s - global_start_s; }
};

// Window k covers [k*stride, min(k*stride + size, duration)]; generation stops
// once a window's end reaches the duration, so every instant is covered and
// the final window is never empty.
std::vector<Window> make_windows(double duration_s, double window_s, double stride_s);

struct Projection {
  std::vector<TransitionSegment> segments;
  int clamped = 0;  // local segments that exceeded the window and were clamped
};

// Shifts window-local segments onto the global timeline, clamping them to the
// window bounds first.
Projection project_to_global(const Window& window, const std::vector<TransitionSegment>& local);

// A projected segment together with the window that produced it; NMS ranks
// candidates by how far their midpoint sits from the window edges.
struct NmsCandidate {
  TransitionSegment segment;
  double window_start_s = 0.0;
  double window_end_s = 0.0;
};

// Accepts candidates in order of descending interiority while their IoU
// against everything accepted stays below the threshold, then union-merges
// accepted segments that still overlap. Output is sorted and non-overlapping.
std::vector<TransitionSegment> temporal_nms(std::vector<NmsCandidate> candidates,
                                            double iou_threshold);

// Temporal IoU with a degenerate-segment convention: two identical
// zero-length segments count as duplicates (IoU 1), disjoint closed intervals
// as 0.
double segment_iou(const TransitionSegment& a, const TransitionSegment& b);

// Per-window detector: receives the extracted window clip and the window
// descriptor, returns window-local segments.
using WindowDetectorFn =
    std::function<std::vector<TransitionSegment>(const VideoClip&, const Window&)>;

struct PipelineOptions {
  double window_s = 10.0;
  double stride_s = 9.0;
  double nms_iou = 0.5;
  double min_gap_s = 0.0;  // optional post-merge of near-adjacent outputs
  std::function<void(const std::string&)> trace;  // JSON line per window when set
};

// make_windows -> per-window detect -> project -> temporal_nms. Wall time sums
// the detector invocations only; window extraction is excluded.
DetectionResult run_pipeline(const VideoClip& clip, const WindowDetectorFn& detector,
                             const PipelineOptions& options = {});

// Frames of `clip` whose timestamps fall in [window.start, window.end).
VideoClip extract_window_clip(const VideoClip& clip, const Window& window);

}  // namespace stdkit
