#include "stdkit/window.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "stdkit/error.hpp"

namespace stdkit {

std::vector<Window> make_windows(double duration_s, double window_s, double stride_s) {
  if (window_s <= 0) throw PreconditionError("window size must be positive");
  if (stride_s <= 0) throw PreconditionError("stride must be positive");
  if (stride_s > window_s) {
    throw PreconditionError("stride must not exceed the window size (gaps)");
  }
  if (duration_s <= 0) throw PreconditionError("duration must be positive");

  std::vector<Window> windows;
  for (int k = 0;; ++k) {
    Window win;
    win.index = k;
    win.global_start_s = k * stride_s;
    win.global_end_s = std::min(win.global_start_s + window_s, duration_s);
    windows.push_back(win);
    if (win.global_end_s >= duration_s) break;
  }
  windows.back().is_last = true;
  return windows;
}

Projection project_to_global(const Window& window, const std::vector<TransitionSegment>& local) {
  Projection out;
  out.segments.reserve(local.size());
  const double len = window.length_s();
  for (TransitionSegment seg : local) {
    const double orig_start = seg.start_s;
    const double orig_end = seg.end_s;
    seg.start_s = std::clamp(seg.start_s, 0.0, len);
    seg.end_s = std::clamp(seg.end_s, 0.0, len);
    if (seg.start_s != orig_start || seg.end_s != orig_end) ++out.clamped;
    seg.start_s += window.global_start_s;
    seg.end_s += window.global_start_s;
    out.segments.push_back(std::move(seg));
  }
  return out;
}

double segment_iou(const TransitionSegment& a, const TransitionSegment& b) {
  const double inter = std::min(a.end_s, b.end_s) - std::max(a.start_s, b.start_s);
  if (inter > 0) {
    const double uni = (a.end_s - a.start_s) + (b.end_s - b.start_s) - inter;
    return uni > 0 ? inter / uni : 1.0;
  }
  // Degenerate duplicates: identical points from two windows must suppress.
  if (a.start_s == a.end_s && b.start_s == b.end_s && a.start_s == b.start_s) return 1.0;
  return 0.0;
}

std::vector<TransitionSegment> temporal_nms(std::vector<NmsCandidate> candidates,
                                            double iou_threshold) {
  const auto interiority = [](const NmsCandidate& c) {
    const double mid = 0.5 * (c.segment.start_s + c.segment.end_s);
    return std::min(mid - c.window_start_s, c.window_end_s - mid);
  };
  std::sort(candidates.begin(), candidates.end(),
            [&](const NmsCandidate& a, const NmsCandidate& b) {
              const double ia = interiority(a);
              const double ib = interiority(b);
              if (ia != ib) return ia > ib;
              if (a.segment.start_s != b.segment.start_s) {
                return a.segment.start_s < b.segment.start_s;
              }
              if (a.segment.end_s != b.segment.end_s) return a.segment.end_s < b.segment.end_s;
              return a.window_start_s < b.window_start_s;
            });

  std::vector<TransitionSegment> accepted;
  for (const NmsCandidate& cand : candidates) {
    bool keep = true;
    for (const TransitionSegment& acc : accepted) {
      if (segment_iou(cand.segment, acc) >= iou_threshold) {
        keep = false;
        break;
      }
    }
    if (keep) accepted.push_back(cand.segment);
  }

  std::sort(accepted.begin(), accepted.end(), [](const auto& a, const auto& b) {
    return a.start_s != b.start_s ? a.start_s < b.start_s : a.end_s < b.end_s;
  });

  // Survivors with a strictly positive overlap are fragments of one transition
  // (typically a window-seam straddler); union them into a single span.
  std::vector<TransitionSegment> merged;
  for (const TransitionSegment& seg : accepted) {
    if (!merged.empty() && seg.start_s < merged.back().end_s) {
      merged.back().end_s = std::max(merged.back().end_s, seg.end_s);
    } else {
      merged.push_back(seg);
    }
  }
  return merged;
}

VideoClip extract_window_clip(const VideoClip& clip, const Window& window) {
  const double hz = clip.fps.hz();
  const auto first =
      static_cast<std::int64_t>(std::ceil(window.global_start_s * hz - 1e-9));
  auto last = static_cast<std::int64_t>(std::ceil(window.global_end_s * hz - 1e-9));  // exclusive
  last = std::min(last, static_cast<std::int64_t>(clip.frames.size()));
  VideoClip out;
  out.fps = clip.fps;
  if (first >= last) return out;
  out.frames.assign(clip.frames.begin() + static_cast<std::ptrdiff_t>(first),
                    clip.frames.begin() + static_cast<std::ptrdiff_t>(last));
  return out;
}

DetectionResult run_pipeline(const VideoClip& clip, const WindowDetectorFn& detector,
                             const PipelineOptions& options) {
  validate(clip);
  if (clip.frames.empty()) throw PreconditionError("cannot run the pipeline on an empty clip");
  const std::vector<Window> windows =
      make_windows(clip.duration_s(), options.window_s, options.stride_s);

  std::vector<NmsCandidate> candidates;
  double inference_s = 0.0;
  for (const Window& win : windows) {
    const VideoClip window_clip = extract_window_clip(clip, win);
    std::vector<TransitionSegment> local;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      local = detector(window_clip, win);
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "window " << win.index << ": " << e.what();
      throw PipelineError(msg.str());
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    inference_s += elapsed;

    const Projection projected = project_to_global(win, local);
    for (const TransitionSegment& seg : projected.segments) {
      candidates.push_back({seg, win.global_start_s, win.global_end_s});
    }
    if (options.trace) {
      nlohmann::json line = {{"event", "window"},
                             {"index", win.index},
                             {"start_s", win.global_start_s},
                             {"end_s", win.global_end_s},
                             {"segments", projected.segments.size()},
                             {"clamped", projected.clamped},
                             {"detector_s", elapsed}};
      options.trace(line.dump());
    }
  }

  DetectionResult result;
  result.segments = temporal_nms(std::move(candidates), options.nms_iou);
  result.segments = merge_close_segments(std::move(result.segments), options.min_gap_s);
  result.wall_time_s = inference_s;
  return result;
}

}  // namespace stdkit
