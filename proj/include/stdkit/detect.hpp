#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "stdkit/segment.hpp"
#include "stdkit/video.hpp"

namespace stdkit {

// Frame-wise boundary probabilities, one score per frame, plus the threshold
// that turns them into boundary frames.
struct FramePointScores {
  std::vector<double> scores;
  double threshold = 0.5;
};

struct DetectionResult {
  std::vector<TransitionSegment> segments;  // sorted, non-overlapping
  double wall_time_s = 0.0;
};

// Mean absolute per-channel difference to the previous frame, scaled to [0, 1].
// score[0] is 0.
FramePointScores content_detector(const VideoClip& clip, double threshold);

// Total-variation distance between normalized luminance histograms of adjacent
// frames (0.5 * L1), in [0, 1]. score[0] is 0.
FramePointScores hist_detector(const VideoClip& clip, int bins, double threshold);

// Content score minus its rolling mean over +-radius neighbours (the frame
// itself excluded), clamped to [0, 1]; fires on local spikes rather than on
// globally busy footage.
FramePointScores adaptive_detector(const VideoClip& clip, double threshold, int radius = 8);

// Absolute change of the frame-mean luminance, scaled to [0, 1]; a fade-style
// baseline that reacts to global brightness ramps. score[0] is 0.
FramePointScores luminance_detector(const VideoClip& clip, double threshold);

// Frames with score >= threshold are boundary frames; each maximal run
// [i..j] becomes the segment [time(i-1), time(j)], clamped to 0 when i == 0.
std::vector<TransitionSegment> points_to_segments(const FramePointScores& points, Fps fps);

// Ground truth perturbed for harness calibration: every boundary moves by
// U(-jitter_s, +jitter_s) clamped into [0, duration] (start/end reordered if
// the jitter crosses them), and whole segments drop with probability
// drop_prob. Deterministic in seed.
DetectionResult oracle_detector(const std::vector<TransitionSegment>& labels, double jitter_s,
                                double drop_prob, std::uint64_t seed, double duration_s);

// Merges adjacent segments closer than min_gap_s; a no-op when min_gap_s <= 0.
std::vector<TransitionSegment> merge_close_segments(std::vector<TransitionSegment> segments,
                                                    double min_gap_s);

struct ExternalCommand {
  std::vector<std::string> argv;  // program followed by fixed arguments
};

// Runs `argv... <clip>` and parses a JSON array of {"start", "end"} objects
// (window-local seconds) from its standard output. Wall time is measured
// around the invocation.
DetectionResult run_external_detector(const ExternalCommand& command,
                                      const std::filesystem::path& clip_path, double timeout_s);

}  // namespace stdkit
