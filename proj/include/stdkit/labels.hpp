#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "stdkit/segment.hpp"
#include "stdkit/video.hpp"

namespace stdkit {

// On-disk ground-truth record:
// {"video": str, "fps": [num, den], "duration_s": num,
//  "transitions": [{"start": s, "end": e, "type": str}, ...]}
struct LabelFile {
  std::string video;
  Fps fps;
  double duration_s = 0.0;
  std::vector<TransitionSegment> transitions;
};

void save_label_file(const LabelFile& labels, const std::filesystem::path& path);
LabelFile load_label_file(const std::filesystem::path& path);

// Prediction record: {"wall_time_s": num, "segments": [{"start", "end"}, ...]}.
// A bare JSON array of segments is accepted on load (wall time 0).
struct PredictionFile {
  double wall_time_s = 0.0;
  std::vector<TransitionSegment> segments;
};

void save_prediction_file(const PredictionFile& preds, const std::filesystem::path& path);
PredictionFile load_prediction_file(const std::filesystem::path& path);

}  // namespace stdkit
