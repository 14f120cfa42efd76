#pragma once

#include <string>

namespace stdkit {

// A temporal transition span in seconds. Abrupt cuts have start_s == end_s.
// `type` carries the effect identifier when the producer knows it (synthesis
// labels, oracle detections); heuristic detectors leave it empty.
struct TransitionSegment {
  double start_s = 0.0;
  double end_s = 0.0;
  std::string type;

  bool operator==(const TransitionSegment&) const = default;
};

using TransitionLabel = TransitionSegment;

inline double segment_duration(const TransitionSegment& s) { return s.end_s - s.start_s; }

}  // namespace stdkit
