#include "stdkit/labels.hpp"

#include <fstream>

#include <json.hpp>

#include "stdkit/error.hpp"

namespace stdkit {

namespace {

nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<TransitionSegment> parse_segments(const nlohmann::json& arr,
                                              const std::filesystem::path& path) {
  if (!arr.is_array()) throw ParseError("expected a segment array in " + path.string());
  std::vector<TransitionSegment> out;
  out.reserve(arr.size());
  for (const auto& item : arr) {
    if (!item.is_object() || !item.contains("start") || !item.contains("end")) {
      throw ParseError("segment entries need start/end in " + path.string());
    }
    TransitionSegment seg;
    seg.start_s = item.at("start").get<double>();
    seg.end_s = item.at("end").get<double>();
    if (item.contains("type")) seg.type = item.at("type").get<std::string>();
    out.push_back(std::move(seg));
  }
  return out;
}

}  // namespace

void save_label_file(const LabelFile& labels, const std::filesystem::path& path) {
  nlohmann::json transitions = nlohmann::json::array();
  for (const TransitionSegment& t : labels.transitions) {
    transitions.push_back({{"start", t.start_s}, {"end", t.end_s}, {"type", t.type}});
  }
  const nlohmann::json j = {{"video", labels.video},
                            {"fps", {labels.fps.num, labels.fps.den}},
                            {"duration_s", labels.duration_s},
                            {"transitions", transitions}};
  write_json(j, path);
}

LabelFile load_label_file(const std::filesystem::path& path) {
  const nlohmann::json j = load_json(path);
  if (!j.is_object() || !j.contains("transitions")) {
    throw ParseError("not a label file: " + path.string());
  }
  LabelFile out;
  out.video = j.value("video", std::string{});
  if (j.contains("fps")) {
    const auto& fps = j.at("fps");
    if (!fps.is_array() || fps.size() != 2) throw ParseError("fps must be [num, den]");
    out.fps = {fps[0].get<std::uint32_t>(), fps[1].get<std::uint32_t>()};
  }
  out.duration_s = j.value("duration_s", 0.0);
  out.transitions = parse_segments(j.at("transitions"), path);
  return out;
}

void save_prediction_file(const PredictionFile& preds, const std::filesystem::path& path) {
  nlohmann::json segments = nlohmann::json::array();
  for (const TransitionSegment& t : preds.segments) {
    segments.push_back({{"start", t.start_s}, {"end", t.end_s}});
  }
  const nlohmann::json j = {{"wall_time_s", preds.wall_time_s}, {"segments", segments}};
  write_json(j, path);
}

PredictionFile load_prediction_file(const std::filesystem::path& path) {
  const nlohmann::json j = load_json(path);
  PredictionFile out;
  if (j.is_array()) {
    out.segments = parse_segments(j, path);
    return out;
  }
  if (!j.is_object() || !j.contains("segments")) {
    throw ParseError("not a prediction file: " + path.string());
  }
  out.wall_time_s = j.value("wall_time_s", 0.0);
  out.segments = parse_segments(j.at("segments"), path);
  return out;
}

}  // namespace stdkit
