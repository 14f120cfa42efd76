#include "stdkit/bench.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <unistd.h>

#include <json.hpp>

#include "stdkit/error.hpp"
#include "stdkit/labels.hpp"
#include "stdkit/video.hpp"

namespace stdkit {

QualityTier tier_from_string(const std::string& s) {
  if (s == "VeryHigh") return QualityTier::VeryHigh;
  if (s == "High") return QualityTier::High;
  if (s == "Medium") return QualityTier::Medium;
  throw ParseError("unknown quality tier '" + s + "'");
}

const char* tier_name(QualityTier tier) {
  switch (tier) {
    case QualityTier::VeryHigh: return "VeryHigh";
    case QualityTier::High: return "High";
    default: return "Medium";
  }
}

double TierProbs::of(QualityTier tier) const {
  switch (tier) {
    case QualityTier::VeryHigh: return very_high;
    case QualityTier::High: return high;
    default: return medium;
  }
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("invalid JSON in " + path.string() + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("entries")) {
    throw ParseError("not a manifest: " + path.string());
  }
  DatasetManifest m;
  m.name = j.value("name", path.stem().string());
  m.domain = j.value("domain", std::string{});
  m.quality = tier_from_string(j.value("quality", std::string("Medium")));
  const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  for (const auto& item : j.at("entries")) {
    ManifestEntry e;
    std::filesystem::path video = item.at("video").get<std::string>();
    std::filesystem::path labels = item.at("labels").get<std::string>();
    e.video = video.is_absolute() ? video : base / video;
    e.labels = labels.is_absolute() ? labels : base / labels;
    if (item.contains("fps")) {
      const auto& fps = item.at("fps");
      e.fps = {fps.at(0).get<std::uint32_t>(), fps.at(1).get<std::uint32_t>()};
    }
    if (!std::filesystem::exists(e.video)) {
      throw PreconditionError("manifest video missing: " + e.video.string());
    }
    if (!std::filesystem::exists(e.labels)) {
      throw PreconditionError("manifest labels missing: " + e.labels.string());
    }
    m.entries.push_back(std::move(e));
  }
  return m;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  nlohmann::json entries = nlohmann::json::array();
  for (const ManifestEntry& e : manifest.entries) {
    entries.push_back({{"video", e.video.string()},
                       {"labels", e.labels.string()},
                       {"fps", {e.fps.num, e.fps.den}}});
  }
  const nlohmann::json j = {{"name", manifest.name},
                            {"domain", manifest.domain},
                            {"quality", tier_name(manifest.quality)},
                            {"entries", entries}};
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

QualityWeightedSampler::QualityWeightedSampler(const std::vector<DatasetManifest>& manifests,
                                               TierProbs probs, std::uint64_t seed)
    : rng_(seed) {
  if (manifests.empty()) throw PreconditionError("sampler needs at least one manifest");
  std::map<QualityTier, std::vector<int>> groups;
  for (int i = 0; i < static_cast<int>(manifests.size()); ++i) {
    const DatasetManifest& m = manifests[static_cast<std::size_t>(i)];
    if (m.entries.empty()) {
      throw PreconditionError("manifest '" + m.name + "' has no entries");
    }
    groups[m.quality].push_back(i);
    tiers_.push_back(m.quality);
    entry_counts_.push_back(m.entries.size());
  }
  double present_mass = 0.0;
  for (const auto& [tier, members] : groups) present_mass += probs.of(tier);
  if (present_mass <= 0) throw PreconditionError("tier probabilities over present tiers are zero");
  // absent tiers give up their mass; present tiers renormalize
  double acc = 0.0;
  for (const auto& [tier, members] : groups) {
    acc += probs.of(tier) / present_mass;
    cumulative_.push_back(acc);
    by_tier_.push_back(members);
  }
  cumulative_.back() = 1.0;
}

QualityWeightedSampler::Draw QualityWeightedSampler::next() {
  const double u = rng_.next_unit();
  std::size_t slot = 0;
  while (slot + 1 < cumulative_.size() && u >= cumulative_[slot]) ++slot;
  const std::vector<int>& members = by_tier_[slot];
  const int manifest = members[rng_.next_below(members.size())];
  const int entry =
      static_cast<int>(rng_.next_below(entry_counts_[static_cast<std::size_t>(manifest)]));
  return {manifest, entry};
}

WindowDetectorFn make_window_detector(const DetectorOptions& options,
                                      const std::vector<TransitionSegment>& labels) {
  const std::string name = options.name;
  // a window with fewer than two frames carries no difference evidence
  const auto empty_window = [](const VideoClip& clip) { return clip.frames.size() < 2; };
  if (name == "content") {
    const double threshold = options.content_threshold;
    return [threshold, empty_window](const VideoClip& clip, const Window&) {
      if (empty_window(clip)) return std::vector<TransitionSegment>{};
      return points_to_segments(content_detector(clip, threshold), clip.fps);
    };
  }
  if (name == "hist") {
    const double threshold = options.hist_threshold;
    const int bins = options.hist_bins;
    return [threshold, bins, empty_window](const VideoClip& clip, const Window&) {
      if (empty_window(clip)) return std::vector<TransitionSegment>{};
      return points_to_segments(hist_detector(clip, bins, threshold), clip.fps);
    };
  }
  if (name == "adaptive") {
    const double threshold = options.adaptive_threshold;
    const int radius = options.adaptive_radius;
    return [threshold, radius, empty_window](const VideoClip& clip, const Window&) {
      if (empty_window(clip)) return std::vector<TransitionSegment>{};
      return points_to_segments(adaptive_detector(clip, threshold, radius), clip.fps);
    };
  }
  if (name == "threshold") {
    const double threshold = options.luma_threshold;
    return [threshold, empty_window](const VideoClip& clip, const Window&) {
      if (empty_window(clip)) return std::vector<TransitionSegment>{};
      return points_to_segments(luminance_detector(clip, threshold), clip.fps);
    };
  }
  if (name == "oracle") {
    const double jitter = options.jitter_s;
    const double drop = options.drop_prob;
    const std::uint64_t seed = options.seed;
    const std::vector<TransitionSegment> gt = labels;
    return [jitter, drop, seed, gt](const VideoClip&, const Window& win) {
      std::vector<TransitionSegment> local;
      for (const TransitionSegment& label : gt) {
        const double s = std::max(label.start_s, win.global_start_s);
        const double e = std::min(label.end_s, win.global_end_s);
        const bool point = label.start_s == label.end_s;
        // non-degenerate labels contribute only a positive-length piece;
        // zero-length slivers at a window edge would surface as spurious cuts
        if (point ? (s <= e) : (s < e)) {
          local.push_back({s - win.global_start_s, e - win.global_start_s, label.type});
        }
      }
      const DetectionResult jittered =
          oracle_detector(local, jitter, drop, mix_seed(seed, static_cast<std::uint64_t>(win.index)),
                          win.length_s());
      return jittered.segments;
    };
  }
  if (name == "external") {
    if (options.command.empty()) {
      throw PreconditionError("external detector requires a command");
    }
    const ExternalCommand command{options.command};
    const double timeout = options.timeout_s;
    return [command, timeout](const VideoClip& clip, const Window& win) {
      static std::atomic<std::uint64_t> counter{0};
      const auto dir = std::filesystem::temp_directory_path();
      std::ostringstream name_s;
      name_s << "stdkit-win-" << ::getpid() << '-' << counter.fetch_add(1) << '-' << win.index
             << ".stdv";
      const auto path = dir / name_s.str();
      save_rawvid(clip, path);
      DetectionResult res;
      try {
        res = run_external_detector(command, path, timeout);
      } catch (...) {
        std::filesystem::remove(path);
        throw;
      }
      std::filesystem::remove(path);
      return res.segments;
    };
  }
  throw PreconditionError("unknown detector '" + name + "'");
}

BenchResult run_benchmark(const std::vector<DatasetManifest>& manifests,
                          const DetectorOptions& detector, const BenchOptions& options) {
  if (manifests.empty()) throw PreconditionError("benchmark needs at least one manifest");
  for (const DatasetManifest& m : manifests) {
    if (m.entries.empty()) throw PreconditionError("manifest '" + m.name + "' has no entries");
  }

  struct Task {
    int manifest;
    const ManifestEntry* entry;
  };
  std::vector<Task> tasks;
  for (int mi = 0; mi < static_cast<int>(manifests.size()); ++mi) {
    for (const ManifestEntry& e : manifests[static_cast<std::size_t>(mi)].entries) {
      tasks.push_back({mi, &e});
    }
  }

  BenchResult result;
  result.videos.resize(tasks.size());
  for (const DatasetManifest& m : manifests) result.dataset_names.push_back(m.name);
  result.per_dataset.resize(manifests.size());

  const auto run_one = [&](std::size_t i) {
    const Task& task = tasks[i];
    BenchVideoRow& row = result.videos[i];
    row.dataset = manifests[static_cast<std::size_t>(task.manifest)].name;
    row.video = task.entry->video.filename().string();
    try {
      const VideoClip clip = load_rawvid(task.entry->video);
      const LabelFile labels = load_label_file(task.entry->labels);
      const Fps fps = labels.fps.num ? labels.fps : clip.fps;
      const WindowDetectorFn fn = make_window_detector(detector, labels.transitions);
      const DetectionResult preds = run_pipeline(clip, fn, options.pipeline);
      row.report = evaluate(preds, labels.transitions, fps, clip.duration_s(), options.tau_grid);
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
  };

  const int jobs = std::max(1, options.jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
          run_one(i);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  // deterministic sequential reduction, independent of worker scheduling
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const BenchVideoRow& row = result.videos[i];
    if (row.failed) {
      ++result.failures;
      continue;
    }
    result.aggregate.add(row.report);
    result.per_dataset[static_cast<std::size_t>(tasks[i].manifest)].add(row.report);
  }
  return result;
}

std::string bench_csv(const BenchResult& result) {
  std::ostringstream out;
  bool header = true;
  for (const BenchVideoRow& row : result.videos) {
    if (row.failed) continue;
    out << report_csv(row.report, row.video, row.dataset, header);
    header = false;
  }
  for (std::size_t i = 0; i < result.per_dataset.size(); ++i) {
    if (result.per_dataset[i].rows.empty()) continue;
    out << report_csv(result.per_dataset[i], "ALL", result.dataset_names[i], header);
    header = false;
  }
  if (!result.aggregate.rows.empty()) {
    out << report_csv(result.aggregate, "ALL", "micro", header);
  }
  return out.str();
}

std::string render_markdown_report(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  std::vector<std::vector<std::string>> aggregate_rows;
  std::vector<std::string> headers;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.empty()) continue;
    if (headers.empty() && cells[0] == "video") {
      headers = cells;
      continue;
    }
    if (cells.size() >= 2 && cells[0] == "ALL") aggregate_rows.push_back(cells);
  }
  if (headers.empty() || aggregate_rows.empty()) {
    throw ParseError("no aggregate rows found in the report CSV");
  }

  std::ostringstream out;
  out << "| Dataset | tau | Seg P | Seg R | Seg F1 | Frame P | Frame R | Frame F1 | ABE (s) | RTF |\n";
  out << "|---|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& row : aggregate_rows) {
    out << "| " << row[1] << " | " << row[2];
    for (std::size_t c = 3; c <= 10 && c < row.size(); ++c) {
      out << " | " << (row[c].empty() ? "-" : row[c]);
    }
    out << " |\n";
  }
  out << "\n| Dataset | tau | Cut recall | Normal recall | Long recall | Long frame F1 |\n";
  out << "|---|---|---|---|---|---|\n";
  for (const auto& row : aggregate_rows) {
    out << "| " << row[1] << " | " << row[2];
    for (std::size_t c = 11; c <= 14 && c < row.size(); ++c) {
      out << " | " << (row[c].empty() ? "-" : row[c]);
    }
    out << " |\n";
  }
  return out.str();
}

}  // namespace stdkit
