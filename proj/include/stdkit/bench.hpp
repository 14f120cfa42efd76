#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "stdkit/detect.hpp"
#include "stdkit/metrics.hpp"
#include "stdkit/rng.hpp"
#include "stdkit/window.hpp"

namespace stdkit {

enum class QualityTier { VeryHigh, High, Medium };

QualityTier tier_from_string(const std::string& s);
const char* tier_name(QualityTier tier);

struct ManifestEntry {
  std::filesystem::path video;
  std::filesystem::path labels;
  Fps fps;
};

// JSON schema: {"name", "domain", "quality", "entries": [{"video", "labels",
// "fps": [num, den]}, ...]}; relative paths resolve against the manifest dir.
struct DatasetManifest {
  std::string name;
  std::string domain;
  QualityTier quality = QualityTier::Medium;
  std::vector<ManifestEntry> entries;
};

DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

struct TierProbs {
  double very_high = 0.7;
  double high = 0.2;
  double medium = 0.1;

  double of(QualityTier tier) const;
};

// Infinite deterministic stream: tier by (renormalized) probability, manifest
// uniformly within the tier, entry uniformly within the manifest.
class QualityWeightedSampler {
 public:
  struct Draw {
    int manifest = 0;
    int entry = 0;
  };

  QualityWeightedSampler(const std::vector<DatasetManifest>& manifests, TierProbs probs,
                         std::uint64_t seed);
  Draw next();
  QualityTier tier_of(int manifest) const { return tiers_[static_cast<std::size_t>(manifest)]; }

 private:
  std::vector<QualityTier> tiers_;
  std::vector<std::vector<int>> by_tier_;   // manifest indices per present tier slot
  std::vector<double> cumulative_;          // renormalized tier probabilities
  std::vector<std::size_t> entry_counts_;
  Rng rng_;
};

// Detector selection shared by the CLI and the benchmark runner.
struct DetectorOptions {
  std::string name = "content";  // content|hist|adaptive|threshold|oracle|external
  double content_threshold = 0.12;
  double hist_threshold = 0.35;
  int hist_bins = 64;
  double adaptive_threshold = 0.06;
  int adaptive_radius = 8;
  double luma_threshold = 0.05;
  // oracle
  double jitter_s = 0.0;
  double drop_prob = 0.0;
  std::uint64_t seed = 0;
  // external
  std::vector<std::string> command;
  double timeout_s = 60.0;
};

// Builds the per-window detector. The oracle variant clips `labels` to each
// window (a label contributes only where it positively overlaps the window;
// cuts contribute wherever the window contains their instant). The external
// variant writes each window clip to a temporary .stdv file.
WindowDetectorFn make_window_detector(const DetectorOptions& options,
                                      const std::vector<TransitionSegment>& labels);

struct BenchOptions {
  PipelineOptions pipeline;
  std::vector<double> tau_grid = default_tau_grid();
  int jobs = 1;
};

struct BenchVideoRow {
  std::string dataset;
  std::string video;
  MetricsReport report;
  bool failed = false;
  std::string error;
};

struct BenchResult {
  MetricsReport aggregate;                  // micro-average over all videos
  std::vector<MetricsReport> per_dataset;   // micro-average per manifest
  std::vector<std::string> dataset_names;
  std::vector<BenchVideoRow> videos;
  int failures = 0;
};

BenchResult run_benchmark(const std::vector<DatasetManifest>& manifests,
                          const DetectorOptions& detector, const BenchOptions& options);

// Full benchmark CSV: per-video rows, per-dataset aggregates, and the overall
// micro aggregate under video=ALL,dataset=micro.
std::string bench_csv(const BenchResult& result);

// Markdown rendering of a benchmark CSV (the `report` subcommand).
std::string render_markdown_report(const std::string& csv_text);

}  // namespace stdkit
