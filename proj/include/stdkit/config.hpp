#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "stdkit/bench.hpp"

namespace stdkit {

// Tool-wide defaults. Precedence: built-in < config file < command-line flag.
struct Config {
  double window_s = 10.0;
  double stride_s = 9.0;
  double nms_iou = 0.5;
  double min_gap_s = 0.0;
  std::vector<double> tau_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};

  double content_threshold = 0.12;
  double hist_threshold = 0.35;
  int hist_bins = 64;
  double adaptive_threshold = 0.06;
  int adaptive_radius = 8;
  double luma_threshold = 0.05;
  double external_timeout_s = 60.0;

  double synth_cap_s = 3.0;
  TierProbs tier_probs;

  int flow_block = 16;
  int flow_radius = 7;
  int flow_pairing = 1;

  int jobs = 1;

  // Throws PreconditionError when a default would violate an operation's
  // preconditions downstream.
  void validate() const;
};

// Parses "lo:hi:step" or a comma-separated list into a tolerance grid.
std::vector<double> parse_tau_grid(const std::string& text);

// Overlays a JSON config file ({"window_s": 10, ...}) onto defaults.
Config load_config(const std::filesystem::path& path);

}  // namespace stdkit
