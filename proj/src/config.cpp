#include "stdkit/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "stdkit/error.hpp"

namespace stdkit {

void Config::validate() const {
  if (window_s <= 0) throw PreconditionError("window_s must be positive");
  if (stride_s <= 0 || stride_s > window_s) {
    throw PreconditionError("stride_s must be in (0, window_s]");
  }
  if (nms_iou < 0 || nms_iou > 1) throw PreconditionError("nms_iou must be in [0, 1]");
  if (min_gap_s < 0) throw PreconditionError("min_gap_s must be >= 0");
  if (tau_grid.empty()) throw PreconditionError("tau grid must not be empty");
  for (const double tau : tau_grid) {
    if (tau < 0) throw PreconditionError("tau values must be >= 0");
  }
  for (const double t : {content_threshold, hist_threshold, adaptive_threshold, luma_threshold}) {
    if (t < 0 || t > 1) throw PreconditionError("detector thresholds must be in [0, 1]");
  }
  if (hist_bins < 2 || hist_bins > 256) throw PreconditionError("hist_bins must be in [2, 256]");
  if (adaptive_radius < 1) throw PreconditionError("adaptive_radius must be >= 1");
  if (external_timeout_s <= 0) throw PreconditionError("external_timeout_s must be positive");
  if (synth_cap_s <= 0) throw PreconditionError("synth_cap_s must be positive");
  const double mass = tier_probs.very_high + tier_probs.high + tier_probs.medium;
  if (tier_probs.very_high < 0 || tier_probs.high < 0 || tier_probs.medium < 0 ||
      std::abs(mass - 1.0) > 1e-9) {
    throw PreconditionError("tier probabilities must be non-negative and sum to 1");
  }
  if (flow_block < 4) throw PreconditionError("flow_block must be >= 4");
  if (flow_radius < 1) throw PreconditionError("flow_radius must be >= 1");
  if (flow_pairing < 1) throw PreconditionError("flow_pairing must be >= 1");
  if (jobs < 1) throw PreconditionError("jobs must be >= 1");
}

std::vector<double> parse_tau_grid(const std::string& text) {
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    double lo = 0, hi = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::istringstream ss(text);
    if (!(ss >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0 || hi < lo) {
      throw PreconditionError("tau range must be lo:hi:step");
    }
    for (double t = lo; t <= hi + 1e-9; t += step) grid.push_back(std::round(t * 1e9) / 1e9);
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) grid.push_back(std::stod(item));
    }
  }
  if (grid.empty()) throw PreconditionError("tau grid must not be empty");
  return grid;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("invalid JSON in " + path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw ParseError("config must be a JSON object");

  Config cfg;
  const auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("window_s", cfg.window_s);
  get("stride_s", cfg.stride_s);
  get("nms_iou", cfg.nms_iou);
  get("min_gap_s", cfg.min_gap_s);
  if (j.contains("tau_grid")) {
    if (j.at("tau_grid").is_string()) {
      cfg.tau_grid = parse_tau_grid(j.at("tau_grid").get<std::string>());
    } else {
      cfg.tau_grid = j.at("tau_grid").get<std::vector<double>>();
    }
  }
  get("content_threshold", cfg.content_threshold);
  get("hist_threshold", cfg.hist_threshold);
  get("hist_bins", cfg.hist_bins);
  get("adaptive_threshold", cfg.adaptive_threshold);
  get("adaptive_radius", cfg.adaptive_radius);
  get("luma_threshold", cfg.luma_threshold);
  get("external_timeout_s", cfg.external_timeout_s);
  get("synth_cap_s", cfg.synth_cap_s);
  get("flow_block", cfg.flow_block);
  get("flow_radius", cfg.flow_radius);
  get("flow_pairing", cfg.flow_pairing);
  get("jobs", cfg.jobs);
  if (j.contains("tier_probs")) {
    const auto& p = j.at("tier_probs");
    cfg.tier_probs.very_high = p.value("very_high", cfg.tier_probs.very_high);
    cfg.tier_probs.high = p.value("high", cfg.tier_probs.high);
    cfg.tier_probs.medium = p.value("medium", cfg.tier_probs.medium);
  }
  cfg.validate();
  return cfg;
}

}  // namespace stdkit
