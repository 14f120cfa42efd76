#include "stdkit/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "stdkit/bench.hpp"
#include "stdkit/config.hpp"
#include "stdkit/error.hpp"
#include "stdkit/flow.hpp"
#include "stdkit/labels.hpp"
#include "stdkit/metrics.hpp"
#include "stdkit/synth.hpp"
#include "stdkit/video.hpp"
#include "stdkit/window.hpp"

namespace stdkit {

namespace {

namespace fs = std::filesystem;

Fps parse_fps(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      return {static_cast<std::uint32_t>(std::stoul(text)), 1};
    }
    return {static_cast<std::uint32_t>(std::stoul(text.substr(0, slash))),
            static_cast<std::uint32_t>(std::stoul(text.substr(slash + 1)))};
  } catch (const std::exception&) {
    throw PreconditionError("fps must be an integer or num/den rational: " + text);
  }
}

std::vector<std::string> split_command(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  std::string word;
  while (ss >> word) out.push_back(word);
  return out;
}

std::vector<fs::path> list_stdv(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw PreconditionError(dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".stdv") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.filename() < b.filename(); });
  if (files.empty()) throw PreconditionError("no .stdv files in " + dir.string());
  return files;
}

void emit_error(const char* category, const std::string& message) {
  const nlohmann::json line = {{"error", category}, {"message", message}};
  std::cerr << line.dump() << '\n';
}

struct DetectorFlags {
  std::string name = "content";
  std::optional<double> threshold;
  std::optional<int> bins;
  std::optional<int> adaptive_radius;
  double jitter_s = 0.0;
  double drop_prob = 0.0;
  std::optional<std::uint64_t> seed;
  std::string command;
  std::optional<double> timeout_s;
};

void add_detector_flags(CLI::App* cmd, DetectorFlags& flags) {
  cmd->add_option("--detector", flags.name, "content|hist|adaptive|threshold|oracle|external")
      ->check(CLI::IsMember({"content", "hist", "adaptive", "threshold", "oracle", "external"}));
  cmd->add_option("--threshold", flags.threshold, "score threshold for the chosen detector");
  cmd->add_option("--bins", flags.bins, "luminance histogram bins (hist detector)");
  cmd->add_option("--adaptive-radius", flags.adaptive_radius, "rolling-mean radius in frames");
  cmd->add_option("--jitter", flags.jitter_s, "oracle boundary jitter in seconds");
  cmd->add_option("--drop", flags.drop_prob, "oracle segment drop probability");
  cmd->add_option("--seed", flags.seed, "seed for stochastic detectors");
  cmd->add_option("--cmd", flags.command, "external detector command (whitespace separated)");
  cmd->add_option("--timeout", flags.timeout_s, "external detector deadline in seconds");
}

DetectorOptions detector_options(const DetectorFlags& flags, const Config& cfg) {
  DetectorOptions opt;
  opt.name = flags.name;
  opt.content_threshold = cfg.content_threshold;
  opt.hist_threshold = cfg.hist_threshold;
  opt.hist_bins = flags.bins.value_or(cfg.hist_bins);
  opt.adaptive_threshold = cfg.adaptive_threshold;
  opt.adaptive_radius = flags.adaptive_radius.value_or(cfg.adaptive_radius);
  opt.luma_threshold = cfg.luma_threshold;
  if (flags.threshold) {
    if (flags.name == "content") opt.content_threshold = *flags.threshold;
    if (flags.name == "hist") opt.hist_threshold = *flags.threshold;
    if (flags.name == "adaptive") opt.adaptive_threshold = *flags.threshold;
    if (flags.name == "threshold") opt.luma_threshold = *flags.threshold;
  }
  opt.jitter_s = flags.jitter_s;
  opt.drop_prob = flags.drop_prob;
  if (flags.name == "oracle") {
    if (!flags.seed) {
      throw PreconditionError("--seed is required for the oracle detector");
    }
    opt.seed = *flags.seed;
  }
  if (flags.name == "external") {
    opt.command = split_command(flags.command);
    if (opt.command.empty()) {
      throw PreconditionError("--cmd is required for the external detector");
    }
  }
  opt.timeout_s = flags.timeout_s.value_or(cfg.external_timeout_s);
  return opt;
}

// Pulls --config out of the raw arguments so file values can serve as flag
// defaults; flags given on the command line still win.
Config preload_config(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw PreconditionError("--config needs a path");
      return load_config(args[i + 1]);
    }
    if (args[i].rfind("--config=", 0) == 0) {
      return load_config(args[i].substr(9));
    }
  }
  return Config{};
}

int run(std::vector<std::string> args) {
  const Config cfg = preload_config(args);
  cfg.validate();

  CLI::App app{"stdkit - shot transition synthesis, detection and benchmarking"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file overlaying built-in defaults");

  // ---- synth ----
  auto* synth_cmd = app.add_subcommand("synth", "splice shots with randomized transitions");
  synth_cmd->fallthrough();
  struct {
    std::string shots_dir;
    std::uint64_t seed = 0;
    double cap = 0;
    std::string out;
    std::string labels;
    double long_frac = -1.0;
  } synth_args;
  synth_args.cap = cfg.synth_cap_s;
  synth_cmd->add_option("--shots", synth_args.shots_dir, "directory of .stdv shot files")
      ->required();
  synth_cmd->add_option("--seed", synth_args.seed, "sampling seed")->required();
  synth_cmd->add_option("--cap", synth_args.cap, "transition duration cap in seconds");
  synth_cmd->add_option("--out", synth_args.out, "output .stdv path")->required();
  synth_cmd->add_option("--labels", synth_args.labels, "label JSON path (default: out + .json)");
  synth_cmd->add_option("--long-frac", synth_args.long_frac,
                        "probability of drawing a >1s duration (default: uniform)");

  // ---- import ----
  auto* import_cmd = app.add_subcommand("import", "convert a PPM sequence into a .stdv clip");
  import_cmd->fallthrough();
  struct {
    std::string dir;
    std::string fps = "25";
    std::string out;
  } import_args;
  import_cmd->add_option("--dir", import_args.dir, "directory of P6 .ppm frames")->required();
  import_cmd->add_option("--fps", import_args.fps, "frame rate (integer or num/den)");
  import_cmd->add_option("--out", import_args.out, "output .stdv path")->required();

  // ---- flow ----
  auto* flow_cmd = app.add_subcommand("flow", "optical-flow visualization and channel fusion");
  flow_cmd->fallthrough();
  struct {
    std::string in;
    std::string out;
    bool fuse = false;
    int block = 0;
    int radius = 0;
    int pairing = 0;
  } flow_args;
  flow_args.block = cfg.flow_block;
  flow_args.radius = cfg.flow_radius;
  flow_args.pairing = cfg.flow_pairing;
  flow_cmd->add_option("--in", flow_args.in, "input .stdv clip")->required();
  flow_cmd->add_option("--out", flow_args.out, "output clip path")->required();
  flow_cmd->add_flag("--fuse", flow_args.fuse, "emit a 6-channel fused container instead");
  flow_cmd->add_option("--block", flow_args.block, "block-matching tile size");
  flow_cmd->add_option("--radius", flow_args.radius, "block-matching search radius");
  flow_cmd->add_option("--pairing", flow_args.pairing, "frame pairing stride (default 1)");

  // ---- detect ----
  auto* detect_cmd = app.add_subcommand("detect", "sliding-window transition detection");
  detect_cmd->fallthrough();
  struct {
    std::string clip;
    std::string labels;
    std::string out;
    double window = 0;
    double stride = 0;
    double iou = 0;
    double min_gap = 0;
    bool trace = false;
  } detect_args;
  detect_args.window = cfg.window_s;
  detect_args.stride = cfg.stride_s;
  detect_args.iou = cfg.nms_iou;
  detect_args.min_gap = cfg.min_gap_s;
  DetectorFlags detect_flags;
  detect_cmd->add_option("--clip", detect_args.clip, "input .stdv clip")->required();
  add_detector_flags(detect_cmd, detect_flags);
  detect_cmd->add_option("--labels", detect_args.labels, "label JSON (oracle detector)");
  detect_cmd->add_option("--window", detect_args.window, "window size in seconds");
  detect_cmd->add_option("--stride", detect_args.stride, "window stride in seconds");
  detect_cmd->add_option("--nms-iou", detect_args.iou, "temporal NMS IoU threshold");
  detect_cmd->add_option("--min-gap-s", detect_args.min_gap, "merge outputs closer than this gap");
  detect_cmd->add_flag("--trace", detect_args.trace, "JSON-lines diagnostics on stderr");
  detect_cmd->add_option("--out", detect_args.out, "prediction JSON path (default: stdout)");

  // ---- eval ----
  auto* eval_cmd = app.add_subcommand("eval", "evaluate predictions against labels");
  eval_cmd->fallthrough();
  struct {
    std::string preds;
    std::string labels;
    std::string fps;
    double duration = 0;
    std::string tau;
    std::string format = "csv";
  } eval_args;
  eval_cmd->add_option("--preds", eval_args.preds, "prediction JSON")->required();
  eval_cmd->add_option("--labels", eval_args.labels, "label JSON")->required();
  eval_cmd->add_option("--fps", eval_args.fps, "frame rate override (integer or num/den)");
  eval_cmd->add_option("--duration", eval_args.duration, "video duration override in seconds");
  eval_cmd->add_option("--tau", eval_args.tau, "tolerance grid, lo:hi:step or comma list");
  eval_cmd->add_option("--format", eval_args.format, "csv or table")
      ->check(CLI::IsMember({"csv", "table"}));

  // ---- bench ----
  auto* bench_cmd = app.add_subcommand("bench", "run the benchmark over dataset manifests");
  bench_cmd->fallthrough();
  struct {
    std::vector<std::string> manifests;
    std::string out;
    std::string tau;
    double window = 0;
    double stride = 0;
    double iou = 0;
    double min_gap = 0;
    int jobs = 0;
    bool table = false;
  } bench_args;
  bench_args.window = cfg.window_s;
  bench_args.stride = cfg.stride_s;
  bench_args.iou = cfg.nms_iou;
  bench_args.min_gap = cfg.min_gap_s;
  bench_args.jobs = cfg.jobs;
  DetectorFlags bench_flags;
  bench_cmd->add_option("--manifest", bench_args.manifests, "manifest JSON (repeatable)")
      ->required();
  add_detector_flags(bench_cmd, bench_flags);
  bench_cmd->add_option("--window", bench_args.window, "window size in seconds");
  bench_cmd->add_option("--stride", bench_args.stride, "window stride in seconds");
  bench_cmd->add_option("--nms-iou", bench_args.iou, "temporal NMS IoU threshold");
  bench_cmd->add_option("--min-gap-s", bench_args.min_gap, "merge outputs closer than this gap");
  bench_cmd->add_option("--tau", bench_args.tau, "tolerance grid, lo:hi:step or comma list");
  bench_cmd->add_option("--jobs", bench_args.jobs, "parallel videos");
  bench_cmd->add_option("--out", bench_args.out, "report CSV path (default: stdout)");
  bench_cmd->add_flag("--table", bench_args.table, "also print a human-readable table");

  // ---- report ----
  auto* report_cmd = app.add_subcommand("report", "render a benchmark CSV as markdown tables");
  report_cmd->fallthrough();
  struct {
    std::string in;
  } report_args;
  report_cmd->add_option("--in", report_args.in, "benchmark CSV produced by `bench`")->required();

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::Success& e) {
    app.exit(e);  // --help and friends
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 64;
  }

  if (synth_cmd->parsed()) {
    std::vector<VideoClip> shots;
    for (const fs::path& path : list_stdv(synth_args.shots_dir)) {
      shots.push_back(load_rawvid(path));
    }
    const SynthPlan plan =
        sample_plan(shots, synth_args.seed, synth_args.cap, synth_args.long_frac);
    const SynthResult result = synthesize(shots, plan);
    save_rawvid(result.clip, synth_args.out);
    const std::string labels_path =
        synth_args.labels.empty() ? synth_args.out + ".json" : synth_args.labels;
    LabelFile labels;
    labels.video = fs::path(synth_args.out).filename().string();
    labels.fps = result.clip.fps;
    labels.duration_s = result.clip.duration_s();
    labels.transitions = result.labels;
    save_label_file(labels, labels_path);
    const nlohmann::json summary = {{"video", synth_args.out},
                                    {"labels", labels_path},
                                    {"duration_s", labels.duration_s},
                                    {"transitions", labels.transitions.size()}};
    std::cout << summary.dump() << '\n';
    return 0;
  }

  if (import_cmd->parsed()) {
    const VideoClip clip = import_ppm_sequence(import_args.dir, parse_fps(import_args.fps));
    save_rawvid(clip, import_args.out);
    std::cout << nlohmann::json({{"video", import_args.out}, {"frames", clip.frames.size()}}).dump()
              << '\n';
    return 0;
  }

  if (flow_cmd->parsed()) {
    const VideoClip clip = load_rawvid(flow_args.in);
    if (flow_args.fuse) {
      save_fusedvid(fuse_clip(clip, flow_args.block, flow_args.radius, flow_args.pairing),
                    flow_args.out);
    } else {
      save_rawvid(flow_visualize_clip(clip, flow_args.block, flow_args.radius, flow_args.pairing),
                  flow_args.out);
    }
    std::cout << nlohmann::json({{"out", flow_args.out}, {"fused", flow_args.fuse}}).dump() << '\n';
    return 0;
  }

  if (detect_cmd->parsed()) {
    if (detect_args.stride > detect_args.window || detect_args.stride <= 0 ||
        detect_args.window <= 0) {
      emit_error("usage", "stride must be in (0, window]");
      return 64;
    }
    const VideoClip clip = load_rawvid(detect_args.clip);
    std::vector<TransitionSegment> labels;
    if (detect_flags.name == "oracle") {
      if (detect_args.labels.empty()) {
        throw PreconditionError("--labels is required for the oracle detector");
      }
      labels = load_label_file(detect_args.labels).transitions;
    }
    const DetectorOptions opts = detector_options(detect_flags, cfg);
    PipelineOptions pipeline;
    pipeline.window_s = detect_args.window;
    pipeline.stride_s = detect_args.stride;
    pipeline.nms_iou = detect_args.iou;
    pipeline.min_gap_s = detect_args.min_gap;
    if (detect_args.trace) {
      pipeline.trace = [](const std::string& line) { std::cerr << line << '\n'; };
    }
    const DetectionResult result =
        run_pipeline(clip, make_window_detector(opts, labels), pipeline);
    PredictionFile preds;
    preds.wall_time_s = result.wall_time_s;
    preds.segments = result.segments;
    if (detect_args.out.empty()) {
      nlohmann::json segments = nlohmann::json::array();
      for (const TransitionSegment& s : preds.segments) {
        segments.push_back({{"start", s.start_s}, {"end", s.end_s}});
      }
      std::cout << nlohmann::json({{"wall_time_s", preds.wall_time_s}, {"segments", segments}}).dump(2)
                << '\n';
    } else {
      save_prediction_file(preds, detect_args.out);
    }
    return 0;
  }

  if (eval_cmd->parsed()) {
    const PredictionFile preds = load_prediction_file(eval_args.preds);
    const LabelFile labels = load_label_file(eval_args.labels);
    const Fps fps = eval_args.fps.empty() ? labels.fps : parse_fps(eval_args.fps);
    const double duration = eval_args.duration > 0 ? eval_args.duration : labels.duration_s;
    if (duration <= 0) {
      throw PreconditionError("labels carry no duration; pass --duration");
    }
    const std::vector<double> grid =
        eval_args.tau.empty() ? cfg.tau_grid : parse_tau_grid(eval_args.tau);
    DetectionResult det{preds.segments, preds.wall_time_s};
    const MetricsReport report = evaluate(det, labels.transitions, fps, duration, grid);
    if (eval_args.format == "table") {
      std::cout << report_table(report, labels.video.empty() ? eval_args.labels : labels.video);
    } else {
      std::cout << report_csv(report, labels.video.empty() ? "-" : labels.video, "-", true);
    }
    return 0;
  }

  if (bench_cmd->parsed()) {
    if (bench_args.stride > bench_args.window || bench_args.stride <= 0 ||
        bench_args.window <= 0) {
      emit_error("usage", "stride must be in (0, window]");
      return 64;
    }
    std::vector<DatasetManifest> manifests;
    for (const std::string& path : bench_args.manifests) {
      manifests.push_back(load_manifest(path));
    }
    const DetectorOptions opts = detector_options(bench_flags, cfg);
    BenchOptions bopts;
    bopts.pipeline.window_s = bench_args.window;
    bopts.pipeline.stride_s = bench_args.stride;
    bopts.pipeline.nms_iou = bench_args.iou;
    bopts.pipeline.min_gap_s = bench_args.min_gap;
    bopts.tau_grid = bench_args.tau.empty() ? cfg.tau_grid : parse_tau_grid(bench_args.tau);
    bopts.jobs = bench_args.jobs;
    const BenchResult result = run_benchmark(manifests, opts, bopts);
    for (const BenchVideoRow& row : result.videos) {
      if (row.failed) {
        emit_error("video_failed", row.video + ": " + row.error);
      }
    }
    const std::string csv = bench_csv(result);
    if (bench_args.out.empty()) {
      std::cout << csv;
    } else {
      std::ofstream out(bench_args.out, std::ios::trunc);
      if (!out) throw IoError("cannot write " + bench_args.out);
      out << csv;
    }
    if (bench_args.table) {
      std::cout << report_table(result.aggregate, "micro aggregate over all videos");
    }
    if (result.failures > 0 && result.failures == static_cast<int>(result.videos.size())) return 1;
    return result.failures > 0 ? 2 : 0;
  }

  if (report_cmd->parsed()) {
    std::ifstream in(report_args.in);
    if (!in) throw IoError("cannot open " + report_args.in);
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::cout << render_markdown_report(buffer.str());
    return 0;
  }

  return 64;
}

}  // namespace

int dispatch(std::vector<std::string> args) {
  try {
    return run(std::move(args));
  } catch (const PreconditionError& e) {
    emit_error("precondition", e.what());
    return 65;
  } catch (const FormatError& e) {
    emit_error("format", e.what());
    return 65;
  } catch (const TruncationError& e) {
    emit_error("truncation", e.what());
    return 65;
  } catch (const ParseError& e) {
    emit_error("parse", e.what());
    return 65;
  } catch (const CatalogError& e) {
    emit_error("catalog", e.what());
    return 65;
  } catch (const InvariantError& e) {
    emit_error("invariant", e.what());
    return 65;
  } catch (const IoError& e) {
    emit_error("io", e.what());
    return 66;
  } catch (const TimeoutError& e) {
    emit_error("timeout", e.what());
    return 70;
  } catch (const DetectorError& e) {
    emit_error("detector", e.what());
    return 70;
  } catch (const PipelineError& e) {
    emit_error("pipeline", e.what());
    return 70;
  } catch (const Error& e) {
    emit_error("error", e.what());
    return 70;
  } catch (const std::exception& e) {
    emit_error("unexpected", e.what());
    return 1;
  }
}

}  // namespace stdkit
