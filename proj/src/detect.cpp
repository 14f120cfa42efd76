#include "stdkit/detect.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstring>
#include <sstream>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "stdkit/error.hpp"
#include "stdkit/rng.hpp"

namespace stdkit {

namespace {

std::vector<double> content_scores(const VideoClip& clip) {
  std::vector<double> scores(clip.frames.size(), 0.0);
  const double norm = 255.0 * static_cast<double>(clip.frames.front().pixels.size());
  for (std::size_t i = 1; i < clip.frames.size(); ++i) {
    const auto& a = clip.frames[i - 1].pixels;
    const auto& b = clip.frames[i].pixels;
    long long sum = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      sum += std::abs(static_cast<int>(a[k]) - static_cast<int>(b[k]));
    }
    scores[i] = static_cast<double>(sum) / norm;
  }
  return scores;
}

std::vector<double> luma_histogram(const Frame& frame, int bins) {
  std::vector<double> hist(static_cast<std::size_t>(bins), 0.0);
  const std::vector<std::uint8_t> gray = to_grayscale(frame);
  for (const std::uint8_t y : gray) {
    hist[static_cast<std::size_t>(y) * bins / 256] += 1.0;
  }
  for (double& h : hist) h /= static_cast<double>(gray.size());
  return hist;
}

void require_multi_frame(const VideoClip& clip) {
  validate(clip);
  if (clip.frames.size() < 2) {
    throw PreconditionError("detector needs a clip with at least two frames");
  }
}

}  // namespace

FramePointScores content_detector(const VideoClip& clip, double threshold) {
  require_multi_frame(clip);
  return {content_scores(clip), threshold};
}

FramePointScores hist_detector(const VideoClip& clip, int bins, double threshold) {
  require_multi_frame(clip);
  if (bins < 2 || bins > 256) throw PreconditionError("histogram bins must be in [2, 256]");
  FramePointScores out;
  out.threshold = threshold;
  out.scores.assign(clip.frames.size(), 0.0);
  std::vector<double> prev = luma_histogram(clip.frames.front(), bins);
  for (std::size_t i = 1; i < clip.frames.size(); ++i) {
    const std::vector<double> curr = luma_histogram(clip.frames[i], bins);
    double l1 = 0;
    for (std::size_t b = 0; b < curr.size(); ++b) l1 += std::abs(curr[b] - prev[b]);
    out.scores[i] = 0.5 * l1;
    prev = curr;
  }
  return out;
}

FramePointScores adaptive_detector(const VideoClip& clip, double threshold, int radius) {
  require_multi_frame(clip);
  if (radius < 1) throw PreconditionError("adaptive radius must be >= 1");
  const std::vector<double> base = content_scores(clip);
  FramePointScores out;
  out.threshold = threshold;
  out.scores.assign(base.size(), 0.0);
  const auto n = static_cast<std::ptrdiff_t>(base.size());
  for (std::ptrdiff_t i = 1; i < n; ++i) {
    double sum = 0;
    int count = 0;
    for (std::ptrdiff_t k = std::max<std::ptrdiff_t>(0, i - radius);
         k <= std::min(n - 1, i + radius); ++k) {
      if (k == i) continue;
      sum += base[static_cast<std::size_t>(k)];
      ++count;
    }
    const double mean = count > 0 ? sum / count : 0.0;
    out.scores[static_cast<std::size_t>(i)] =
        std::clamp(base[static_cast<std::size_t>(i)] - mean, 0.0, 1.0);
  }
  return out;
}

FramePointScores luminance_detector(const VideoClip& clip, double threshold) {
  require_multi_frame(clip);
  FramePointScores out;
  out.threshold = threshold;
  out.scores.assign(clip.frames.size(), 0.0);
  std::vector<double> means(clip.frames.size());
  for (std::size_t i = 0; i < clip.frames.size(); ++i) {
    const std::vector<std::uint8_t> gray = to_grayscale(clip.frames[i]);
    long long sum = 0;
    for (const std::uint8_t y : gray) sum += y;
    means[i] = static_cast<double>(sum) / static_cast<double>(gray.size());
  }
  for (std::size_t i = 1; i < clip.frames.size(); ++i) {
    out.scores[i] = std::abs(means[i] - means[i - 1]) / 255.0;
  }
  return out;
}

std::vector<TransitionSegment> points_to_segments(const FramePointScores& points, Fps fps) {
  std::vector<TransitionSegment> out;
  const std::size_t n = points.scores.size();
  std::size_t i = 0;
  while (i < n) {
    if (points.scores[i] < points.threshold) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && points.scores[j + 1] >= points.threshold) ++j;
    TransitionSegment seg;
    seg.start_s = i == 0 ? 0.0 : fps.frame_time(static_cast<std::int64_t>(i) - 1);
    seg.end_s = fps.frame_time(static_cast<std::int64_t>(j));
    out.push_back(std::move(seg));
    i = j + 1;
  }
  return out;
}

DetectionResult oracle_detector(const std::vector<TransitionSegment>& labels, double jitter_s,
                                double drop_prob, std::uint64_t seed, double duration_s) {
  if (jitter_s < 0) throw PreconditionError("jitter must be >= 0");
  if (drop_prob < 0 || drop_prob > 1) throw PreconditionError("drop probability must be in [0, 1]");
  const auto t0 = std::chrono::steady_clock::now();
  DetectionResult res;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    Rng rng(mix_seed(seed, i));
    if (rng.next_unit() < drop_prob) continue;
    const TransitionSegment& gt = labels[i];
    double s = gt.start_s;
    double e = gt.end_s;
    if (jitter_s > 0) {
      s = std::clamp(s + rng.next_range(-jitter_s, jitter_s), 0.0, duration_s);
      e = std::clamp(e + rng.next_range(-jitter_s, jitter_s), 0.0, duration_s);
      if (s > e) std::swap(s, e);
    }
    res.segments.push_back({s, e, gt.type});
  }
  std::sort(res.segments.begin(), res.segments.end(), [](const auto& a, const auto& b) {
    return a.start_s != b.start_s ? a.start_s < b.start_s : a.end_s < b.end_s;
  });
  res.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

std::vector<TransitionSegment> merge_close_segments(std::vector<TransitionSegment> segments,
                                                    double min_gap_s) {
  if (min_gap_s <= 0 || segments.size() < 2) return segments;
  std::vector<TransitionSegment> out;
  out.push_back(segments.front());
  for (std::size_t i = 1; i < segments.size(); ++i) {
    if (segments[i].start_s - out.back().end_s < min_gap_s) {
      out.back().end_s = std::max(out.back().end_s, segments[i].end_s);
    } else {
      out.push_back(segments[i]);
    }
  }
  return out;
}

namespace {

struct Pipe {
  int fds[2] = {-1, -1};
  Pipe() {
    if (pipe(fds) != 0) throw IoError("pipe() failed");
  }
  ~Pipe() {
    close_read();
    close_write();
  }
  void close_read() {
    if (fds[0] >= 0) ::close(fds[0]);
    fds[0] = -1;
  }
  void close_write() {
    if (fds[1] >= 0) ::close(fds[1]);
    fds[1] = -1;
  }
};

}  // namespace

DetectionResult run_external_detector(const ExternalCommand& command,
                                      const std::filesystem::path& clip_path, double timeout_s) {
  if (command.argv.empty()) throw PreconditionError("external command must not be empty");
  if (!std::filesystem::exists(clip_path)) {
    throw PreconditionError("clip file does not exist: " + clip_path.string());
  }

  const auto t0 = std::chrono::steady_clock::now();
  Pipe out_pipe;
  Pipe err_pipe;

  std::vector<std::string> args = command.argv;
  args.push_back(clip_path.string());
  std::vector<char*> argv;
  argv.reserve(args.size() + 1);
  for (std::string& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  const pid_t pid = fork();
  if (pid < 0) throw IoError("fork() failed");
  if (pid == 0) {
    dup2(out_pipe.fds[1], STDOUT_FILENO);
    dup2(err_pipe.fds[1], STDERR_FILENO);
    out_pipe.close_read();
    err_pipe.close_read();
    execvp(argv[0], argv.data());
    std::fprintf(stderr, "exec failed: %s\n", std::strerror(errno));
    _exit(127);
  }
  out_pipe.close_write();
  err_pipe.close_write();

  std::string stdout_data;
  std::string stderr_data;
  const auto deadline = t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                 std::chrono::duration<double>(timeout_s));
  bool timed_out = false;
  bool out_open = true;
  bool err_open = true;
  char buf[4096];
  while (out_open || err_open) {
    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      timed_out = true;
      break;
    }
    pollfd fds[2];
    nfds_t n = 0;
    if (out_open) fds[n++] = {out_pipe.fds[0], POLLIN, 0};
    if (err_open) fds[n++] = {err_pipe.fds[0], POLLIN, 0};
    const int wait_ms = static_cast<int>(
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count() + 1);
    const int rc = poll(fds, n, wait_ms);
    if (rc <= 0) continue;  // timeout slice or EINTR; the deadline check decides
    for (nfds_t k = 0; k < n; ++k) {
      if (!(fds[k].revents & (POLLIN | POLLHUP))) continue;
      const bool is_out = fds[k].fd == out_pipe.fds[0];
      const ssize_t got = read(fds[k].fd, buf, sizeof buf);
      if (got > 0) {
        (is_out ? stdout_data : stderr_data).append(buf, static_cast<std::size_t>(got));
      } else {
        (is_out ? out_open : err_open) = false;
      }
    }
  }

  int status = 0;
  if (timed_out) {
    kill(pid, SIGKILL);
    waitpid(pid, &status, 0);
    std::ostringstream msg;
    msg << "external detector exceeded " << timeout_s << "s deadline";
    throw TimeoutError(msg.str());
  }
  // the pipes are closed but the process may still be running; keep honoring
  // the deadline while reaping
  for (;;) {
    const pid_t done = waitpid(pid, &status, WNOHANG);
    if (done == pid) break;
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      std::ostringstream msg;
      msg << "external detector exceeded " << timeout_s << "s deadline";
      throw TimeoutError(msg.str());
    }
    struct timespec ts{0, 2'000'000};  // 2 ms
    nanosleep(&ts, nullptr);
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    std::ostringstream msg;
    msg << "external detector failed (status "
        << (WIFEXITED(status) ? WEXITSTATUS(status) : -1) << ")";
    if (!stderr_data.empty()) {
      msg << ": " << stderr_data.substr(0, 512);
    }
    throw DetectorError(msg.str());
  }

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(stdout_data);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("external detector emitted malformed JSON: ") + e.what());
  }
  if (!j.is_array()) throw ParseError("external detector must emit a JSON array");

  DetectionResult res;
  res.wall_time_s = wall;
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("start") || !item.contains("end")) {
      throw ParseError("external detector entries need start/end");
    }
    TransitionSegment seg;
    seg.start_s = item.at("start").get<double>();
    seg.end_s = item.at("end").get<double>();
    if (!std::isfinite(seg.start_s) || !std::isfinite(seg.end_s)) {
      throw ParseError("external detector emitted non-finite timestamps");
    }
    res.segments.push_back(std::move(seg));
  }
  std::sort(res.segments.begin(), res.segments.end(), [](const auto& a, const auto& b) {
    return a.start_s != b.start_s ? a.start_s < b.start_s : a.end_s < b.end_s;
  });
  return res;
}

}  // namespace stdkit
