#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>

#include "stdkit/detect.hpp"
#include "stdkit/error.hpp"
#include "stdkit/metrics.hpp"
#include "stdkit/rng.hpp"
#include "support/corpus.hpp"

using namespace stdkit;
namespace fs = std::filesystem;

namespace {

VideoClip constant_clip(int frames, std::uint8_t level, int w = 8, int h = 8) {
  VideoClip clip;
  clip.fps = {25, 1};
  clip.frames.assign(static_cast<std::size_t>(frames), Frame(w, h, level, level, level));
  return clip;
}

VideoClip random_clip(int frames, std::uint64_t seed, int w = 16, int h = 12) {
  VideoClip clip;
  clip.fps = {25, 1};
  for (int k = 0; k < frames; ++k) {
    Frame f(w, h);
    for (std::size_t i = 0; i < f.pixels.size(); ++i) {
      f.pixels[i] = static_cast<std::uint8_t>(hash_unit(seed, k, i) * 256.0);
    }
    clip.frames.push_back(std::move(f));
  }
  return clip;
}

fs::path temp_stdv() {
  const fs::path dir = fs::temp_directory_path() / "stdkit-detect-tests";
  fs::create_directories(dir);
  const fs::path path = dir / "stub.stdv";
  save_rawvid(constant_clip(2, 0), path);
  return path;
}

}  // namespace

TEST_SUITE("detect") {
  TEST_CASE("content scores: static, hard cut, half step") {
    VideoClip clip = constant_clip(10, 128);
    auto scores = content_detector(clip, 0.12);
    for (const double s : scores.scores) CHECK(s == 0.0);

    VideoClip cut = constant_clip(4, 0);
    cut.frames[2] = Frame(8, 8, 255, 255, 255);
    cut.frames[3] = Frame(8, 8, 255, 255, 255);
    scores = content_detector(cut, 0.12);
    CHECK(scores.scores[2] == 1.0);
    CHECK(scores.scores[3] == 0.0);

    VideoClip half = constant_clip(2, 128);
    half.frames[1] = Frame(8, 8, 255, 255, 255);
    scores = content_detector(half, 0.12);
    CHECK(std::abs(scores.scores[1] - 0.5) <= 1.0 / 255.0);
  }

  TEST_CASE("histogram detector: identity, disjoint, permutation invariance") {
    VideoClip clip = constant_clip(3, 50);
    auto scores = hist_detector(clip, 16, 0.35);
    for (const double s : scores.scores) CHECK(s == 0.0);

    VideoClip bw = constant_clip(2, 0);
    bw.frames[1] = Frame(8, 8, 255, 255, 255);
    scores = hist_detector(bw, 16, 0.35);
    CHECK(scores.scores[1] == 1.0);

    VideoClip perm;
    perm.fps = {25, 1};
    Frame a = random_clip(1, 7).frames[0];
    Frame shuffled = a;
    std::vector<std::array<std::uint8_t, 3>> pixels;
    for (int i = 0; i < a.width * a.height; ++i) {
      pixels.push_back({a.pixels[3 * i], a.pixels[3 * i + 1], a.pixels[3 * i + 2]});
    }
    std::mt19937 g(17);
    std::shuffle(pixels.begin(), pixels.end(), g);
    for (int i = 0; i < a.width * a.height; ++i) {
      shuffled.pixels[3 * i] = pixels[static_cast<std::size_t>(i)][0];
      shuffled.pixels[3 * i + 1] = pixels[static_cast<std::size_t>(i)][1];
      shuffled.pixels[3 * i + 2] = pixels[static_cast<std::size_t>(i)][2];
    }
    perm.frames = {a, shuffled};
    scores = hist_detector(perm, 64, 0.35);
    CHECK(scores.scores[1] == 0.0);
  }

  TEST_CASE("detectors reject degenerate inputs") {
    CHECK_THROWS_AS(content_detector(constant_clip(1, 0), 0.1), PreconditionError);
    CHECK_THROWS_AS(hist_detector(constant_clip(3, 0), 1, 0.1), PreconditionError);
    CHECK_THROWS_AS(hist_detector(constant_clip(3, 0), 300, 0.1), PreconditionError);
  }

  TEST_CASE("scores stay in the unit interval on arbitrary content") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const VideoClip clip = random_clip(12, seed);
      for (const auto& scores :
           {content_detector(clip, 0.5), hist_detector(clip, 64, 0.5),
            adaptive_detector(clip, 0.5), luminance_detector(clip, 0.5)}) {
        for (const double s : scores.scores) {
          CHECK(s >= 0.0);
          CHECK(s <= 1.0);
        }
      }
    }
  }

  TEST_CASE("point to segment conversion") {
    FramePointScores pts;
    pts.threshold = 0.5;

    SUBCASE("single boundary at frame 100") {
      pts.scores.assign(120, 0.0);
      pts.scores[100] = 0.9;
      const auto segs = points_to_segments(pts, {25, 1});
      REQUIRE(segs.size() == 1);
      CHECK(segs[0].start_s == doctest::Approx(3.96).epsilon(1e-12));
      CHECK(segs[0].end_s == doctest::Approx(4.0).epsilon(1e-12));
    }

    SUBCASE("no boundary frames") {
      pts.scores.assign(50, 0.2);
      CHECK(points_to_segments(pts, {25, 1}).empty());
    }

    SUBCASE("a run of boundary frames merges") {
      pts.scores.assign(20, 0.0);
      pts.scores[10] = pts.scores[11] = pts.scores[12] = 0.8;
      const auto segs = points_to_segments(pts, {25, 1});
      REQUIRE(segs.size() == 1);
      CHECK(segs[0].start_s == doctest::Approx(0.36).epsilon(1e-12));
      CHECK(segs[0].end_s == doctest::Approx(0.48).epsilon(1e-12));
    }

    SUBCASE("a boundary at frame zero clamps to the clip start") {
      pts.scores.assign(10, 0.0);
      pts.scores[0] = 1.0;
      const auto segs = points_to_segments(pts, {25, 1});
      REQUIRE(segs.size() == 1);
      CHECK(segs[0].start_s == 0.0);
      CHECK(segs[0].end_s == 0.0);
    }
  }

  TEST_CASE("boundary-frame count is monotone in the threshold") {
    // Raising the threshold shrinks the boundary set; note that the segment
    // count itself can rise when a run splits, so the set size is the
    // monotone quantity.
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      FramePointScores pts;
      pts.scores.resize(40);
      for (double& s : pts.scores) s = rng.next_unit();
      int prev_boundaries = 41;
      for (double threshold = 0.0; threshold <= 1.0; threshold += 0.1) {
        const int boundaries = static_cast<int>(
            std::count_if(pts.scores.begin(), pts.scores.end(),
                          [&](double s) { return s >= threshold; }));
        CHECK(boundaries <= prev_boundaries);
        prev_boundaries = boundaries;
        pts.threshold = threshold;
        const auto segs = points_to_segments(pts, {25, 1});
        CHECK(segs.size() <= static_cast<std::size_t>(boundaries == 0 ? 0 : boundaries));
        for (std::size_t i = 0; i < segs.size(); ++i) {
          if (i > 0) CHECK(segs[i - 1].end_s < segs[i].start_s);
          // spans at least one frame interval unless clamped at t = 0
          if (segs[i].start_s > 0.0) {
            CHECK(segs[i].end_s - segs[i].start_s >= 1.0 / 25.0 - 1e-12);
          }
        }
      }
    }
  }

  TEST_CASE("oracle detector identity, drop, and jitter bounds") {
    const std::vector<TransitionSegment> labels = {
        {2.0, 2.0, "cut"}, {5.0, 6.0, "fade"}, {9.5, 11.0, "wipeleft"}};

    const DetectionResult exact = oracle_detector(labels, 0.0, 0.0, 1, 20.0);
    CHECK(exact.segments == labels);

    const DetectionResult dropped = oracle_detector(labels, 0.0, 1.0, 1, 20.0);
    CHECK(dropped.segments.empty());

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const DetectionResult jittered = oracle_detector(labels, 0.2, 0.0, seed, 20.0);
      REQUIRE(jittered.segments.size() == labels.size());
      for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto& p = jittered.segments[i];
        CHECK(p.start_s <= p.end_s);
        CHECK(p.start_s >= 0.0);
        CHECK(p.end_s <= 20.0);
        CHECK(std::abs(p.start_s - labels[i].start_s) <= 0.2 + 1e-12);
        CHECK(std::abs(p.end_s - labels[i].end_s) <= 0.2 + 1e-12);
      }
    }
  }

  TEST_CASE("exact oracle scores perfectly at every tolerance") {
    const std::vector<TransitionSegment> labels = {
        {2.0, 2.0, "cut"}, {5.0, 6.04, "fade"}, {9.48, 11.0, "dissolve"}};
    const DetectionResult preds = oracle_detector(labels, 0.0, 0.0, 3, 20.0);
    const MetricsReport report = evaluate(preds, labels, {25, 1}, 20.0);
    for (const TauMetrics& row : report.rows) {
      CHECK(row.seg().f1 == 1.0);
      CHECK(row.frame().f1 == 1.0);
      REQUIRE(row.abe().has_value());
      CHECK(*row.abe() == 0.0);
    }
  }

  TEST_CASE("close segments merge when a minimum gap is set") {
    std::vector<TransitionSegment> segs = {{1.0, 2.0, ""}, {2.2, 3.0, ""}, {8.0, 8.0, ""}};
    const auto merged = merge_close_segments(segs, 0.5);
    REQUIRE(merged.size() == 2);
    CHECK(merged[0].start_s == 1.0);
    CHECK(merged[0].end_s == 3.0);
    CHECK(merge_close_segments(segs, 0.0) == segs);
  }

  TEST_CASE("external detector pass-through and failure modes") {
    const fs::path clip = temp_stdv();

    SUBCASE("empty array") {
      const DetectionResult res =
          run_external_detector({{"/bin/sh", "-c", "echo []"}}, clip, 10.0);
      CHECK(res.segments.empty());
      CHECK(res.wall_time_s > 0.0);
    }

    SUBCASE("segments pass through") {
      const DetectionResult res = run_external_detector(
          {{"/bin/sh", "-c", R"(echo '[{"start":1.0,"end":2.0}]')"}}, clip, 10.0);
      REQUIRE(res.segments.size() == 1);
      CHECK(res.segments[0].start_s == 1.0);
      CHECK(res.segments[0].end_s == 2.0);
    }

    SUBCASE("malformed output") {
      CHECK_THROWS_AS(run_external_detector({{"/bin/sh", "-c", "echo not json"}}, clip, 10.0),
                      ParseError);
    }

    SUBCASE("nonzero exit carries diagnostics") {
      CHECK_THROWS_AS(
          run_external_detector({{"/bin/sh", "-c", "echo boom >&2; exit 3"}}, clip, 10.0),
          DetectorError);
      try {
        run_external_detector({{"/bin/sh", "-c", "echo boom >&2; exit 3"}}, clip, 10.0);
      } catch (const DetectorError& e) {
        CHECK(std::string(e.what()).find("boom") != std::string::npos);
      }
    }

    SUBCASE("deadline enforcement") {
      CHECK_THROWS_AS(run_external_detector({{"/bin/sh", "-c", "sleep 5"}}, clip, 0.3),
                      TimeoutError);
    }
  }
}
