#include "stdkit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "stdkit/error.hpp"
#include "stdkit/rng.hpp"

namespace stdkit {

namespace {

enum class EffectId {
  cut,
  // blend family
  fade, fadefast, fadeslow, fadegrays, fadeblack, fadewhite, dissolve, distance,
  // wipe family (edge, corner, diagonal)
  wipeleft, wiperight, wipeup, wipedown, wipetl, wipetr, wipebl, wipebr,
  diagtl, diagtr, diagbl, diagbr,
  // translation family
  slideleft, slideright, slideup, slidedown,
  smoothleft, smoothright, smoothup, smoothdown,
  coverleft, coverright, coverup, coverdown,
  revealleft, revealright, revealup, revealdown,
  // aperture family
  circleopen, circleclose, circlecrop, rectcrop, vertopen, vertclose, horzopen, horzclose,
  radial,
  // slice / wind family
  hlslice, hrslice, vuslice, vdslice, hlwind, hrwind, vuwind, vdwind,
  // geometric family
  squeezeh, squeezev, zoomin,
  // blur family
  hblur, pixelize,
};

struct EffectEntry {
  const char* name;
  EffectId id;
};

constexpr EffectEntry kEffects[] = {
    {"cut", EffectId::cut},
    {"fade", EffectId::fade},
    {"fadefast", EffectId::fadefast},
    {"fadeslow", EffectId::fadeslow},
    {"fadegrays", EffectId::fadegrays},
    {"fadeblack", EffectId::fadeblack},
    {"fadewhite", EffectId::fadewhite},
    {"dissolve", EffectId::dissolve},
    {"distance", EffectId::distance},
    {"wipeleft", EffectId::wipeleft},
    {"wiperight", EffectId::wiperight},
    {"wipeup", EffectId::wipeup},
    {"wipedown", EffectId::wipedown},
    {"wipetl", EffectId::wipetl},
    {"wipetr", EffectId::wipetr},
    {"wipebl", EffectId::wipebl},
    {"wipebr", EffectId::wipebr},
    {"diagtl", EffectId::diagtl},
    {"diagtr", EffectId::diagtr},
    {"diagbl", EffectId::diagbl},
    {"diagbr", EffectId::diagbr},
    {"slideleft", EffectId::slideleft},
    {"slideright", EffectId::slideright},
    {"slideup", EffectId::slideup},
    {"slidedown", EffectId::slidedown},
    {"smoothleft", EffectId::smoothleft},
    {"smoothright", EffectId::smoothright},
    {"smoothup", EffectId::smoothup},
    {"smoothdown", EffectId::smoothdown},
    {"coverleft", EffectId::coverleft},
    {"coverright", EffectId::coverright},
    {"coverup", EffectId::coverup},
    {"coverdown", EffectId::coverdown},
    {"revealleft", EffectId::revealleft},
    {"revealright", EffectId::revealright},
    {"revealup", EffectId::revealup},
    {"revealdown", EffectId::revealdown},
    {"circleopen", EffectId::circleopen},
    {"circleclose", EffectId::circleclose},
    {"circlecrop", EffectId::circlecrop},
    {"rectcrop", EffectId::rectcrop},
    {"vertopen", EffectId::vertopen},
    {"vertclose", EffectId::vertclose},
    {"horzopen", EffectId::horzopen},
    {"horzclose", EffectId::horzclose},
    {"radial", EffectId::radial},
    {"hlslice", EffectId::hlslice},
    {"hrslice", EffectId::hrslice},
    {"vuslice", EffectId::vuslice},
    {"vdslice", EffectId::vdslice},
    {"hlwind", EffectId::hlwind},
    {"hrwind", EffectId::hrwind},
    {"vuwind", EffectId::vuwind},
    {"vdwind", EffectId::vdwind},
    {"squeezeh", EffectId::squeezeh},
    {"squeezev", EffectId::squeezev},
    {"zoomin", EffectId::zoomin},
    {"hblur", EffectId::hblur},
    {"pixelize", EffectId::pixelize},
};

const std::unordered_map<std::string_view, EffectId>& effect_index() {
  static const auto* map = [] {
    auto* m = new std::unordered_map<std::string_view, EffectId>;
    for (const auto& e : kEffects) m->emplace(e.name, e.id);
    return m;
  }();
  return *map;
}

std::uint8_t round8(double v) {
  return static_cast<std::uint8_t>(std::clamp<long>(std::lround(v), 0, 255));
}

double luma(const std::uint8_t* px) { return 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2]; }

// Uniform-weight blend, one rounding at the end.
Frame blend_frames(const Frame& a, const Frame& b, double w) {
  Frame out(a.width, a.height);
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    const double av = a.pixels[i];
    out.pixels[i] = round8(av + (static_cast<double>(b.pixels[i]) - av) * w);
  }
  return out;
}

Frame blend_to_solid(const Frame& a, std::uint8_t level, double w) {
  Frame out(a.width, a.height);
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    const double av = a.pixels[i];
    out.pixels[i] = round8(av + (static_cast<double>(level) - av) * w);
  }
  return out;
}

Frame blend_from_solid(std::uint8_t level, const Frame& b, double w) {
  Frame out(b.width, b.height);
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    const double lv = level;
    out.pixels[i] = round8(lv + (static_cast<double>(b.pixels[i]) - lv) * w);
  }
  return out;
}

// Copies each pixel from `in` where take_in(x, y) holds, from `out` otherwise.
template <typename TakeIn>
Frame masked(const Frame& out_frame, const Frame& in_frame, TakeIn&& take_in) {
  Frame res(out_frame.width, out_frame.height);
  for (int y = 0; y < res.height; ++y) {
    for (int x = 0; x < res.width; ++x) {
      const std::uint8_t* src = take_in(x, y) ? in_frame.px(x, y) : out_frame.px(x, y);
      std::uint8_t* dst = res.px(x, y);
      dst[0] = src[0];
      dst[1] = src[1];
      dst[2] = src[2];
    }
  }
  return res;
}

double smoothstep(double p) { return 3.0 * p * p - 2.0 * p * p * p; }

Frame render_fadegrays(const Frame& out_f, const Frame& in_f, double p) {
  Frame res(out_f.width, out_f.height);
  const double desat_out = std::min(1.0, 2.0 * p);
  const double resat_in = std::max(0.0, 2.0 * p - 1.0);
  for (int y = 0; y < res.height; ++y) {
    for (int x = 0; x < res.width; ++x) {
      const std::uint8_t* o = out_f.px(x, y);
      const std::uint8_t* i = in_f.px(x, y);
      const double go = luma(o);
      const double gi = luma(i);
      std::uint8_t* dst = res.px(x, y);
      for (int c = 0; c < 3; ++c) {
        const double ov = o[c] + (go - o[c]) * desat_out;
        const double iv = gi + (i[c] - gi) * resat_in;
        dst[c] = round8(ov + (iv - ov) * p);
      }
    }
  }
  return res;
}

Frame render_distance(const Frame& out_f, const Frame& in_f, double p) {
  const double norm = 255.0 * std::sqrt(3.0);
  return masked(out_f, in_f, [&](int x, int y) {
    const std::uint8_t* o = out_f.px(x, y);
    const std::uint8_t* i = in_f.px(x, y);
    double d2 = 0;
    for (int c = 0; c < 3; ++c) {
      const double d = static_cast<double>(o[c]) - i[c];
      d2 += d * d;
    }
    return std::sqrt(d2) / norm <= p;
  });
}

// Translation family; `off` is the eased pixel offset.
Frame render_translation(const Frame& out_f, const Frame& in_f, EffectId id, int off) {
  const int w = out_f.width;
  const int h = out_f.height;
  Frame res(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::uint8_t* src = nullptr;
      switch (id) {
        case EffectId::slideleft:
          src = x < w - off ? out_f.px(x + off, y) : in_f.px(x - (w - off), y);
          break;
        case EffectId::slideright:
          src = x >= off ? out_f.px(x - off, y) : in_f.px(x + (w - off), y);
          break;
        case EffectId::slideup:
          src = y < h - off ? out_f.px(x, y + off) : in_f.px(x, y - (h - off));
          break;
        case EffectId::slidedown:
          src = y >= off ? out_f.px(x, y - off) : in_f.px(x, y + (h - off));
          break;
        case EffectId::smoothleft:
          src = x < w - off ? out_f.px(x + off, y) : in_f.px(x - (w - off), y);
          break;
        case EffectId::smoothright:
          src = x >= off ? out_f.px(x - off, y) : in_f.px(x + (w - off), y);
          break;
        case EffectId::smoothup:
          src = y < h - off ? out_f.px(x, y + off) : in_f.px(x, y - (h - off));
          break;
        case EffectId::smoothdown:
          src = y >= off ? out_f.px(x, y - off) : in_f.px(x, y + (h - off));
          break;
        case EffectId::coverleft:
          src = x >= w - off ? in_f.px(x - (w - off), y) : out_f.px(x, y);
          break;
        case EffectId::coverright:
          src = x < off ? in_f.px(x + (w - off), y) : out_f.px(x, y);
          break;
        case EffectId::coverup:
          src = y >= h - off ? in_f.px(x, y - (h - off)) : out_f.px(x, y);
          break;
        case EffectId::coverdown:
          src = y < off ? in_f.px(x, y + (h - off)) : out_f.px(x, y);
          break;
        case EffectId::revealleft:
          src = x < w - off ? out_f.px(x + off, y) : in_f.px(x, y);
          break;
        case EffectId::revealright:
          src = x >= off ? out_f.px(x - off, y) : in_f.px(x, y);
          break;
        case EffectId::revealup:
          src = y < h - off ? out_f.px(x, y + off) : in_f.px(x, y);
          break;
        default:  // revealdown
          src = y >= off ? out_f.px(x, y - off) : in_f.px(x, y);
          break;
      }
      std::uint8_t* dst = res.px(x, y);
      dst[0] = src[0];
      dst[1] = src[1];
      dst[2] = src[2];
    }
  }
  return res;
}

Frame render_circlecrop(const Frame& out_f, const Frame& in_f, double p) {
  const int w = out_f.width;
  const int h = out_f.height;
  const double cx = (w - 1) / 2.0;
  const double cy = (h - 1) / 2.0;
  const double rmax = std::hypot(std::max(cx, w - 1 - cx), std::max(cy, h - 1 - cy));
  Frame res(w, h);  // black outside the aperture
  const bool second_half = p > 0.5;
  const double r = second_half ? (2.0 * p - 1.0) * rmax : (1.0 - 2.0 * p) * rmax;
  const Frame& src = second_half ? in_f : out_f;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (std::hypot(x - cx, y - cy) <= r) {
        const std::uint8_t* s = src.px(x, y);
        std::uint8_t* dst = res.px(x, y);
        dst[0] = s[0];
        dst[1] = s[1];
        dst[2] = s[2];
      }
    }
  }
  return res;
}

// Slice and wind family: strips of width 16 perpendicular to the sweep, each
// with its own progress. Slices stagger strips linearly; winds jitter them.
Frame render_strips(const Frame& out_f, const Frame& in_f, EffectId id, double p,
                    std::uint64_t seed) {
  const int w = out_f.width;
  const int h = out_f.height;
  constexpr int kStrip = 16;
  constexpr double kStagger = 0.5;
  const bool horizontal_sweep = id == EffectId::hlslice || id == EffectId::hrslice ||
                                id == EffectId::hlwind || id == EffectId::hrwind;
  const int extent_perp = horizontal_sweep ? h : w;
  const int strips = (extent_perp + kStrip - 1) / kStrip;
  const bool wind = id == EffectId::hlwind || id == EffectId::hrwind ||
                    id == EffectId::vuwind || id == EffectId::vdwind;

  std::vector<double> ps(static_cast<std::size_t>(strips));
  for (int s = 0; s < strips; ++s) {
    const double shift = wind ? hash_unit(seed, static_cast<std::uint64_t>(s))
                              : (strips > 1 ? static_cast<double>(s) / (strips - 1) : 0.0);
    ps[static_cast<std::size_t>(s)] = std::clamp((1.0 + kStagger) * p - kStagger * shift, 0.0, 1.0);
  }

  return masked(out_f, in_f, [&](int x, int y) {
    const int strip = (horizontal_sweep ? y : x) / kStrip;
    const double sp = ps[static_cast<std::size_t>(strip)];
    switch (id) {
      case EffectId::hlslice:
      case EffectId::hlwind:
        return static_cast<double>(x) < w * sp;
      case EffectId::hrslice:
      case EffectId::hrwind:
        return static_cast<double>(x) >= w * (1.0 - sp);
      case EffectId::vuslice:  // slices sweep in from the top
      case EffectId::vdwind:   // wind sweeps downwards from the top
        return static_cast<double>(y) < h * sp;
      default:  // vdslice, vuwind: from the bottom
        return static_cast<double>(y) >= h * (1.0 - sp);
    }
  });
}

Frame render_squeeze(const Frame& out_f, const Frame& in_f, double p, bool horizontal) {
  const int w = out_f.width;
  const int h = out_f.height;
  const double cx = (w - 1) / 2.0;
  const double cy = (h - 1) / 2.0;
  const double s = 1.0 - p;
  Frame res(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double t = horizontal ? x - cx : y - cy;
      const double half = (horizontal ? w : h) * s / 2.0;
      const std::uint8_t* src;
      if (std::abs(t) < half) {
        if (horizontal) {
          const int sx = std::clamp<int>(static_cast<int>(std::lround(cx + t / s)), 0, w - 1);
          src = out_f.px(sx, y);
        } else {
          const int sy = std::clamp<int>(static_cast<int>(std::lround(cy + t / s)), 0, h - 1);
          src = out_f.px(x, sy);
        }
      } else {
        src = in_f.px(x, y);
      }
      std::uint8_t* dst = res.px(x, y);
      dst[0] = src[0];
      dst[1] = src[1];
      dst[2] = src[2];
    }
  }
  return res;
}

Frame render_zoomin(const Frame& out_f, const Frame& in_f, double p) {
  const int w = out_f.width;
  const int h = out_f.height;
  const double cx = (w - 1) / 2.0;
  const double cy = (h - 1) / 2.0;
  const double scale = 1.0 + p;
  Frame res(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int sx = std::clamp<int>(static_cast<int>(std::lround(cx + (x - cx) / scale)), 0, w - 1);
      const int sy = std::clamp<int>(static_cast<int>(std::lround(cy + (y - cy) / scale)), 0, h - 1);
      const std::uint8_t* o = out_f.px(sx, sy);
      const std::uint8_t* i = in_f.px(x, y);
      std::uint8_t* dst = res.px(x, y);
      for (int c = 0; c < 3; ++c) {
        dst[c] = round8(o[c] + (static_cast<double>(i[c]) - o[c]) * p);
      }
    }
  }
  return res;
}

std::vector<double> blend_values(const Frame& a, const Frame& b, double w) {
  std::vector<double> out(a.pixels.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = a.pixels[i] + (static_cast<double>(b.pixels[i]) - a.pixels[i]) * w;
  }
  return out;
}

Frame render_hblur(const Frame& out_f, const Frame& in_f, double p) {
  const int w = out_f.width;
  const int h = out_f.height;
  const double strength = 4.0 * p * (1.0 - p);
  const int radius = static_cast<int>(std::ceil(strength * 16.0));
  const std::vector<double> base = blend_values(out_f, in_f, p);
  Frame res(w, h);
  for (int y = 0; y < h; ++y) {
    // running horizontal box sum per channel, clamped at the row ends
    for (int x = 0; x < w; ++x) {
      double acc[3] = {0, 0, 0};
      int count = 0;
      for (int k = std::max(0, x - radius); k <= std::min(w - 1, x + radius); ++k) {
        const std::size_t i = 3 * (static_cast<std::size_t>(y) * w + k);
        acc[0] += base[i];
        acc[1] += base[i + 1];
        acc[2] += base[i + 2];
        ++count;
      }
      std::uint8_t* dst = res.px(x, y);
      for (int c = 0; c < 3; ++c) dst[c] = round8(acc[c] / count);
    }
  }
  return res;
}

Frame render_pixelize(const Frame& out_f, const Frame& in_f, double p) {
  const int w = out_f.width;
  const int h = out_f.height;
  const double strength = 4.0 * p * (1.0 - p);
  const int side = std::max(1, static_cast<int>(std::ceil(strength * 32.0)));
  const std::vector<double> base = blend_values(out_f, in_f, p);
  Frame res(w, h);
  for (int by = 0; by < h; by += side) {
    const int bh = std::min(side, h - by);
    for (int bx = 0; bx < w; bx += side) {
      const int bw = std::min(side, w - bx);
      double acc[3] = {0, 0, 0};
      for (int y = by; y < by + bh; ++y) {
        for (int x = bx; x < bx + bw; ++x) {
          const std::size_t i = 3 * (static_cast<std::size_t>(y) * w + x);
          acc[0] += base[i];
          acc[1] += base[i + 1];
          acc[2] += base[i + 2];
        }
      }
      const int n = bw * bh;
      const std::uint8_t block[3] = {round8(acc[0] / n), round8(acc[1] / n), round8(acc[2] / n)};
      for (int y = by; y < by + bh; ++y) {
        for (int x = bx; x < bx + bw; ++x) {
          std::uint8_t* dst = res.px(x, y);
          dst[0] = block[0];
          dst[1] = block[1];
          dst[2] = block[2];
        }
      }
    }
  }
  return res;
}

}  // namespace

const std::vector<std::string>& effect_catalog() {
  static const auto* catalog = [] {
    auto* v = new std::vector<std::string>;
    for (const auto& e : kEffects) v->emplace_back(e.name);
    return v;
  }();
  return *catalog;
}

bool is_known_effect(std::string_view effect) { return effect_index().contains(effect); }

Easing easing_for(std::string_view effect) {
  if (effect == "fadefast") return Easing::fast;
  if (effect == "fadeslow") return Easing::slow;
  if (effect.starts_with("smooth")) return Easing::smooth;
  return Easing::linear;
}

double compute_tmax(double dur_a_s, double dur_b_s, double cap_s) {
  if (dur_a_s <= 0 || dur_b_s <= 0) {
    throw PreconditionError("shot durations must be positive");
  }
  if (cap_s <= 0) throw PreconditionError("duration cap must be positive");
  return std::min({cap_s, 0.5 * dur_a_s, 0.5 * dur_b_s});
}

SynthPlan sample_plan_for_durations(const std::vector<std::int64_t>& shot_frames, Fps fps,
                                    std::uint64_t seed, double cap_s, double long_fraction) {
  if (shot_frames.size() < 2) throw PreconditionError("a plan needs at least two shots");
  for (const std::int64_t n : shot_frames) {
    if (n <= 0) throw PreconditionError("shot frame counts must be positive");
  }
  const double hz = fps.hz();
  const auto& catalog = effect_catalog();

  SynthPlan plan;
  plan.seed = seed;
  plan.specs.reserve(shot_frames.size() - 1);
  for (std::size_t i = 0; i + 1 < shot_frames.size(); ++i) {
    const std::int64_t na = shot_frames[i];
    const std::int64_t nb = shot_frames[i + 1];
    const double tmax = compute_tmax(fps.frame_time(na), fps.frame_time(nb), cap_s);
    const std::int64_t max_frames =
        std::min({static_cast<std::int64_t>(std::floor(cap_s * hz + 1e-9)), na / 2, nb / 2});

    Rng rng(mix_seed(seed, i));
    EffectSpec spec;
    spec.effect = catalog[rng.next_below(catalog.size())];
    spec.seed = mix_seed(seed, i);
    spec.easing = easing_for(spec.effect);
    if (spec.effect == "cut") {
      spec.duration_s = 0.0;  // a sampled duration never applies to cuts
    } else {
      const double split = (std::floor(hz) + 0.5) / hz;  // quantizes to > 1 s above it
      double d;
      if (long_fraction >= 0.0 && tmax > split) {
        d = rng.next_unit() < long_fraction ? rng.next_range(split, tmax)
                                            : rng.next_range(0.0, split);
      } else {
        d = rng.next_range(0.0, tmax);
      }
      const std::int64_t m = std::min<std::int64_t>(std::llround(d * hz), max_frames);
      spec.duration_s = fps.frame_time(m);
    }
    plan.specs.push_back(std::move(spec));
  }
  return plan;
}

SynthPlan sample_plan(const std::vector<VideoClip>& shots, std::uint64_t seed, double cap_s,
                      double long_fraction) {
  if (shots.size() < 2) throw PreconditionError("a plan needs at least two shots");
  std::vector<std::int64_t> frames;
  frames.reserve(shots.size());
  for (const VideoClip& shot : shots) {
    validate(shot);
    if (shot.frames.empty()) throw PreconditionError("shots must be non-empty");
    if (shot.width() != shots.front().width() || shot.height() != shots.front().height() ||
        !(shot.fps == shots.front().fps)) {
      throw PreconditionError("shots must share dimensions and fps");
    }
    frames.push_back(static_cast<std::int64_t>(shot.frames.size()));
  }
  return sample_plan_for_durations(frames, shots.front().fps, seed, cap_s, long_fraction);
}

Frame render_transition(const Frame& out_frame, const Frame& in_frame, std::string_view effect,
                        double p, std::uint64_t seed) {
  const auto it = effect_index().find(effect);
  if (it == effect_index().end()) {
    throw CatalogError("unknown effect '" + std::string(effect) + "'");
  }
  if (out_frame.width != in_frame.width || out_frame.height != in_frame.height) {
    throw PreconditionError("transition frames must share dimensions");
  }
  if (!(p >= 0.0 && p <= 1.0)) throw PreconditionError("progress must be in [0, 1]");

  if (p == 0.0) return out_frame;
  if (p == 1.0) return in_frame;

  const int w = out_frame.width;
  const int h = out_frame.height;
  const double cx = (w - 1) / 2.0;
  const double cy = (h - 1) / 2.0;
  // pixel centers normalized to (0, 1) for corner wipes
  const auto u = [&](int x) { return (x + 0.5) / w; };
  const auto v = [&](int y) { return (y + 0.5) / h; };

  switch (it->second) {
    case EffectId::cut:
      // a cut never renders an intermediate frame; p is quantized to 0 or 1
      return p < 0.5 ? out_frame : in_frame;
    case EffectId::fade:
      return blend_frames(out_frame, in_frame, p);
    case EffectId::fadefast:
      return blend_frames(out_frame, in_frame, std::sqrt(p));
    case EffectId::fadeslow:
      return blend_frames(out_frame, in_frame, p * p);
    case EffectId::fadegrays:
      return render_fadegrays(out_frame, in_frame, p);
    case EffectId::fadeblack:
      return p <= 0.5 ? blend_to_solid(out_frame, 0, 2.0 * p)
                      : blend_from_solid(0, in_frame, 2.0 * p - 1.0);
    case EffectId::fadewhite:
      return p <= 0.5 ? blend_to_solid(out_frame, 255, 2.0 * p)
                      : blend_from_solid(255, in_frame, 2.0 * p - 1.0);
    case EffectId::dissolve:
      return masked(out_frame, in_frame, [&](int x, int y) {
        return hash_unit(seed, static_cast<std::uint64_t>(x), static_cast<std::uint64_t>(y)) < p;
      });
    case EffectId::distance:
      return render_distance(out_frame, in_frame, p);
    case EffectId::wipeleft:
      return masked(out_frame, in_frame,
                    [&](int x, int) { return static_cast<double>(x) >= w * (1.0 - p); });
    case EffectId::wiperight:
      return masked(out_frame, in_frame,
                    [&](int x, int) { return static_cast<double>(x) < w * p; });
    case EffectId::wipeup:
      return masked(out_frame, in_frame,
                    [&](int, int y) { return static_cast<double>(y) >= h * (1.0 - p); });
    case EffectId::wipedown:
      return masked(out_frame, in_frame,
                    [&](int, int y) { return static_cast<double>(y) < h * p; });
    case EffectId::wipetl:
      return masked(out_frame, in_frame,
                    [&](int x, int y) { return u(x) + v(y) >= 2.0 * (1.0 - p); });
    case EffectId::wipetr:
      return masked(out_frame, in_frame,
                    [&](int x, int y) { return (1.0 - u(x)) + v(y) >= 2.0 * (1.0 - p); });
    case EffectId::wipebl:
      return masked(out_frame, in_frame,
                    [&](int x, int y) { return u(x) + (1.0 - v(y)) >= 2.0 * (1.0 - p); });
    case EffectId::wipebr:
      return masked(out_frame, in_frame, [&](int x, int y) {
        return (1.0 - u(x)) + (1.0 - v(y)) >= 2.0 * (1.0 - p);
      });
    case EffectId::diagtl:
      return masked(out_frame, in_frame, [&](int x, int y) { return u(x) + v(y) <= 2.0 * p; });
    case EffectId::diagtr:
      return masked(out_frame, in_frame,
                    [&](int x, int y) { return (1.0 - u(x)) + v(y) <= 2.0 * p; });
    case EffectId::diagbl:
      return masked(out_frame, in_frame,
                    [&](int x, int y) { return u(x) + (1.0 - v(y)) <= 2.0 * p; });
    case EffectId::diagbr:
      return masked(out_frame, in_frame,
                    [&](int x, int y) { return (1.0 - u(x)) + (1.0 - v(y)) <= 2.0 * p; });
    case EffectId::slideleft:
    case EffectId::slideright:
    case EffectId::slideup:
    case EffectId::slidedown:
    case EffectId::coverleft:
    case EffectId::coverright:
    case EffectId::coverup:
    case EffectId::coverdown:
    case EffectId::revealleft:
    case EffectId::revealright:
    case EffectId::revealup:
    case EffectId::revealdown: {
      const bool vertical = it->second == EffectId::slideup || it->second == EffectId::slidedown ||
                            it->second == EffectId::coverup || it->second == EffectId::coverdown ||
                            it->second == EffectId::revealup || it->second == EffectId::revealdown;
      const int off = static_cast<int>(std::floor(p * (vertical ? h : w)));
      return render_translation(out_frame, in_frame, it->second, off);
    }
    case EffectId::smoothleft:
    case EffectId::smoothright:
    case EffectId::smoothup:
    case EffectId::smoothdown: {
      const bool vertical =
          it->second == EffectId::smoothup || it->second == EffectId::smoothdown;
      const int off = static_cast<int>(std::floor(smoothstep(p) * (vertical ? h : w)));
      return render_translation(out_frame, in_frame, it->second, off);
    }
    case EffectId::circleopen: {
      const double rmax = std::hypot(std::max(cx, w - 1 - cx), std::max(cy, h - 1 - cy));
      return masked(out_frame, in_frame,
                    [&](int x, int y) { return std::hypot(x - cx, y - cy) <= p * rmax; });
    }
    case EffectId::circleclose: {
      const double rmax = std::hypot(std::max(cx, w - 1 - cx), std::max(cy, h - 1 - cy));
      return masked(out_frame, in_frame,
                    [&](int x, int y) { return std::hypot(x - cx, y - cy) >= (1.0 - p) * rmax; });
    }
    case EffectId::circlecrop:
      return render_circlecrop(out_frame, in_frame, p);
    case EffectId::rectcrop:
      return masked(out_frame, in_frame, [&](int x, int y) {
        return std::abs(x - cx) <= p * w / 2.0 && std::abs(y - cy) <= p * h / 2.0;
      });
    case EffectId::vertopen:
      return masked(out_frame, in_frame,
                    [&](int x, int) { return std::abs(x - cx) <= p * w / 2.0; });
    case EffectId::vertclose:
      return masked(out_frame, in_frame,
                    [&](int x, int) { return std::abs(x - cx) >= (1.0 - p) * w / 2.0; });
    case EffectId::horzopen:
      return masked(out_frame, in_frame,
                    [&](int, int y) { return std::abs(y - cy) <= p * h / 2.0; });
    case EffectId::horzclose:
      return masked(out_frame, in_frame,
                    [&](int, int y) { return std::abs(y - cy) >= (1.0 - p) * h / 2.0; });
    case EffectId::radial: {
      const double limit = 2.0 * std::numbers::pi * p;
      return masked(out_frame, in_frame, [&](int x, int y) {
        double a = std::atan2(y - cy, x - cx);
        if (a < 0) a += 2.0 * std::numbers::pi;
        return a <= limit;
      });
    }
    case EffectId::hlslice:
    case EffectId::hrslice:
    case EffectId::vuslice:
    case EffectId::vdslice:
    case EffectId::hlwind:
    case EffectId::hrwind:
    case EffectId::vuwind:
    case EffectId::vdwind:
      return render_strips(out_frame, in_frame, it->second, p, seed);
    case EffectId::squeezeh:
      return render_squeeze(out_frame, in_frame, p, /*horizontal=*/true);
    case EffectId::squeezev:
      return render_squeeze(out_frame, in_frame, p, /*horizontal=*/false);
    case EffectId::zoomin:
      return render_zoomin(out_frame, in_frame, p);
    case EffectId::hblur:
      return render_hblur(out_frame, in_frame, p);
    case EffectId::pixelize:
      return render_pixelize(out_frame, in_frame, p);
  }
  throw CatalogError("unhandled effect '" + std::string(effect) + "'");
}

SynthResult synthesize(const std::vector<VideoClip>& shots, const SynthPlan& plan) {
  if (shots.size() < 2) throw PreconditionError("synthesis needs at least two shots");
  if (plan.specs.size() != shots.size() - 1) {
    throw InvariantError("plan must carry exactly one spec per adjacent shot pair");
  }
  const Fps fps = shots.front().fps;
  for (const VideoClip& shot : shots) {
    validate(shot);
    if (shot.frames.empty()) throw PreconditionError("shots must be non-empty");
    if (shot.width() != shots.front().width() || shot.height() != shots.front().height() ||
        !(shot.fps == fps)) {
      throw PreconditionError("shots must share dimensions and fps");
    }
  }

  const double hz = fps.hz();
  const std::size_t n_shots = shots.size();
  std::vector<std::int64_t> m(plan.specs.size());  // transition lengths in frame intervals
  for (std::size_t i = 0; i < plan.specs.size(); ++i) {
    const EffectSpec& spec = plan.specs[i];
    if (!is_known_effect(spec.effect)) {
      throw CatalogError("unknown effect '" + spec.effect + "' in plan");
    }
    if (spec.effect == "cut" && spec.duration_s != 0.0) {
      throw InvariantError("cut transitions must have zero duration");
    }
    if (spec.duration_s < 0.0) throw InvariantError("transition durations must be >= 0");
    m[i] = std::llround(spec.duration_s * hz);
    const auto na = static_cast<std::int64_t>(shots[i].frames.size());
    const auto nb = static_cast<std::int64_t>(shots[i + 1].frames.size());
    if (2 * m[i] > na || 2 * m[i] > nb) {
      throw InvariantError("transition duration exceeds half of an adjacent shot");
    }
  }

  // Shot i + 1 starts m[i] frames before shot i ends.
  std::vector<std::int64_t> offset(n_shots, 0);
  for (std::size_t i = 0; i + 1 < n_shots; ++i) {
    offset[i + 1] = offset[i] + static_cast<std::int64_t>(shots[i].frames.size()) - m[i];
  }
  const std::int64_t total =
      offset[n_shots - 1] + static_cast<std::int64_t>(shots.back().frames.size());

  SynthResult result;
  result.clip.fps = fps;
  result.clip.frames.reserve(static_cast<std::size_t>(total));

  for (std::size_t i = 0; i < n_shots; ++i) {
    const VideoClip& shot = shots[i];
    const auto n_i = static_cast<std::int64_t>(shot.frames.size());
    const std::int64_t pure_end = i + 1 < n_shots ? offset[i + 1] : offset[i] + n_i;
    const auto cursor = static_cast<std::int64_t>(result.clip.frames.size());
    for (std::int64_t k = cursor; k < pure_end; ++k) {
      result.clip.frames.push_back(shot.frames[static_cast<std::size_t>(k - offset[i])]);
    }

    if (i + 1 == n_shots) break;
    const EffectSpec& spec = plan.specs[i];
    const VideoClip& next = shots[i + 1];
    const std::int64_t start_f = offset[i + 1];
    const std::int64_t end_f = start_f + m[i];
    result.labels.push_back(
        {fps.frame_time(start_f), fps.frame_time(end_f), spec.effect});

    if (spec.effect == "cut") continue;  // nothing rendered; the splice is instantaneous
    if (m[i] == 0) {
      // a duration that quantized to zero renders one half-blended frame
      result.clip.frames.push_back(
          render_transition(shot.frames.back(), next.frames.front(), spec.effect, 0.5, spec.seed));
      continue;
    }
    for (std::int64_t j = 0; j <= m[i]; ++j) {
      if (j == 0) {
        result.clip.frames.push_back(shot.frames[static_cast<std::size_t>(start_f - offset[i])]);
      } else if (j == m[i]) {
        result.clip.frames.push_back(next.frames[static_cast<std::size_t>(j)]);
      } else {
        const Frame& out_frame = shot.frames[static_cast<std::size_t>(start_f + j - offset[i])];
        const Frame& in_frame = next.frames[static_cast<std::size_t>(j)];
        result.clip.frames.push_back(render_transition(
            out_frame, in_frame, spec.effect, static_cast<double>(j) / m[i], spec.seed));
      }
    }
  }

  if (static_cast<std::int64_t>(result.clip.frames.size()) != total) {
    throw InvariantError("synthesized frame count does not match the timeline");
  }
  return result;
}

}  // namespace stdkit
