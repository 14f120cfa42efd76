#include "stdkit/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>

#include "stdkit/error.hpp"

namespace stdkit {

namespace {

int clamp_coord(int v, int hi) { return std::clamp(v, 0, hi - 1); }

}  // namespace

FlowField estimate_flow(const Frame& prev, const Frame& curr, int block, int radius) {
  if (prev.width != curr.width || prev.height != curr.height) {
    throw PreconditionError("flow frames must share dimensions");
  }
  if (block < 4) throw PreconditionError("block size must be >= 4");
  if (radius < 1) throw PreconditionError("search radius must be >= 1");

  const int w = curr.width;
  const int h = curr.height;
  const std::vector<std::uint8_t> gp = to_grayscale(prev);
  const std::vector<std::uint8_t> gc = to_grayscale(curr);

  FlowField flow;
  flow.width = w;
  flow.height = h;
  flow.vectors.assign(static_cast<std::size_t>(w) * h * 2, 0.0f);

  for (int ty = 0; ty < h; ty += block) {
    const int th = std::min(block, h - ty);
    for (int tx = 0; tx < w; tx += block) {
      const int tw = std::min(block, w - tx);

      long best_sad = std::numeric_limits<long>::max();
      int best_dx = 0, best_dy = 0, best_l1 = 0;
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          long sad = 0;
          for (int y = ty; y < ty + th; ++y) {
            const int sy = clamp_coord(y - dy, h);
            const std::uint8_t* crow = gc.data() + static_cast<std::size_t>(y) * w;
            const std::uint8_t* prow = gp.data() + static_cast<std::size_t>(sy) * w;
            for (int x = tx; x < tx + tw; ++x) {
              const int sx = clamp_coord(x - dx, w);
              sad += std::abs(static_cast<int>(crow[x]) - static_cast<int>(prow[sx]));
            }
          }
          const int l1 = std::abs(dx) + std::abs(dy);
          const bool better = sad < best_sad ||
                              (sad == best_sad &&
                               (l1 < best_l1 || (l1 == best_l1 && (dy < best_dy ||
                                (dy == best_dy && dx < best_dx)))));
          if (better) {
            best_sad = sad;
            best_dx = dx;
            best_dy = dy;
            best_l1 = l1;
          }
        }
      }

      for (int y = ty; y < ty + th; ++y) {
        for (int x = tx; x < tx + tw; ++x) {
          const std::size_t i = 2 * (static_cast<std::size_t>(y) * w + x);
          flow.vectors[i] = static_cast<float>(best_dx);
          flow.vectors[i + 1] = static_cast<float>(best_dy);
        }
      }
    }
  }
  return flow;
}

double flow_angle_deg(double dx, double dy) {
  double a = std::atan2(dy, dx);
  if (a < 0) a += 2.0 * std::numbers::pi;
  double deg = a * 180.0 / std::numbers::pi;
  if (deg >= 360.0) deg -= 360.0;
  return deg;
}

std::array<std::uint8_t, 3> rgb_from_hsv(double h_deg, double s, double v) {
  const double h = h_deg / 60.0;
  const int sector = static_cast<int>(std::floor(h)) % 6;
  const double f = h - std::floor(h);
  const double p = v * (1.0 - s);
  const double q = v * (1.0 - s * f);
  const double t = v * (1.0 - s * (1.0 - f));
  double r = 0, g = 0, b = 0;
  switch (sector) {
    case 0: r = v; g = t; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    default: r = v; g = p; b = q; break;
  }
  const auto to8 = [](double x) {
    return static_cast<std::uint8_t>(std::clamp<long>(std::lround(x * 255.0), 0, 255));
  };
  return {to8(r), to8(g), to8(b)};
}

Frame flow_to_color(const FlowField& flow) {
  Frame out(flow.width, flow.height);
  double max_mag = 0.0;
  for (int y = 0; y < flow.height; ++y) {
    for (int x = 0; x < flow.width; ++x) {
      max_mag = std::max(max_mag, std::hypot(double(flow.dx(x, y)), double(flow.dy(x, y))));
    }
  }
  const double m_ref = std::max(max_mag, 1.0);
  for (int y = 0; y < flow.height; ++y) {
    for (int x = 0; x < flow.width; ++x) {
      const double dx = flow.dx(x, y);
      const double dy = flow.dy(x, y);
      const double mag = std::hypot(dx, dy);
      const double sat = std::min(1.0, mag / m_ref);
      const double hue = mag > 0 ? flow_angle_deg(dx, dy) : 0.0;
      const auto rgb = rgb_from_hsv(hue, sat, 1.0);
      std::uint8_t* px = out.px(x, y);
      px[0] = rgb[0];
      px[1] = rgb[1];
      px[2] = rgb[2];
    }
  }
  return out;
}

FusedFrame fuse_channels(const Frame& color, const Frame& flow_viz) {
  if (color.width != flow_viz.width || color.height != flow_viz.height) {
    throw PreconditionError("fused channels require identical dimensions");
  }
  FusedFrame out;
  out.width = color.width;
  out.height = color.height;
  out.channels.resize(static_cast<std::size_t>(out.width) * out.height * 6);
  const std::size_t n = static_cast<std::size_t>(out.width) * out.height;
  for (std::size_t i = 0; i < n; ++i) {
    out.channels[6 * i + 0] = color.pixels[3 * i + 0];
    out.channels[6 * i + 1] = color.pixels[3 * i + 1];
    out.channels[6 * i + 2] = color.pixels[3 * i + 2];
    out.channels[6 * i + 3] = flow_viz.pixels[3 * i + 0];
    out.channels[6 * i + 4] = flow_viz.pixels[3 * i + 1];
    out.channels[6 * i + 5] = flow_viz.pixels[3 * i + 2];
  }
  return out;
}

EmbedKernel extend_kernel_zero_pad(const EmbedKernel& k3) {
  if (k3.in_channels != 3) {
    throw PreconditionError("zero-pad extension requires a 3-channel kernel");
  }
  EmbedKernel out = k3;
  out.in_channels = 6;
  out.weights.assign(k3.weights.size() * 2, 0.0);
  const std::size_t block = static_cast<std::size_t>(3) * k3.depth * k3.height * k3.width;
  for (int o = 0; o < k3.out_channels; ++o) {
    std::copy_n(k3.weights.begin() + static_cast<std::ptrdiff_t>(o * block), block,
                out.weights.begin() + static_cast<std::ptrdiff_t>(o * 2 * block));
  }
  return out;
}

Volume volume_from_frames(const std::vector<Frame>& frames) {
  if (frames.empty()) throw PreconditionError("empty frame stack");
  Volume v;
  v.channels = 3;
  v.depth = static_cast<int>(frames.size());
  v.height = frames.front().height;
  v.width = frames.front().width;
  v.values.resize(static_cast<std::size_t>(3) * v.depth * v.height * v.width);
  for (int t = 0; t < v.depth; ++t) {
    const Frame& f = frames[static_cast<std::size_t>(t)];
    if (f.width != v.width || f.height != v.height) {
      throw PreconditionError("stacked frames must share dimensions");
    }
    for (int y = 0; y < v.height; ++y) {
      for (int x = 0; x < v.width; ++x) {
        const std::uint8_t* px = f.px(x, y);
        for (int c = 0; c < 3; ++c) v.values[v.index(c, t, y, x)] = px[c] / 255.0;
      }
    }
  }
  return v;
}

Volume volume_from_fused(const std::vector<FusedFrame>& frames) {
  if (frames.empty()) throw PreconditionError("empty frame stack");
  Volume v;
  v.channels = 6;
  v.depth = static_cast<int>(frames.size());
  v.height = frames.front().height;
  v.width = frames.front().width;
  v.values.resize(static_cast<std::size_t>(6) * v.depth * v.height * v.width);
  for (int t = 0; t < v.depth; ++t) {
    const FusedFrame& f = frames[static_cast<std::size_t>(t)];
    if (f.width != v.width || f.height != v.height) {
      throw PreconditionError("stacked frames must share dimensions");
    }
    for (int y = 0; y < v.height; ++y) {
      for (int x = 0; x < v.width; ++x) {
        const std::uint8_t* px = f.px(x, y);
        for (int c = 0; c < 6; ++c) v.values[v.index(c, t, y, x)] = px[c] / 255.0;
      }
    }
  }
  return v;
}

TokenGrid patch_embed(const Volume& input, const EmbedKernel& kernel) {
  if (kernel.in_channels != input.channels) {
    throw PreconditionError("kernel input channels do not match the frame stack");
  }
  if (input.depth < kernel.depth) {
    throw PreconditionError("temporal depth must be at least the kernel depth");
  }
  TokenGrid out;
  out.channels = kernel.out_channels;
  out.depth = input.depth / kernel.depth;
  out.height = input.height / kernel.height;
  out.width = input.width / kernel.width;
  out.values.assign(
      static_cast<std::size_t>(out.channels) * out.depth * out.height * out.width, 0.0);

  for (int oc = 0; oc < out.channels; ++oc) {
    for (int ot = 0; ot < out.depth; ++ot) {
      for (int oy = 0; oy < out.height; ++oy) {
        for (int ox = 0; ox < out.width; ++ox) {
          double acc = 0.0;
          for (int ic = 0; ic < input.channels; ++ic) {
            for (int kd = 0; kd < kernel.depth; ++kd) {
              for (int ky = 0; ky < kernel.height; ++ky) {
                for (int kx = 0; kx < kernel.width; ++kx) {
                  acc += kernel.at(oc, ic, kd, ky, kx) *
                         input.at(ic, ot * kernel.depth + kd, oy * kernel.height + ky,
                                  ox * kernel.width + kx);
                }
              }
            }
          }
          out.values[out.index(oc, ot, oy, ox)] = acc;
        }
      }
    }
  }
  return out;
}

VideoClip flow_visualize_clip(const VideoClip& clip, int block, int radius, int pairing_stride) {
  validate(clip);
  if (pairing_stride < 1) throw PreconditionError("pairing stride must be >= 1");
  VideoClip out;
  out.fps = clip.fps;
  out.frames.reserve(clip.frames.size());
  for (std::size_t i = 0; i < clip.frames.size(); ++i) {
    FlowField flow;
    if (i >= static_cast<std::size_t>(pairing_stride)) {
      flow = estimate_flow(clip.frames[i - pairing_stride], clip.frames[i], block, radius);
    } else {
      flow.width = clip.width();
      flow.height = clip.height();
      flow.vectors.assign(static_cast<std::size_t>(flow.width) * flow.height * 2, 0.0f);
    }
    out.frames.push_back(flow_to_color(flow));
  }
  return out;
}

FusedClip fuse_clip(const VideoClip& clip, int block, int radius, int pairing_stride) {
  const VideoClip viz = flow_visualize_clip(clip, block, radius, pairing_stride);
  FusedClip out;
  out.fps = clip.fps;
  out.frames.reserve(clip.frames.size());
  for (std::size_t i = 0; i < clip.frames.size(); ++i) {
    out.frames.push_back(fuse_channels(clip.frames[i], viz.frames[i]));
  }
  return out;
}

}  // namespace stdkit
