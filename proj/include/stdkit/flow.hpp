#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "stdkit/video.hpp"

namespace stdkit {

// Per-pixel 2D motion estimate, (dx, dy) in pixels. A positive dx means the
// pixel content moved right between the previous and the current frame.
struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<float> vectors;  // interleaved (dx, dy)

  float dx(int x, int y) const {
    return vectors[2 * (static_cast<std::size_t>(y) * width + x)];
  }
  float dy(int x, int y) const {
    return vectors[2 * (static_cast<std::size_t>(y) * width + x) + 1];
  }
};

// Exhaustive grayscale block matching: for every block-aligned tile the SAD
// over displacements in [-radius, radius]^2 is minimized and the winning
// displacement is assigned to all pixels of the tile. Out-of-frame samples
// clamp to the border. Ties break toward the smallest |dx|+|dy|, then the
// smallest dy, then the smallest dx.
FlowField estimate_flow(const Frame& prev, const Frame& curr, int block = 16, int radius = 7);

// Hue angle of a flow vector in degrees, in [0, 360).
double flow_angle_deg(double dx, double dy);

// Standard HSV -> RGB conversion, rounded to 8 bit. h in degrees, s and v in [0, 1].
std::array<std::uint8_t, 3> rgb_from_hsv(double h_deg, double s, double v);

// Maps orientation to hue and magnitude to saturation (value fixed at 1), with
// saturation normalized by max(per-frame max magnitude, 1). Zero flow is white.
Frame flow_to_color(const FlowField& flow);

// Channel-wise concatenation of a color frame and its flow visualization.
FusedFrame fuse_channels(const Frame& color, const Frame& flow_viz);

// Weights of a patchifying 3D convolution, laid out [out][in][d][h][w].
struct EmbedKernel {
  int out_channels = 0;
  int in_channels = 0;
  int depth = 0;
  int height = 0;
  int width = 0;
  std::vector<double> weights;

  std::size_t index(int o, int i, int d, int h, int w) const {
    return (((static_cast<std::size_t>(o) * in_channels + i) * depth + d) * height + h) * width + w;
  }
  double at(int o, int i, int d, int h, int w) const { return weights[index(o, i, d, h, w)]; }
};

// Doubles the input channels of a 3-channel kernel; the new channels are all
// zero, so the extended kernel reproduces the original outputs exactly on any
// fused input whose first three channels match the original input.
EmbedKernel extend_kernel_zero_pad(const EmbedKernel& k3);

// Channel-major frame stack with values normalized to [0, 1].
struct Volume {
  int channels = 0;
  int depth = 0;
  int height = 0;
  int width = 0;
  std::vector<double> values;  // [c][t][y][x]

  std::size_t index(int c, int t, int y, int x) const {
    return ((static_cast<std::size_t>(c) * depth + t) * height + y) * width + x;
  }
  double at(int c, int t, int y, int x) const { return values[index(c, t, y, x)]; }
};

Volume volume_from_frames(const std::vector<Frame>& frames);
Volume volume_from_fused(const std::vector<FusedFrame>& frames);

struct TokenGrid {
  int channels = 0;
  int depth = 0;
  int height = 0;
  int width = 0;
  std::vector<double> values;  // [c][t][y][x]

  std::size_t index(int c, int t, int y, int x) const {
    return ((static_cast<std::size_t>(c) * depth + t) * height + y) * width + x;
  }
  double at(int c, int t, int y, int x) const { return values[index(c, t, y, x)]; }
};

// Non-overlapping 3D convolution with stride equal to the kernel dims
// (patchification). Output grid is C x floor(T/Dk) x floor(H/Hk) x floor(W/Wk).
TokenGrid patch_embed(const Volume& input, const EmbedKernel& kernel);

// Flow of frame i relative to frame i - pairing_stride for every frame of the
// clip; frames without a predecessor get zero flow. Returns the colorized clip.
VideoClip flow_visualize_clip(const VideoClip& clip, int block = 16, int radius = 7,
                              int pairing_stride = 1);

// Color frames fused with their flow visualization.
FusedClip fuse_clip(const VideoClip& clip, int block = 16, int radius = 7,
                    int pairing_stride = 1);

}  // namespace stdkit
