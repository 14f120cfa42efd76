#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace stdkit {

// Frame rate as an exact rational. Frame i sits at exactly i*den/num seconds;
// keeping the rational around makes second<->frame conversions exact instead
// of drifting through a float fps.
struct Fps {
  std::uint32_t num = 25;
  std::uint32_t den = 1;

  double hz() const { return static_cast<double>(num) / den; }
  double frame_time(std::int64_t i) const {
    return static_cast<double>(i * static_cast<std::int64_t>(den)) / num;
  }

  bool operator==(const Fps&) const = default;
};

// 8-bit RGB frame, row-major, 3 bytes per pixel.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  Frame() = default;
  Frame(int w, int h, std::uint8_t r = 0, std::uint8_t g = 0, std::uint8_t b = 0);

  std::uint8_t* px(int x, int y) {
    return pixels.data() + 3 * (static_cast<std::size_t>(y) * width + x);
  }
  const std::uint8_t* px(int x, int y) const {
    return pixels.data() + 3 * (static_cast<std::size_t>(y) * width + x);
  }

  bool operator==(const Frame&) const = default;
};

// Fixed-rate sequence of equally sized frames.
struct VideoClip {
  std::vector<Frame> frames;
  Fps fps;

  int width() const { return frames.empty() ? 0 : frames.front().width; }
  int height() const { return frames.empty() ? 0 : frames.front().height; }
  double duration_s() const { return fps.frame_time(static_cast<std::int64_t>(frames.size())); }
  double frame_time(std::int64_t i) const { return fps.frame_time(i); }

  bool operator==(const VideoClip&) const = default;
};

// Six interleaved 8-bit channels per pixel: color RGB then flow-visualization RGB.
struct FusedFrame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> channels;

  std::uint8_t* px(int x, int y) {
    return channels.data() + 6 * (static_cast<std::size_t>(y) * width + x);
  }
  const std::uint8_t* px(int x, int y) const {
    return channels.data() + 6 * (static_cast<std::size_t>(y) * width + x);
  }

  bool operator==(const FusedFrame&) const = default;
};

struct FusedClip {
  std::vector<FusedFrame> frames;
  Fps fps;

  bool operator==(const FusedClip&) const = default;
};

// Throws PreconditionError if the frame/clip invariants do not hold.
void validate(const Frame& frame);
void validate(const VideoClip& clip);

// BT.601 luma, y = round(0.299 R + 0.587 G + 0.114 B), one byte per pixel.
std::vector<std::uint8_t> to_grayscale(const Frame& frame);

// Raw RGB24 container (.stdv). Little-endian header: magic "STDVID01",
// u32 width, u32 height, u32 fps_num, u32 fps_den, u64 frame_count, followed
// by frame_count * width * height * 3 payload bytes.
void save_rawvid(const VideoClip& clip, const std::filesystem::path& path);
VideoClip load_rawvid(const std::filesystem::path& path);

// Six-channel variant with magic "STDVF601" and 6 payload bytes per pixel.
void save_fusedvid(const FusedClip& clip, const std::filesystem::path& path);
FusedClip load_fusedvid(const std::filesystem::path& path);

// Imports all *.ppm files (binary P6, maxval 255) from a directory, in
// lexicographic filename order.
VideoClip import_ppm_sequence(const std::filesystem::path& dir, Fps fps);

}  // namespace stdkit
