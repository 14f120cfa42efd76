#include "stdkit/video.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "stdkit/error.hpp"

namespace stdkit {

namespace {

constexpr char kRgbMagic[8] = {'S', 'T', 'D', 'V', 'I', 'D', '0', '1'};
constexpr char kFusedMagic[8] = {'S', 'T', 'D', 'V', 'F', '6', '0', '1'};
constexpr std::size_t kHeaderSize = 8 + 4 * 4 + 8;

void put_u32_le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u64_le(std::string& out, std::uint64_t v) {
  put_u32_le(out, static_cast<std::uint32_t>(v & 0xffffffffULL));
  put_u32_le(out, static_cast<std::uint32_t>(v >> 32));
}

std::uint32_t get_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::uint64_t get_u64_le(const unsigned char* p) {
  return static_cast<std::uint64_t>(get_u32_le(p)) |
         static_cast<std::uint64_t>(get_u32_le(p + 4)) << 32;
}

struct RawHeader {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  Fps fps;
  std::uint64_t frame_count = 0;
};

std::string encode_header(const char magic[8], const RawHeader& h) {
  std::string out(magic, 8);
  put_u32_le(out, h.width);
  put_u32_le(out, h.height);
  put_u32_le(out, h.fps.num);
  put_u32_le(out, h.fps.den);
  put_u64_le(out, h.frame_count);
  return out;
}

RawHeader read_header(std::ifstream& in, const std::filesystem::path& path, const char magic[8]) {
  std::array<unsigned char, kHeaderSize> buf{};
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
    throw FormatError("short header in " + path.string());
  }
  if (std::memcmp(buf.data(), magic, 8) != 0) {
    throw FormatError("bad magic in " + path.string());
  }
  RawHeader h;
  h.width = get_u32_le(buf.data() + 8);
  h.height = get_u32_le(buf.data() + 12);
  h.fps.num = get_u32_le(buf.data() + 16);
  h.fps.den = get_u32_le(buf.data() + 20);
  h.frame_count = get_u64_le(buf.data() + 24);
  if (h.width == 0 || h.height == 0 || h.fps.num == 0 || h.fps.den == 0) {
    throw FormatError("invalid header fields in " + path.string());
  }
  return h;
}

std::uint8_t* frame_data(Frame& f) { return f.pixels.data(); }
std::uint8_t* frame_data(FusedFrame& f) { return f.channels.data(); }

template <typename ClipT, typename MakeFrame>
ClipT load_container(const std::filesystem::path& path, const char magic[8],
                     std::size_t bytes_per_px, MakeFrame make_frame) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const RawHeader h = read_header(in, path, magic);

  const std::size_t frame_bytes = static_cast<std::size_t>(h.width) * h.height * bytes_per_px;
  ClipT clip;
  clip.fps = h.fps;
  clip.frames.reserve(h.frame_count);
  std::size_t got = 0;
  for (std::uint64_t i = 0; i < h.frame_count; ++i) {
    auto frame = make_frame(static_cast<int>(h.width), static_cast<int>(h.height));
    in.read(reinterpret_cast<char*>(frame_data(frame)), static_cast<std::streamsize>(frame_bytes));
    got += static_cast<std::size_t>(in.gcount());
    if (static_cast<std::size_t>(in.gcount()) != frame_bytes) {
      std::ostringstream msg;
      msg << "truncated payload in " << path.string() << ": expected "
          << frame_bytes * h.frame_count << " bytes, got " << got;
      throw TruncationError(msg.str());
    }
    clip.frames.push_back(std::move(frame));
  }
  if (in.peek() != std::ifstream::traits_type::eof()) {
    throw FormatError("trailing bytes after declared payload in " + path.string());
  }
  return clip;
}

// P6 header tokens are separated by whitespace; '#' starts a comment to EOL.
std::string next_ppm_token(std::istream& in) {
  std::string tok;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      if (!tok.empty()) {
        in.unget();
        return tok;
      }
    } else {
      tok.push_back(static_cast<char>(c));
      const int next = in.peek();
      if (next == EOF || std::isspace(next) || next == '#') return tok;
    }
    c = in.get();
  }
  return tok;
}

Frame load_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string magic = next_ppm_token(in);
  if (magic != "P6") {
    throw FormatError("unsupported PPM format '" + magic + "' in " + path.string() +
                      " (binary P6 required)");
  }
  const std::string ws = next_ppm_token(in);
  const std::string hs = next_ppm_token(in);
  const std::string ms = next_ppm_token(in);
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(ws);
    h = std::stoi(hs);
    maxval = std::stoi(ms);
  } catch (const std::exception&) {
    throw FormatError("bad PPM header in " + path.string());
  }
  if (w <= 0 || h <= 0) throw FormatError("bad PPM dimensions in " + path.string());
  if (maxval != 255) {
    throw FormatError("unsupported PPM maxval " + ms + " in " + path.string());
  }
  in.get();  // single whitespace byte before the raster
  Frame frame(w, h);
  in.read(reinterpret_cast<char*>(frame.pixels.data()),
          static_cast<std::streamsize>(frame.pixels.size()));
  if (static_cast<std::size_t>(in.gcount()) != frame.pixels.size()) {
    throw TruncationError("truncated PPM raster in " + path.string());
  }
  return frame;
}

}  // namespace

Frame::Frame(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3) {
  for (std::size_t i = 0; i < pixels.size(); i += 3) {
    pixels[i] = r;
    pixels[i + 1] = g;
    pixels[i + 2] = b;
  }
}

void validate(const Frame& frame) {
  if (frame.width <= 0 || frame.height <= 0) {
    throw PreconditionError("frame dimensions must be positive");
  }
  if (frame.pixels.size() != static_cast<std::size_t>(frame.width) * frame.height * 3) {
    throw PreconditionError("frame pixel buffer size does not match dimensions");
  }
}

void validate(const VideoClip& clip) {
  if (clip.fps.num == 0 || clip.fps.den == 0) {
    throw PreconditionError("fps numerator and denominator must be positive");
  }
  for (const Frame& f : clip.frames) {
    validate(f);
    if (f.width != clip.width() || f.height != clip.height()) {
      throw PreconditionError("all frames in a clip must share dimensions");
    }
  }
}

std::vector<std::uint8_t> to_grayscale(const Frame& frame) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(frame.width) * frame.height);
  const std::uint8_t* p = frame.pixels.data();
  for (std::size_t i = 0; i < out.size(); ++i, p += 3) {
    const double y = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
    out[i] = static_cast<std::uint8_t>(std::clamp<long>(std::lround(y), 0, 255));
  }
  return out;
}

void save_rawvid(const VideoClip& clip, const std::filesystem::path& path) {
  if (clip.frames.empty()) throw PreconditionError("cannot save an empty clip");
  validate(clip);
  RawHeader h{static_cast<std::uint32_t>(clip.width()), static_cast<std::uint32_t>(clip.height()),
              clip.fps, clip.frames.size()};
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  const std::string header = encode_header(kRgbMagic, h);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  for (const Frame& f : clip.frames) {
    out.write(reinterpret_cast<const char*>(f.pixels.data()),
              static_cast<std::streamsize>(f.pixels.size()));
  }
  if (!out) throw IoError("write failed for " + path.string());
}

VideoClip load_rawvid(const std::filesystem::path& path) {
  return load_container<VideoClip>(path, kRgbMagic, 3, [](int w, int h) {
    Frame f;
    f.width = w;
    f.height = h;
    f.pixels.resize(static_cast<std::size_t>(w) * h * 3);
    return f;
  });
}

void save_fusedvid(const FusedClip& clip, const std::filesystem::path& path) {
  if (clip.frames.empty()) throw PreconditionError("cannot save an empty clip");
  RawHeader h{static_cast<std::uint32_t>(clip.frames.front().width),
              static_cast<std::uint32_t>(clip.frames.front().height), clip.fps,
              clip.frames.size()};
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  const std::string header = encode_header(kFusedMagic, h);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  for (const FusedFrame& f : clip.frames) {
    out.write(reinterpret_cast<const char*>(f.channels.data()),
              static_cast<std::streamsize>(f.channels.size()));
  }
  if (!out) throw IoError("write failed for " + path.string());
}

FusedClip load_fusedvid(const std::filesystem::path& path) {
  return load_container<FusedClip>(path, kFusedMagic, 6, [](int w, int h) {
    FusedFrame f;
    f.width = w;
    f.height = h;
    f.channels.resize(static_cast<std::size_t>(w) * h * 6);
    return f;
  });
}

VideoClip import_ppm_sequence(const std::filesystem::path& dir, Fps fps) {
  if (fps.num == 0 || fps.den == 0) throw PreconditionError("fps must be positive");
  if (!std::filesystem::is_directory(dir)) {
    throw PreconditionError(dir.string() + " is not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".ppm") {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) throw PreconditionError("no .ppm files in " + dir.string());
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.filename() < b.filename(); });

  VideoClip clip;
  clip.fps = fps;
  for (const auto& file : files) {
    Frame f = load_ppm(file);
    if (!clip.frames.empty() &&
        (f.width != clip.width() || f.height != clip.height())) {
      throw PreconditionError("inconsistent dimensions in PPM sequence: " + file.string());
    }
    clip.frames.push_back(std::move(f));
  }
  return clip;
}

}  // namespace stdkit
