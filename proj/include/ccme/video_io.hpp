#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "ccme/errors.hpp"
#include "ccme/motion_vector.hpp"

namespace ccme {

// 8-bit luma plane whose dimensions are whole macroblocks.
class LumaFrame {
 public:
  LumaFrame() = default;

  LumaFrame(int width, int height, std::vector<std::uint8_t> samples)
      : width_(width), height_(height), samples_(std::move(samples)) {
    check_dimensions(width, height);
    if (samples_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      throw InputError("sample count does not match frame dimensions");
    }
  }

  LumaFrame(int width, int height, std::uint8_t fill)
      : LumaFrame(width, height,
                  std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                                static_cast<std::size_t>(std::max(height, 0)),
                                            fill)) {}

  static void check_dimensions(int width, int height) {
    if (width <= 0 || height <= 0) throw InputError("frame dimensions must be positive");
    if (width % kMbSize != 0 || height % kMbSize != 0) {
      throw InputError("dimension not divisible by 16");
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int mb_cols() const { return width_ / kMbSize; }
  int mb_rows() const { return height_ / kMbSize; }
  int mb_count() const { return mb_cols() * mb_rows(); }

  std::uint8_t at(int x, int y) const { return samples_[index(x, y)]; }
  std::uint8_t& at(int x, int y) { return samples_[index(x, y)]; }

  std::span<const std::uint8_t> row(int y) const {
    return {samples_.data() + index(0, y), static_cast<std::size_t>(width_)};
  }
  std::span<const std::uint8_t> samples() const { return samples_; }

  friend bool operator==(const LumaFrame&, const LumaFrame&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> samples_;
};

// Edge-replicated copy of a frame. sample(x, y) is valid on
// [-pad, width + pad) x [-pad, height + pad) and equals base(clamp(x), clamp(y)).
class PaddedFrame {
 public:
  PaddedFrame(const LumaFrame& base, int pad)
      : base_(base), pad_(pad), stride_(base.width() + 2 * pad) {
    if (pad < 0) throw ConfigError("padding must be non-negative");
    const int rows = base.height() + 2 * pad;
    plane_.resize(static_cast<std::size_t>(stride_) * static_cast<std::size_t>(rows));
    for (int y = -pad; y < base.height() + pad; ++y) {
      const int sy = std::clamp(y, 0, base.height() - 1);
      std::uint8_t* out = plane_.data() + offset(-pad, y);
      for (int x = -pad; x < base.width() + pad; ++x) {
        *out++ = base.at(std::clamp(x, 0, base.width() - 1), sy);
      }
    }
  }

  int pad() const { return pad_; }
  int width() const { return base_.width(); }
  int height() const { return base_.height(); }
  int stride() const { return stride_; }
  const LumaFrame& base() const { return base_; }

  bool contains(int x, int y) const {
    return x >= -pad_ && x < width() + pad_ && y >= -pad_ && y < height() + pad_;
  }

  std::uint8_t sample(int x, int y) const { return plane_[offset(x, y)]; }

  // Pointer to (x, y); rows are stride() apart.
  const std::uint8_t* at_ptr(int x, int y) const { return plane_.data() + offset(x, y); }

 private:
  std::size_t offset(int x, int y) const {
    return static_cast<std::size_t>(y + pad_) * static_cast<std::size_t>(stride_) +
           static_cast<std::size_t>(x + pad_);
  }

  LumaFrame base_;
  int pad_;
  int stride_;
  std::vector<std::uint8_t> plane_;
};

inline PaddedFrame pad(const LumaFrame& frame, int pad = kSearchRange) { return PaddedFrame(frame, pad); }

struct MbIndex {
  int col = 0;
  int row = 0;

  int x() const { return col * kMbSize; }
  int y() const { return row * kMbSize; }

  friend constexpr auto operator<=>(const MbIndex&, const MbIndex&) = default;
};

// ---------------------------------------------------------------------------
// YUV4MPEG2

namespace detail {

inline std::string read_line(std::istream& in, std::size_t limit = 4096) {
  std::string line;
  char c = 0;
  while (in.get(c)) {
    if (c == '\n') return line;
    line.push_back(c);
    if (line.size() > limit) throw InputError("malformed header: line too long");
  }
  throw InputError(line.empty() ? "unexpected end of file" : "malformed header: missing newline");
}

inline void read_exact(std::istream& in, std::uint8_t* dst, std::size_t n, const char* what) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) throw InputError(what);
}

inline void skip_exact(std::istream& in, std::size_t n, const char* what) {
  std::vector<char> sink(n);
  in.read(sink.data(), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) throw InputError(what);
}

inline std::size_t chroma_bytes_420(int width, int height) {
  return 2 * static_cast<std::size_t>((width + 1) / 2) * static_cast<std::size_t>((height + 1) / 2);
}

}  // namespace detail

inline std::vector<LumaFrame> read_y4m(std::istream& in) {
  const std::string header = detail::read_line(in);
  std::istringstream tokens(header);
  std::string magic;
  tokens >> magic;
  if (magic != "YUV4MPEG2") throw InputError("malformed header: missing YUV4MPEG2 signature");

  int width = -1;
  int height = -1;
  std::string colorspace = "420";
  for (std::string tok; tokens >> tok;) {
    const char tag = tok[0];
    const std::string value = tok.substr(1);
    try {
      if (tag == 'W') width = std::stoi(value);
      else if (tag == 'H') height = std::stoi(value);
      else if (tag == 'C') colorspace = value;
    } catch (const std::exception&) {
      throw InputError("malformed header: bad token '" + tok + "'");
    }
  }
  if (width <= 0 || height <= 0) throw InputError("malformed header: missing W/H");
  if (colorspace.rfind("420", 0) != 0) throw InputError("unsupported colorspace C" + colorspace);
  LumaFrame::check_dimensions(width, height);

  const std::size_t luma = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const std::size_t chroma = detail::chroma_bytes_420(width, height);
  std::vector<LumaFrame> frames;
  while (in.peek() != std::char_traits<char>::eof()) {
    const std::string marker = detail::read_line(in);
    if (marker.rfind("FRAME", 0) != 0) throw InputError("malformed frame marker");
    std::vector<std::uint8_t> plane(luma);
    detail::read_exact(in, plane.data(), luma, "truncated frame payload");
    detail::skip_exact(in, chroma, "truncated frame payload");
    frames.emplace_back(width, height, std::move(plane));
  }
  return frames;
}

inline std::vector<LumaFrame> load_y4m(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return read_y4m(in);
}

// Chroma planes are written as neutral grey.
inline void write_y4m(std::ostream& out, std::span<const LumaFrame> frames, int fps = 30) {
  if (frames.empty()) throw InputError("no frames to write");
  const int w = frames.front().width();
  const int h = frames.front().height();
  out << "YUV4MPEG2 W" << w << " H" << h << " F" << fps << ":1 Ip A1:1 C420jpeg\n";
  const std::vector<char> chroma(detail::chroma_bytes_420(w, h), static_cast<char>(128));
  for (const auto& f : frames) {
    out << "FRAME\n";
    out.write(reinterpret_cast<const char*>(f.samples().data()), static_cast<std::streamsize>(f.samples().size()));
    out.write(chroma.data(), static_cast<std::streamsize>(chroma.size()));
  }
}

inline void save_y4m(const std::filesystem::path& path, std::span<const LumaFrame> frames, int fps = 30) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  write_y4m(out, frames, fps);
}

// ---------------------------------------------------------------------------
// Headerless planar 4:2:0

inline std::vector<LumaFrame> load_raw_yuv420(const std::filesystem::path& path, int width, int height) {
  LumaFrame::check_dimensions(width, height);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  const auto size = static_cast<std::size_t>(std::filesystem::file_size(path));
  const std::size_t luma = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const std::size_t frame_bytes = luma + detail::chroma_bytes_420(width, height);
  if (size % frame_bytes != 0) throw InputError("file size is not a multiple of the frame size");

  std::vector<LumaFrame> frames;
  for (std::size_t i = 0; i < size / frame_bytes; ++i) {
    std::vector<std::uint8_t> plane(luma);
    detail::read_exact(in, plane.data(), luma, "truncated frame payload");
    detail::skip_exact(in, frame_bytes - luma, "truncated frame payload");
    frames.emplace_back(width, height, std::move(plane));
  }
  return frames;
}

inline void save_raw_yuv420(const std::filesystem::path& path, std::span<const LumaFrame> frames) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  for (const auto& f : frames) {
    out.write(reinterpret_cast<const char*>(f.samples().data()), static_cast<std::streamsize>(f.samples().size()));
    const std::vector<char> chroma(detail::chroma_bytes_420(f.width(), f.height()), static_cast<char>(128));
    out.write(chroma.data(), static_cast<std::streamsize>(chroma.size()));
  }
}

// ---------------------------------------------------------------------------
// Synthetic sequences

enum class TextureKind { flat, noise, checker };

// flat: base. noise: bilinear value noise on a `cell` lattice (+/- amplitude)
// plus per-pixel detail (+/- detail). checker: base +/- amplitude squares of side `cell`.
struct Texture {
  TextureKind kind = TextureKind::flat;
  int base = 128;
  int amplitude = 48;
  int cell = 8;
  int detail = 0;
};

struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  friend bool operator==(const Rect&, const Rect&) = default;
};

struct SynthLayer {
  Texture texture;
  Rect region;                       // placement in frame 0
  std::vector<MotionVector> motion;  // per-frame displacement, cycled; empty = static
  int jitter = 0;                    // seeded erratic offset in [-jitter, jitter] around the drifted path
  int grain = 0;                     // per-frame noise inside the layer, +/- grain
};

struct SynthSpec {
  int width = 128;
  int height = 96;
  int frames = 30;
  Texture background;
  std::vector<SynthLayer> layers;  // later layers are drawn on top
  int noise_amplitude = 0;         // per-frame sensor noise over the whole frame, +/- amplitude
  std::uint64_t seed = 1;
};

struct LayerTruth {
  Rect region;          // unclipped placement in this frame
  MotionVector motion;  // displacement since the previous frame
  bool clipped = false;
};

struct SynthResult {
  std::vector<LumaFrame> frames;
  std::vector<std::vector<LayerTruth>> truth;  // [frame][layer]
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t hash_coords(std::uint64_t seed, std::uint64_t salt, std::int64_t a, std::int64_t b,
                                 std::int64_t c = 0) {
  std::uint64_t h = mix64(seed ^ mix64(salt));
  h = mix64(h ^ static_cast<std::uint64_t>(a));
  h = mix64(h ^ static_cast<std::uint64_t>(b));
  return mix64(h ^ static_cast<std::uint64_t>(c));
}

// Uniform integer in [-amp, amp].
inline int signed_unit(std::uint64_t h, int amp) {
  if (amp <= 0) return 0;
  return static_cast<int>(h % static_cast<std::uint64_t>(2 * amp + 1)) - amp;
}

inline int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

inline int texture_value(const Texture& t, std::uint64_t seed, std::uint64_t salt, int lx, int ly) {
  const int cell = std::max(t.cell, 1);
  switch (t.kind) {
    case TextureKind::flat:
      return t.base;
    case TextureKind::checker: {
      const bool odd = ((floor_div(lx, cell) + floor_div(ly, cell)) & 1) != 0;
      return t.base + (odd ? t.amplitude : -t.amplitude);
    }
    case TextureKind::noise: {
      const int cx = floor_div(lx, cell);
      const int cy = floor_div(ly, cell);
      const int fx = lx - cx * cell;
      const int fy = ly - cy * cell;
      auto lattice = [&](int gx, int gy) { return signed_unit(hash_coords(seed, salt, gx, gy), t.amplitude); };
      const long v00 = lattice(cx, cy), v10 = lattice(cx + 1, cy);
      const long v01 = lattice(cx, cy + 1), v11 = lattice(cx + 1, cy + 1);
      const long area = static_cast<long>(cell) * cell;
      const long acc = v00 * (cell - fx) * (cell - fy) + v10 * fx * (cell - fy) + v01 * (cell - fx) * fy +
                       v11 * fx * fy;
      const long smooth = (acc >= 0 ? acc + area / 2 : acc - area / 2) / area;
      const int fine = signed_unit(hash_coords(seed, salt ^ 0xde7a11ULL, lx, ly), t.detail);
      return t.base + static_cast<int>(smooth) + fine;
    }
  }
  return t.base;
}

inline std::uint8_t to_pixel(int v) { return static_cast<std::uint8_t>(std::clamp(v, 0, 255)); }

inline void validate_texture(const Texture& t) {
  if (t.cell < 1) throw ConfigError("texture cell must be >= 1");
  if (t.amplitude < 0 || t.detail < 0) throw ConfigError("texture amplitudes must be non-negative");
}

}  // namespace detail

inline void validate(const SynthSpec& spec) {
  LumaFrame::check_dimensions(spec.width, spec.height);
  if (spec.frames < 1) throw ConfigError("synthetic spec needs at least one frame");
  if (spec.noise_amplitude < 0) throw ConfigError("noise amplitude must be non-negative");
  detail::validate_texture(spec.background);
  for (const auto& layer : spec.layers) {
    detail::validate_texture(layer.texture);
    const Rect& r = layer.region;
    if (r.width <= 0 || r.height <= 0 || r.x < 0 || r.y < 0 || r.x + r.width > spec.width ||
        r.y + r.height > spec.height) {
      throw ConfigError("layer region must lie within the frame");
    }
    if (layer.jitter < 0 || layer.grain < 0) throw ConfigError("jitter and grain must be non-negative");
    for (const auto& m : layer.motion) {
      if (chebyshev(m) + 2 * layer.jitter > kSearchRange) {
        throw ConfigError("layer motion exceeds +/-32 per frame step");
      }
    }
    if (layer.motion.empty() && 2 * layer.jitter > kSearchRange) {
      throw ConfigError("layer jitter exceeds +/-32 per frame step");
    }
  }
}

// Deterministic in `spec` (seed included). Layer content translates with the
// layer: the block at p in frame t matches p - motion in frame t-1.
inline SynthResult synthesize(const SynthSpec& spec) {
  validate(spec);
  SynthResult result;
  const std::size_t nl = spec.layers.size();
  std::vector<MotionVector> drift(nl);  // cumulative regular motion
  std::vector<MotionVector> prev_offset(nl);

  for (int t = 0; t < spec.frames; ++t) {
    std::vector<LayerTruth> truth(nl);
    std::vector<MotionVector> offset(nl);
    for (std::size_t i = 0; i < nl; ++i) {
      const SynthLayer& layer = spec.layers[i];
      if (t > 0 && !layer.motion.empty()) {
        drift[i] = drift[i] + layer.motion[static_cast<std::size_t>(t - 1) % layer.motion.size()];
      }
      MotionVector jitter{};
      if (t > 0 && layer.jitter > 0) {
        const auto h = detail::hash_coords(spec.seed, 0x717e7ULL + i, t, 0);
        jitter = {detail::signed_unit(h, layer.jitter), detail::signed_unit(detail::mix64(h), layer.jitter)};
      }
      offset[i] = drift[i] + jitter;
      const Rect& r0 = layer.region;
      const Rect r{r0.x + offset[i].dx, r0.y + offset[i].dy, r0.width, r0.height};
      const bool clipped = r.x < 0 || r.y < 0 || r.x + r.width > spec.width || r.y + r.height > spec.height;
      truth[i] = {r, t == 0 ? MotionVector{} : offset[i] - prev_offset[i], clipped};
    }

    std::vector<std::uint8_t> plane(static_cast<std::size_t>(spec.width) * static_cast<std::size_t>(spec.height));
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        int v = detail::texture_value(spec.background, spec.seed, 0xb6ULL, x, y);
        for (std::size_t i = nl; i-- > 0;) {
          const Rect& r = truth[i].region;
          if (x >= r.x && x < r.x + r.width && y >= r.y && y < r.y + r.height) {
            const SynthLayer& layer = spec.layers[i];
            v = detail::texture_value(layer.texture, spec.seed, 0x1a7e0ULL + i, x - r.x, y - r.y);
            v += detail::signed_unit(detail::hash_coords(spec.seed, 0x96a1ULL + i, t, x, y), layer.grain);
            break;
          }
        }
        v += detail::signed_unit(detail::hash_coords(spec.seed, 0x5e45ULL, t, x, y), spec.noise_amplitude);
        plane[static_cast<std::size_t>(y) * static_cast<std::size_t>(spec.width) + static_cast<std::size_t>(x)] =
            detail::to_pixel(v);
      }
    }
    result.frames.emplace_back(spec.width, spec.height, std::move(plane));
    result.truth.push_back(std::move(truth));
    prev_offset = offset;
  }
  return result;
}

}  // namespace ccme
