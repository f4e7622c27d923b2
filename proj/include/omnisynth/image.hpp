#pragma once

#include <cstdint>
#include <vector>

namespace omnisynth::env {

struct Rgb8 {
  uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb8&) const = default;
};

struct Rgba8 {
  uint8_t r = 0, g = 0, b = 0, a = 0;
  bool operator==(const Rgba8&) const = default;
};

inline uint32_t pack_rgb(Rgb8 c) {
  return (uint32_t(c.r) << 16) | (uint32_t(c.g) << 8) | uint32_t(c.b);
}
inline Rgb8 unpack_rgb(uint32_t v) {
  return {uint8_t(v >> 16), uint8_t(v >> 8), uint8_t(v)};
}

enum class RenderMode { Lit, Semantic, Depth };

const char* mode_name(RenderMode m);

template <typename T>
class Image {
 public:
  Image() = default;
  Image(int w, int h, T fill = T{}) : w_(w), h_(h), px_(size_t(w) * h, fill) {}

  int width() const { return w_; }
  int height() const { return h_; }
  size_t size() const { return px_.size(); }

  T& at(int x, int y) { return px_[size_t(y) * w_ + x]; }
  const T& at(int x, int y) const { return px_[size_t(y) * w_ + x]; }

  T* data() { return px_.data(); }
  const T* data() const { return px_.data(); }

  bool operator==(const Image&) const = default;

 private:
  int w_ = 0, h_ = 0;
  std::vector<T> px_;
};

using ImageRgb8 = Image<Rgb8>;
using ImageRgba8 = Image<Rgba8>;
using ImageF32 = Image<float>;
using ImageF64 = Image<double>;
using ImageMask = Image<uint8_t>;  // 0 or 255

// One rendered frame: color carries lit/semantic pixels (alpha 0 marks
// out-of-FOV), depth carries meters with NaN for out-of-FOV. Depth stays in
// double precision until it hits the float32 file format. Only the member
// matching `mode` is sized.
struct RenderOutput {
  RenderMode mode = RenderMode::Lit;
  ImageRgba8 color;
  ImageF64 depth;

  int width() const { return mode == RenderMode::Depth ? depth.width() : color.width(); }
  int height() const { return mode == RenderMode::Depth ? depth.height() : color.height(); }
};

}  // namespace omnisynth::env
