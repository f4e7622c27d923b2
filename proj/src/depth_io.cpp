#include "omnisynth/depth_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "omnisynth/png_io.hpp"

namespace omnisynth::env {

namespace {
constexpr char kMagic[8] = {'O', 'M', 'N', 'I', 'D', 'P', 'T', '0'};

void put_u32le(std::ostream& out, uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v),
                              static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32le(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 |
         uint32_t(b[3]) << 24;
}
}  // namespace

void write_depth_raw(const std::string& path, const ImageF32& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(kMagic, 8);
  put_u32le(out, uint32_t(img.width()));
  put_u32le(out, uint32_t(img.height()));
  static_assert(sizeof(float) == 4);
  // Matches the on-disk little-endian layout on every supported target.
  out.write(reinterpret_cast<const char*>(img.data()),
            std::streamsize(img.size() * sizeof(float)));
  if (!out) throw std::runtime_error("short write: " + path);
}

ImageF32 read_depth_raw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("not a depth file: " + path);
  const uint32_t w = get_u32le(in);
  const uint32_t h = get_u32le(in);
  if (!in || w == 0 || h == 0 || w > 1u << 20 || h > 1u << 20)
    throw std::runtime_error("bad depth header: " + path);
  ImageF32 img{int(w), int(h)};
  in.read(reinterpret_cast<char*>(img.data()),
          std::streamsize(img.size() * sizeof(float)));
  if (!in) throw std::runtime_error("short read: " + path);
  return img;
}

ImageF32 depth_to_f32(const ImageF64& img) {
  ImageF32 out(img.width(), img.height());
  for (size_t i = 0; i < img.size(); ++i)
    out.data()[i] = float(img.data()[i]);
  return out;
}

void write_depth_raw(const std::string& path, const ImageF64& img) {
  write_depth_raw(path, depth_to_f32(img));
}

void write_depth_preview(const std::string& png_path,
                         const std::string& scale_path, const ImageF64& img) {
  write_depth_preview(png_path, scale_path, depth_to_f32(img));
}

void write_depth_preview(const std::string& png_path,
                         const std::string& scale_path, const ImageF32& img) {
  float max_depth = 0.0f;
  for (size_t i = 0; i < img.size(); ++i) {
    const float d = img.data()[i];
    if (std::isfinite(d) && d > max_depth) max_depth = d;
  }
  const double scale = max_depth > 0 ? 65535.0 / max_depth : 1.0;
  Image<uint16_t> gray(img.width(), img.height());
  for (size_t i = 0; i < img.size(); ++i) {
    const float d = img.data()[i];
    gray.data()[i] =
        std::isfinite(d) ? uint16_t(std::lround(std::min(65535.0, d * scale)))
                         : 0;
  }
  write_png(png_path, gray);
  std::ofstream out(scale_path);
  if (!out) throw std::runtime_error("cannot open for writing: " + scale_path);
  out.precision(17);
  out << "depth_preview_scale " << scale << "\n";
}

}  // namespace omnisynth::env
