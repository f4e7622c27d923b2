#include "omnisynth/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <stdexcept>
#include <vector>

namespace omnisynth::env {

namespace {

struct FileCloser {
  void operator()(FILE* f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

struct PngWriter {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWriter() { png_destroy_write_struct(&png, &info); }
};

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReader() { png_destroy_read_struct(&png, &info, nullptr); }
};

void write_rows(const std::string& path, int w, int h, int color_type,
                int bit_depth, const std::vector<png_bytep>& rows) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw std::runtime_error("cannot open for writing: " + path);
  PngWriter ctx;
  ctx.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!ctx.png) throw std::runtime_error("png_create_write_struct failed");
  ctx.info = png_create_info_struct(ctx.png);
  if (!ctx.info) throw std::runtime_error("png_create_info_struct failed");
  if (setjmp(png_jmpbuf(ctx.png)))
    throw std::runtime_error("png write failed: " + path);
  png_init_io(ctx.png, fp.get());
  png_set_IHDR(ctx.png, ctx.info, w, h, bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(ctx.png, ctx.info);
  if (bit_depth == 16) png_set_swap(ctx.png);  // buffers are little-endian
  png_write_image(ctx.png, const_cast<png_bytep*>(rows.data()));
  png_write_end(ctx.png, nullptr);
}

template <typename T>
std::vector<png_bytep> row_pointers(const Image<T>& img) {
  std::vector<png_bytep> rows(img.height());
  for (int y = 0; y < img.height(); ++y)
    rows[y] = reinterpret_cast<png_bytep>(
        const_cast<T*>(img.data() + size_t(y) * img.width()));
  return rows;
}

}  // namespace

void write_png(const std::string& path, const ImageRgb8& img) {
  write_rows(path, img.width(), img.height(), PNG_COLOR_TYPE_RGB, 8,
             row_pointers(img));
}

void write_png(const std::string& path, const ImageRgba8& img) {
  write_rows(path, img.width(), img.height(), PNG_COLOR_TYPE_RGBA, 8,
             row_pointers(img));
}

void write_png(const std::string& path, const Image<uint16_t>& img) {
  write_rows(path, img.width(), img.height(), PNG_COLOR_TYPE_GRAY, 16,
             row_pointers(img));
}

void write_png_mask(const std::string& path, const ImageMask& img) {
  write_rows(path, img.width(), img.height(), PNG_COLOR_TYPE_GRAY, 8,
             row_pointers(img));
}

ImageRgb8 read_png_rgb8(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw std::runtime_error("cannot open for reading: " + path);
  PngReader ctx;
  ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!ctx.png) throw std::runtime_error("png_create_read_struct failed");
  ctx.info = png_create_info_struct(ctx.png);
  if (!ctx.info) throw std::runtime_error("png_create_info_struct failed");
  if (setjmp(png_jmpbuf(ctx.png)))
    throw std::runtime_error("png read failed: " + path);
  png_init_io(ctx.png, fp.get());
  png_read_info(ctx.png, ctx.info);

  png_set_palette_to_rgb(ctx.png);
  png_set_expand_gray_1_2_4_to_8(ctx.png);
  png_set_strip_16(ctx.png);
  png_set_strip_alpha(ctx.png);
  png_set_gray_to_rgb(ctx.png);
  png_read_update_info(ctx.png, ctx.info);

  const int w = int(png_get_image_width(ctx.png, ctx.info));
  const int h = int(png_get_image_height(ctx.png, ctx.info));
  if (png_get_channels(ctx.png, ctx.info) != 3)
    throw std::runtime_error("unexpected channel count in " + path);

  ImageRgb8 img(w, h);
  std::vector<png_bytep> rows = row_pointers(img);
  png_read_image(ctx.png, rows.data());
  png_read_end(ctx.png, nullptr);
  return img;
}

ImageMask read_png_mask(const std::string& path) {
  const ImageRgb8 rgb = read_png_rgb8(path);
  ImageMask mask(rgb.width(), rgb.height());
  for (int y = 0; y < rgb.height(); ++y)
    for (int x = 0; x < rgb.width(); ++x) {
      const Rgb8 c = rgb.at(x, y);
      const int lum = (int(c.r) * 299 + int(c.g) * 587 + int(c.b) * 114) / 1000;
      mask.at(x, y) = lum > 127 ? 255 : 0;
    }
  return mask;
}

}  // namespace omnisynth::env
