#pragma once

#include <cstdint>
#include <string>

#include "omnisynth/image.hpp"

namespace omnisynth::env {

void write_png(const std::string& path, const ImageRgb8& img);
void write_png(const std::string& path, const ImageRgba8& img);
void write_png(const std::string& path, const Image<uint16_t>& img);  // 16-bit gray
void write_png_mask(const std::string& path, const ImageMask& img);   // 8-bit gray

// Reads any color PNG as 8-bit RGB (alpha stripped, palettes expanded).
ImageRgb8 read_png_rgb8(const std::string& path);
// Reads any PNG as an 8-bit mask: pixels with luminance > 127 become 255.
ImageMask read_png_mask(const std::string& path);

}  // namespace omnisynth::env
