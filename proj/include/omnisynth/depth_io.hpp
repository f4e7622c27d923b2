#pragma once

#include <string>

#include "omnisynth/image.hpp"

namespace omnisynth::env {

// Raw depth format: 16-byte header (8-byte magic "OMNIDPT0", u32 width,
// u32 height, both little-endian), then row-major float32 meters.
// Out-of-view pixels hold a quiet NaN.
void write_depth_raw(const std::string& path, const ImageF32& img);
void write_depth_raw(const std::string& path, const ImageF64& img);
ImageF32 read_depth_raw(const std::string& path);

// Narrows a double-precision depth buffer to the float32 storage type.
ImageF32 depth_to_f32(const ImageF64& img);

// 16-bit grayscale preview plus a text sidecar "depth_preview_scale <s>":
// meters = gray / s. NaN renders as 0.
void write_depth_preview(const std::string& png_path,
                         const std::string& scale_path, const ImageF32& img);
void write_depth_preview(const std::string& png_path,
                         const std::string& scale_path, const ImageF64& img);

}  // namespace omnisynth::env
