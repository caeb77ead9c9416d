#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "wattcolor/image.hpp"

namespace wattcolor {

// Reads an 8-bit RGB PNG into an sRGB buffer (codes / 255). Grayscale and
// palette images are expanded to RGB; images with an alpha channel are
// rejected with InputError.
ImageBuffer read_png(const std::filesystem::path& path);
ImageBuffer decode_png(const std::vector<std::uint8_t>& bytes);

// Writes an sRGB buffer as 8-bit RGB, rounding to the nearest code. Values
// outside [0,1] are clamped.
void write_png(const std::filesystem::path& path, const ImageBuffer& img);
std::vector<std::uint8_t> encode_png(const ImageBuffer& img);

}  // namespace wattcolor
