#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wattcolor/colorspace.hpp"

namespace wattcolor {

// Interleaved width x height x 3 buffer of doubles tagged with the color
// space its values are expressed in. sRGB buffers hold normalized drive
// levels in [0,1], not 0-255 codes.
class ImageBuffer {
 public:
  ImageBuffer() = default;
  ImageBuffer(std::size_t width, std::size_t height, ColorSpace space);
  ImageBuffer(std::size_t width, std::size_t height, ColorSpace space, std::vector<double> data);

  // Uniform image filled with one color.
  static ImageBuffer filled(std::size_t width, std::size_t height, ColorSpace space, const ColorTriple& c);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t pixel_count() const { return width_ * height_; }
  bool empty() const { return pixel_count() == 0; }
  ColorSpace space() const { return space_; }
  void set_space(ColorSpace s) { space_ = s; }

  ColorTriple pixel(std::size_t i) const { return {data_[3 * i], data_[3 * i + 1], data_[3 * i + 2]}; }
  void set_pixel(std::size_t i, const ColorTriple& c) {
    data_[3 * i] = c.c0;
    data_[3 * i + 1] = c.c1;
    data_[3 * i + 2] = c.c2;
  }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  ColorSpace space_ = ColorSpace::SRGB;
  std::vector<double> data_;
};

// Per-pixel convert_triple. Errors are rethrown with the pixel index attached.
ImageBuffer convert_image(const ImageBuffer& img, ColorSpace to, const WhitePoint& wp = d65());

}  // namespace wattcolor
