#include "wattcolor/image.hpp"

#include <string>

#include "wattcolor/errors.hpp"

namespace wattcolor {

ImageBuffer::ImageBuffer(std::size_t width, std::size_t height, ColorSpace space)
    : width_(width), height_(height), space_(space), data_(3 * width * height, 0.0) {}

ImageBuffer::ImageBuffer(std::size_t width, std::size_t height, ColorSpace space, std::vector<double> data)
    : width_(width), height_(height), space_(space), data_(std::move(data)) {
  if (data_.size() != 3 * width * height) {
    throw InputError("image data has " + std::to_string(data_.size()) + " values, expected " +
                     std::to_string(3 * width * height));
  }
}

ImageBuffer ImageBuffer::filled(std::size_t width, std::size_t height, ColorSpace space, const ColorTriple& c) {
  ImageBuffer img(width, height, space);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) img.set_pixel(i, c);
  return img;
}

ImageBuffer convert_image(const ImageBuffer& img, ColorSpace to, const WhitePoint& wp) {
  if (img.empty()) throw InputError("cannot convert an empty image");
  if (img.space() == to) return img;
  ImageBuffer out(img.width(), img.height(), to);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    try {
      out.set_pixel(i, convert_triple(img.pixel(i), img.space(), to, wp));
    } catch (const NumericError& e) {
      throw NumericError("pixel " + std::to_string(i) + ": " + e.what());
    } catch (const RangeError& e) {
      throw RangeError("pixel " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace wattcolor
