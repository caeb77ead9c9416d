#include "wattcolor/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "wattcolor/errors.hpp"

namespace wattcolor {

namespace {

struct PngImage {
  png_image image;
  PngImage() {
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

ImageBuffer decode_png(const std::vector<std::uint8_t>& bytes) {
  PngImage png;
  if (!png_image_begin_read_from_memory(&png.image, bytes.data(), bytes.size())) {
    throw InputError(std::string("not a readable PNG: ") + png.image.message);
  }
  if (png.image.format & PNG_FORMAT_FLAG_ALPHA) {
    throw InputError("PNG has an alpha channel; only 8-bit RGB images are supported");
  }
  if (png.image.format & PNG_FORMAT_FLAG_LINEAR) {
    throw InputError("PNG is 16-bit; only 8-bit RGB images are supported");
  }
  png.image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(png.image));
  if (!png_image_finish_read(&png.image, nullptr, pixels.data(), 0, nullptr)) {
    throw InputError(std::string("PNG decode failed: ") + png.image.message);
  }
  const std::size_t w = png.image.width;
  const std::size_t h = png.image.height;
  std::vector<double> data(pixels.size());
  std::transform(pixels.begin(), pixels.end(), data.begin(), [](std::uint8_t v) { return v / 255.0; });
  return ImageBuffer(w, h, ColorSpace::SRGB, std::move(data));
}

ImageBuffer read_png(const std::filesystem::path& path) {
  try {
    return decode_png(read_file(path));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_png(const ImageBuffer& img) {
  if (img.space() != ColorSpace::SRGB) throw ConfigError("PNG output requires an sRGB image");
  if (img.empty()) throw InputError("cannot encode an empty image");
  std::vector<std::uint8_t> codes(img.data().size());
  std::transform(img.data().begin(), img.data().end(), codes.begin(), [](double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  });
  PngImage png;
  png.image.width = static_cast<png_uint_32>(img.width());
  png.image.height = static_cast<png_uint_32>(img.height());
  png.image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&png.image, nullptr, &size, 0, codes.data(), 0, nullptr)) {
    throw Error(std::string("PNG encode failed: ") + png.image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&png.image, out.data(), &size, 0, codes.data(), 0, nullptr)) {
    throw Error(std::string("PNG encode failed: ") + png.image.message);
  }
  out.resize(size);
  return out;
}

void write_png(const std::filesystem::path& path, const ImageBuffer& img) {
  const auto bytes = encode_png(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace wattcolor
