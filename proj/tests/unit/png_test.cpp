#include <gtest/gtest.h>

#include <png.h>

#include <cstdio>
#include <filesystem>
#include <random>

#include "wattcolor/errors.hpp"
#include "wattcolor/png_io.hpp"

namespace wattcolor {
namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("wattcolor_png_test_" + name);
}

// Writes a PNG with libpng directly, for formats the library never emits.
void write_raw_png(const std::filesystem::path& path, int color_type, int bit_depth, int channels) {
  FILE* fp = std::fopen(path.c_str(), "wb");
  ASSERT_NE(fp, nullptr);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  png_init_io(png, fp);
  const int w = 2, h = 2;
  png_set_IHDR(png, info, w, h, bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<unsigned char> row(static_cast<std::size_t>(w * channels * bit_depth / 8), 0x80);
  for (int y = 0; y < h; ++y) png_write_row(png, row.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

TEST(Png, RoundTripIsExactOnCodes) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> code(0, 255);
  ImageBuffer img(7, 5, ColorSpace::SRGB);
  for (auto& v : img.data()) v = code(rng) / 255.0;
  const auto path = temp_path("roundtrip.png");
  write_png(path, img);
  EXPECT_EQ(read_png(path), img);
  EXPECT_EQ(decode_png(encode_png(img)), img);
  std::filesystem::remove(path);
}

TEST(Png, WriteRoundsAndClamps) {
  const auto img = ImageBuffer::filled(1, 1, ColorSpace::SRGB, {-0.5, 1.7, 100.4 / 255.0});
  const auto back = decode_png(encode_png(img));
  EXPECT_EQ(back.pixel(0), (ColorTriple{0.0, 1.0, 100 / 255.0}));
}

TEST(Png, GrayscaleExpanded) {
  const auto path = temp_path("gray.png");
  write_raw_png(path, PNG_COLOR_TYPE_GRAY, 8, 1);
  const auto img = read_png(path);
  EXPECT_EQ(img.pixel(0), (ColorTriple{128 / 255.0, 128 / 255.0, 128 / 255.0}));
  std::filesystem::remove(path);
}

TEST(Png, AlphaRejected) {
  const auto path = temp_path("alpha.png");
  write_raw_png(path, PNG_COLOR_TYPE_RGBA, 8, 4);
  try {
    read_png(path);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("alpha"), std::string::npos) << e.what();
  }
  std::filesystem::remove(path);
}

TEST(Png, SixteenBitRejected) {
  const auto path = temp_path("deep.png");
  write_raw_png(path, PNG_COLOR_TYPE_RGB, 16, 3);
  EXPECT_THROW(read_png(path), InputError);
  std::filesystem::remove(path);
}

TEST(Png, MissingAndGarbage) {
  EXPECT_THROW(read_png(temp_path("does_not_exist.png")), InputError);
  EXPECT_THROW(decode_png({1, 2, 3, 4}), InputError);
}

TEST(Png, NonSrgbRejectedOnWrite) {
  EXPECT_THROW(encode_png(ImageBuffer::filled(1, 1, ColorSpace::LAB, {50, 0, 0})), ConfigError);
}

}  // namespace
}  // namespace wattcolor
