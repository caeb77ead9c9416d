#pragma once

#include <array>
#include <string>
#include <string_view>

namespace wattcolor {

enum class ColorSpace { SRGB, LinearRGB, XYZ, LAB, UVW, HSL };

std::string_view to_string(ColorSpace space);
// Accepts the lowercase names used in CSV/JSON files ("srgb", "lab", ...).
ColorSpace parse_color_space(std::string_view name);

// Three channel components in the units of their space: sRGB and linear RGB
// in [0,1], XYZ with Y = 1 for reference white, L* in [0,100], HSL as
// (hue degrees, saturation, lightness).
struct ColorTriple {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;

  double& operator[](std::size_t i) { return i == 0 ? c0 : (i == 1 ? c1 : c2); }
  double operator[](std::size_t i) const { return i == 0 ? c0 : (i == 1 ? c1 : c2); }
  friend bool operator==(const ColorTriple&, const ColorTriple&) = default;
};

struct WhitePoint {
  double X;
  double Y;
  double Z;
};

// D65 derived from its CIE 1931 chromaticity (0.3127, 0.3290), Y = 1. The
// sRGB matrices are derived from the same chromaticity so sRGB white lands
// exactly on this point.
WhitePoint d65();

// IEC 61966-2-1 transfer functions on a single channel. The checked versions
// throw RangeError outside [0,1].
double srgb_to_linear(double v);
double linear_to_srgb(double v);

// Extended (unchecked) variants: odd-symmetric around 0 and continued past 1.
// Used when round-tripping out-of-gamut intermediate values.
double srgb_decode(double v);
double srgb_encode(double v);

struct HslColor {
  double hue = 0.0;         // degrees, [0, 360)
  double saturation = 0.0;  // [0, 1]
  double lightness = 0.0;   // [0, 1]
  bool achromatic = false;  // max == min; hue reported as 0
};

HslColor srgb_to_hsl(const ColorTriple& rgb);
ColorTriple hsl_to_srgb(const HslColor& hsl);

// Converts through sRGB <-> linear <-> XYZ <-> {LAB, UVW}; HSL is attached to
// sRGB. Throws NumericError for non-finite components.
ColorTriple convert_triple(const ColorTriple& t, ColorSpace from, ColorSpace to,
                           const WhitePoint& wp = d65());

}  // namespace wattcolor
