#include "wattcolor/colorspace.hpp"

#include <algorithm>
#include <cmath>

#include "wattcolor/errors.hpp"

namespace wattcolor {

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

constexpr double kLabEpsilon = 216.0 / 24389.0;
constexpr double kLabKappa = 24389.0 / 27.0;

// Below Y = 1 (on the 0-100 scale) the 1964 lightness formula is not
// defined; it is continued linearly through the origin so it stays
// invertible: W* = 8 Y, which meets 25 Y^(1/3) - 17 at Y = 1.
constexpr double kUvwFloorY = 1.0;
constexpr double kUvwFloorW = 8.0;

Mat3 invert(const Mat3& m) {
  const double a = m[0][0], b = m[0][1], c = m[0][2];
  const double d = m[1][0], e = m[1][1], f = m[1][2];
  const double g = m[2][0], h = m[2][1], i = m[2][2];
  const double det = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
  return {{{(e * i - f * h) / det, (c * h - b * i) / det, (b * f - c * e) / det},
           {(f * g - d * i) / det, (a * i - c * g) / det, (c * d - a * f) / det},
           {(d * h - e * g) / det, (b * g - a * h) / det, (a * e - b * d) / det}}};
}

ColorTriple mul(const Mat3& m, const ColorTriple& v) {
  return {m[0][0] * v.c0 + m[0][1] * v.c1 + m[0][2] * v.c2,
          m[1][0] * v.c0 + m[1][1] * v.c1 + m[1][2] * v.c2,
          m[2][0] * v.c0 + m[2][1] * v.c1 + m[2][2] * v.c2};
}

std::array<double, 3> xy_to_xyz(double x, double y) { return {x / y, 1.0, (1.0 - x - y) / y}; }

// Standard construction: columns are the primaries' XYZ scaled so that
// RGB (1,1,1) maps to the white point.
Mat3 build_rgb_to_xyz() {
  const auto r = xy_to_xyz(0.64, 0.33);
  const auto g = xy_to_xyz(0.30, 0.60);
  const auto b = xy_to_xyz(0.15, 0.06);
  const auto w = xy_to_xyz(0.3127, 0.3290);
  Mat3 p{{{r[0], g[0], b[0]}, {r[1], g[1], b[1]}, {r[2], g[2], b[2]}}};
  const ColorTriple s = mul(invert(p), {w[0], w[1], w[2]});
  for (auto& row : p) {
    row[0] *= s.c0;
    row[1] *= s.c1;
    row[2] *= s.c2;
  }
  return p;
}

const Mat3& rgb_to_xyz_matrix() {
  static const Mat3 m = build_rgb_to_xyz();
  return m;
}

const Mat3& xyz_to_rgb_matrix() {
  static const Mat3 m = invert(rgb_to_xyz_matrix());
  return m;
}

double lab_f(double t) { return t > kLabEpsilon ? std::cbrt(t) : (kLabKappa * t + 16.0) / 116.0; }

double lab_f_inv(double f) {
  const double f3 = f * f * f;
  return f3 > kLabEpsilon ? f3 : (116.0 * f - 16.0) / kLabKappa;
}

ColorTriple xyz_to_lab(const ColorTriple& xyz, const WhitePoint& wp) {
  const double fx = lab_f(xyz.c0 / wp.X);
  const double fy = lab_f(xyz.c1 / wp.Y);
  const double fz = lab_f(xyz.c2 / wp.Z);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

ColorTriple lab_to_xyz(const ColorTriple& lab, const WhitePoint& wp) {
  const double fy = (lab.c0 + 16.0) / 116.0;
  const double fx = fy + lab.c1 / 500.0;
  const double fz = fy - lab.c2 / 200.0;
  return {wp.X * lab_f_inv(fx), wp.Y * lab_f_inv(fy), wp.Z * lab_f_inv(fz)};
}

// CIE 1960 UCS chromaticity of the white point.
std::pair<double, double> white_uv(const WhitePoint& wp) {
  const double d = wp.X + 15.0 * wp.Y + 3.0 * wp.Z;
  return {4.0 * wp.X / d, 6.0 * wp.Y / d};
}

ColorTriple xyz_to_uvw(const ColorTriple& xyz, const WhitePoint& wp) {
  const auto [u0, v0] = white_uv(wp);
  const double y100 = 100.0 * xyz.c1 / wp.Y;
  const double w = y100 >= kUvwFloorY ? 25.0 * std::cbrt(y100) - 17.0 : kUvwFloorW * y100;
  const double d = xyz.c0 + 15.0 * xyz.c1 + 3.0 * xyz.c2;
  const double u = d > 0.0 ? 4.0 * xyz.c0 / d : u0;
  const double v = d > 0.0 ? 6.0 * xyz.c1 / d : v0;
  return {13.0 * w * (u - u0), 13.0 * w * (v - v0), w};
}

ColorTriple uvw_to_xyz(const ColorTriple& uvw, const WhitePoint& wp) {
  const auto [u0, v0] = white_uv(wp);
  const double w = uvw.c2;
  const double y100 = w >= kUvwFloorW ? std::pow((w + 17.0) / 25.0, 3.0) : w / kUvwFloorW;
  const double y = y100 / 100.0 * wp.Y;
  if (y == 0.0) return {0.0, 0.0, 0.0};
  const double u = w != 0.0 ? uvw.c0 / (13.0 * w) + u0 : u0;
  const double v = w != 0.0 ? uvw.c1 / (13.0 * w) + v0 : v0;
  if (v == 0.0) throw NumericError("UVW chromaticity v is zero; cannot invert");
  const double x = 1.5 * y * u / v;
  const double z = (6.0 * y / v - x - 15.0 * y) / 3.0;
  return {x, y, z};
}

ColorTriple srgb_decode3(const ColorTriple& t) {
  return {srgb_decode(t.c0), srgb_decode(t.c1), srgb_decode(t.c2)};
}

ColorTriple srgb_encode3(const ColorTriple& t) {
  return {srgb_encode(t.c0), srgb_encode(t.c1), srgb_encode(t.c2)};
}

ColorTriple to_srgb_from_hsl(const ColorTriple& t) {
  HslColor hsl;
  hsl.hue = t.c0;
  hsl.saturation = t.c1;
  hsl.lightness = t.c2;
  return hsl_to_srgb(hsl);
}

ColorTriple to_xyz(const ColorTriple& t, ColorSpace from, const WhitePoint& wp) {
  switch (from) {
    case ColorSpace::SRGB: return mul(rgb_to_xyz_matrix(), srgb_decode3(t));
    case ColorSpace::LinearRGB: return mul(rgb_to_xyz_matrix(), t);
    case ColorSpace::XYZ: return t;
    case ColorSpace::LAB: return lab_to_xyz(t, wp);
    case ColorSpace::UVW: return uvw_to_xyz(t, wp);
    case ColorSpace::HSL: return mul(rgb_to_xyz_matrix(), srgb_decode3(to_srgb_from_hsl(t)));
  }
  throw ConfigError("unknown color space");
}

ColorTriple from_xyz(const ColorTriple& xyz, ColorSpace to, const WhitePoint& wp) {
  switch (to) {
    case ColorSpace::SRGB: return srgb_encode3(mul(xyz_to_rgb_matrix(), xyz));
    case ColorSpace::LinearRGB: return mul(xyz_to_rgb_matrix(), xyz);
    case ColorSpace::XYZ: return xyz;
    case ColorSpace::LAB: return xyz_to_lab(xyz, wp);
    case ColorSpace::UVW: return xyz_to_uvw(xyz, wp);
    case ColorSpace::HSL: {
      const HslColor h = srgb_to_hsl(srgb_encode3(mul(xyz_to_rgb_matrix(), xyz)));
      return {h.hue, h.saturation, h.lightness};
    }
  }
  throw ConfigError("unknown color space");
}

bool is_rgb_family(ColorSpace s) {
  return s == ColorSpace::SRGB || s == ColorSpace::LinearRGB || s == ColorSpace::HSL;
}

// sRGB, linear RGB and HSL convert among themselves without passing through
// the XYZ matrices.
ColorTriple within_rgb_family(const ColorTriple& t, ColorSpace from, ColorSpace to) {
  ColorTriple srgb;
  switch (from) {
    case ColorSpace::SRGB: srgb = t; break;
    case ColorSpace::LinearRGB: srgb = srgb_encode3(t); break;
    default: srgb = to_srgb_from_hsl(t); break;
  }
  switch (to) {
    case ColorSpace::SRGB: return srgb;
    case ColorSpace::LinearRGB: return srgb_decode3(srgb);
    default: {
      const HslColor h = srgb_to_hsl(srgb);
      return {h.hue, h.saturation, h.lightness};
    }
  }
}

}  // namespace

std::string_view to_string(ColorSpace space) {
  switch (space) {
    case ColorSpace::SRGB: return "srgb";
    case ColorSpace::LinearRGB: return "linear_rgb";
    case ColorSpace::XYZ: return "xyz";
    case ColorSpace::LAB: return "lab";
    case ColorSpace::UVW: return "uvw";
    case ColorSpace::HSL: return "hsl";
  }
  return "?";
}

ColorSpace parse_color_space(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "srgb" || s == "rgb") return ColorSpace::SRGB;
  if (s == "linear_rgb" || s == "linear") return ColorSpace::LinearRGB;
  if (s == "xyz") return ColorSpace::XYZ;
  if (s == "lab" || s == "cielab") return ColorSpace::LAB;
  if (s == "uvw" || s == "cieuvw") return ColorSpace::UVW;
  if (s == "hsl") return ColorSpace::HSL;
  throw ConfigError("unknown color space '" + std::string(name) + "'");
}

WhitePoint d65() {
  const auto w = xy_to_xyz(0.3127, 0.3290);
  return {w[0], w[1], w[2]};
}

double srgb_decode(double v) {
  const double a = std::abs(v);
  const double lin = a <= 0.04045 ? a / 12.92 : std::pow((a + 0.055) / 1.055, 2.4);
  return std::copysign(lin, v);
}

double srgb_encode(double v) {
  const double a = std::abs(v);
  const double enc = a <= 0.0031308 ? a * 12.92 : 1.055 * std::pow(a, 1.0 / 2.4) - 0.055;
  return std::copysign(enc, v);
}

double srgb_to_linear(double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw RangeError("sRGB channel outside [0,1]: " + std::to_string(v));
  return srgb_decode(v);
}

double linear_to_srgb(double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw RangeError("linear channel outside [0,1]: " + std::to_string(v));
  return srgb_encode(v);
}

HslColor srgb_to_hsl(const ColorTriple& rgb) {
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(rgb[i] >= 0.0 && rgb[i] <= 1.0)) throw RangeError("HSL input must be sRGB in [0,1]");
  }
  const double mx = std::max({rgb.c0, rgb.c1, rgb.c2});
  const double mn = std::min({rgb.c0, rgb.c1, rgb.c2});
  HslColor out;
  out.lightness = 0.5 * (mx + mn);
  const double delta = mx - mn;
  if (delta == 0.0) {
    out.achromatic = true;
    return out;
  }
  out.saturation = delta / (1.0 - std::abs(2.0 * out.lightness - 1.0));
  out.saturation = std::clamp(out.saturation, 0.0, 1.0);
  double h;
  if (mx == rgb.c0) {
    h = std::fmod((rgb.c1 - rgb.c2) / delta, 6.0);
  } else if (mx == rgb.c1) {
    h = (rgb.c2 - rgb.c0) / delta + 2.0;
  } else {
    h = (rgb.c0 - rgb.c1) / delta + 4.0;
  }
  h *= 60.0;
  if (h < 0.0) h += 360.0;
  if (h >= 360.0) h -= 360.0;
  out.hue = h;
  return out;
}

ColorTriple hsl_to_srgb(const HslColor& hsl) {
  const double c = (1.0 - std::abs(2.0 * hsl.lightness - 1.0)) * hsl.saturation;
  double hp = std::fmod(hsl.hue, 360.0);
  if (hp < 0.0) hp += 360.0;
  hp /= 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  ColorTriple rgb;
  if (hp < 1.0) rgb = {c, x, 0.0};
  else if (hp < 2.0) rgb = {x, c, 0.0};
  else if (hp < 3.0) rgb = {0.0, c, x};
  else if (hp < 4.0) rgb = {0.0, x, c};
  else if (hp < 5.0) rgb = {x, 0.0, c};
  else rgb = {c, 0.0, x};
  const double m = hsl.lightness - 0.5 * c;
  return {rgb.c0 + m, rgb.c1 + m, rgb.c2 + m};
}

ColorTriple convert_triple(const ColorTriple& t, ColorSpace from, ColorSpace to, const WhitePoint& wp) {
  if (!std::isfinite(t.c0) || !std::isfinite(t.c1) || !std::isfinite(t.c2)) {
    throw NumericError("non-finite color component");
  }
  if (!(wp.X > 0.0 && wp.Y > 0.0 && wp.Z > 0.0)) throw ConfigError("white point must be strictly positive");
  if (from == to) return t;
  if (is_rgb_family(from) && is_rgb_family(to)) return within_rgb_family(t, from, to);
  return from_xyz(to_xyz(t, from, wp), to, wp);
}

}  // namespace wattcolor
