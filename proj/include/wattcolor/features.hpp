#pragma once

#include <array>
#include <string>
#include <vector>

#include "wattcolor/image.hpp"

namespace wattcolor {

// Saturation below which a pixel's hue is treated as undefined and left out
// of the hue statistics.
inline constexpr double kAchromaticSaturation = 0.01;

struct FeatureVector {
  double mean_lum = 0.0;  // [0,1]
  double std_lum = 0.0;   // [0,0.5]
  double std_sat = 0.0;   // [0,0.5]
  double std_hue = 0.0;   // circular dispersion mapped into [0,1]

  static constexpr std::size_t kSize = 4;
  std::array<double, kSize> as_array() const { return {mean_lum, std_lum, std_sat, std_hue}; }
  static FeatureVector from_array(const std::array<double, kSize>& a) { return {a[0], a[1], a[2], a[3]}; }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

// HSL statistics of an sRGB image. Luminance and saturation use population
// standard deviations over all pixels. Hue dispersion is the circular
// standard deviation sqrt(-2 ln R) over chromatic pixels, capped at sqrt(2)
// and divided by sqrt(2); it is 0 when no pixel is chromatic.
FeatureVector extract_features(const ImageBuffer& img);

// Circular dispersion of a set of angles in degrees, on the same [0,1] scale
// as FeatureVector::std_hue.
double hue_dispersion(const std::vector<double>& hues_deg);

struct Correlation {
  double pearson = 0.0;
  double spearman = 0.0;
};

// Product-moment and rank correlation (ties get their average rank). Needs
// at least 3 pairs; throws NumericError if either input has zero variance.
Correlation correlations(const std::vector<double>& xs, const std::vector<double>& ys);

std::vector<double> average_ranks(const std::vector<double>& values);

// One CSV record "mean_lum,std_lum,std_sat,std_hue" and its header.
std::string feature_csv_header();
std::string to_csv_record(const FeatureVector& f);

}  // namespace wattcolor
