#include "wattcolor/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "wattcolor/errors.hpp"

namespace wattcolor {

namespace {

struct Moments {
  double mean = 0.0;
  double std = 0.0;
};

Moments moments(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / n)};
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  const Moments mx = moments(xs), my = moments(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx.mean, dy = ys[i] - my.mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw NumericError("correlation undefined: input has zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace

double hue_dispersion(const std::vector<double>& hues_deg) {
  if (hues_deg.empty()) return 0.0;
  double s = 0.0, c = 0.0;
  for (double h : hues_deg) {
    const double rad = h * std::numbers::pi / 180.0;
    s += std::sin(rad);
    c += std::cos(rad);
  }
  const double n = static_cast<double>(hues_deg.size());
  const double r = std::min(std::hypot(s, c) / n, 1.0);
  constexpr double cap = std::numbers::sqrt2;
  // R below exp(-1) saturates at the cap; this also covers R = 0.
  if (r <= std::exp(-1.0)) return 1.0;
  return std::min(std::sqrt(-2.0 * std::log(r)), cap) / cap;
}

FeatureVector extract_features(const ImageBuffer& img) {
  if (img.empty()) throw InputError("cannot extract features from an empty image");
  if (img.space() != ColorSpace::SRGB) throw ConfigError("features are defined on srgb images");
  std::vector<double> lum, sat, hues;
  lum.reserve(img.pixel_count());
  sat.reserve(img.pixel_count());
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const HslColor h = srgb_to_hsl(img.pixel(i));
    lum.push_back(h.lightness);
    sat.push_back(h.saturation);
    if (!h.achromatic && h.saturation >= kAchromaticSaturation) hues.push_back(h.hue);
  }
  const Moments l = moments(lum), s = moments(sat);
  return {l.mean, l.std, s.std, hue_dispersion(hues)};
}

std::vector<double> average_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

Correlation correlations(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw InputError("correlation inputs differ in length");
  if (xs.size() < 3) throw InputError("correlation needs at least 3 pairs");
  return {pearson(xs, ys), pearson(average_ranks(xs), average_ranks(ys))};
}

std::string feature_csv_header() { return "mean_lum,std_lum,std_sat,std_hue"; }

std::string to_csv_record(const FeatureVector& f) {
  std::ostringstream out;
  out.precision(17);
  out << f.mean_lum << ',' << f.std_lum << ',' << f.std_sat << ',' << f.std_hue;
  return out.str();
}

}  // namespace wattcolor
