#include "wattcolor/transform.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "wattcolor/errors.hpp"

namespace wattcolor {

namespace {

constexpr double kBracketLow = 1e-6;
constexpr double kBracketHigh = 1e9;
constexpr double kBracketLimitLow = 1e-30;
constexpr double kBracketLimitHigh = 1e30;
constexpr double kBisectionRelTol = 1e-10;
constexpr int kMonotoneSamples = 241;
// Values this far outside [0,1] after the inverse conversion are round-off,
// not out-of-gamut results.
constexpr double kGamutSlack = 1e-7;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::array<double, 3> alphas(const PowerModel& model) {
  return {model.channel(0).alpha, model.channel(1).alpha, model.channel(2).alpha};
}

// Transforms one pixel given in unit coordinates, clamping into [0,1].
// The L2 transform scales the pixel toward black. Black is the native
// origin in every supported space; in unit coordinates it sits at
// to_unit(0), which is the unit origin only for sRGB.
ColorTriple transform_unit(const ColorTriple& u, const PowerModel& model, DistanceMetric metric, double lambda) {
  ColorTriple y;
  if (metric == DistanceMetric::L22) {
    for (std::size_t c = 0; c < 3; ++c) y[c] = l22_value(u[c], model.channel(c), lambda);
  } else {
    const ColorTriple a = model.rescale().to_unit({0.0, 0.0, 0.0});
    const ColorTriple d{u.c0 - a.c0, u.c1 - a.c1, u.c2 - a.c2};
    const double s = l2_scale(d, alphas(model), lambda);
    y = {a.c0 + s * d.c0, a.c1 + s * d.c1, a.c2 + s * d.c2};
  }
  for (std::size_t c = 0; c < 3; ++c) y[c] = std::clamp(y[c], 0.0, 1.0);
  return y;
}

ImageBuffer transform_pixels(const ImageBuffer& img, const PowerModel& model, DistanceMetric metric, double lambda) {
  if (img.space() != model.space()) {
    throw ConfigError("image is in " + std::string(to_string(img.space())) + " but the power model is in " +
                      std::string(to_string(model.space())));
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw RangeError("lambda must be a positive finite value");
  ImageBuffer out(img.width(), img.height(), img.space());
  const auto& rescale = model.rescale();
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    out.set_pixel(i, rescale.from_unit(transform_unit(rescale.to_unit(img.pixel(i)), model, metric, lambda)));
  }
  return out;
}

ColorTriple white_in(ColorSpace space) { return convert_triple({1.0, 1.0, 1.0}, ColorSpace::SRGB, space); }

}  // namespace

std::string_view to_string(DistanceMetric metric) { return metric == DistanceMetric::L22 ? "l22" : "l2"; }

DistanceMetric parse_metric(std::string_view name) {
  const std::string s = lower(name);
  if (s == "l22" || s == "l2sq" || s == "l2^2") return DistanceMetric::L22;
  if (s == "l2") return DistanceMetric::L2;
  throw ConfigError("unknown distance metric '" + std::string(name) + "'");
}

std::string_view to_string(LambdaScale scale) { return scale == LambdaScale::Geometric ? "geometric" : "linear"; }

LambdaScale parse_lambda_scale(std::string_view name) {
  const std::string s = lower(name);
  if (s == "geometric" || s == "log") return LambdaScale::Geometric;
  if (s == "linear") return LambdaScale::Linear;
  throw ConfigError("unknown lambda scale '" + std::string(name) + "'");
}

double l22_value(double x, const ChannelPowerParams& p, double lambda) {
  const double denom = lambda + p.alpha;
  if (!(denom > 0.0)) throw NumericError("lambda + alpha must be positive");
  return (lambda * x - p.beta) / denom;
}

double l2_scale(const ColorTriple& u, const std::array<double, 3>& alpha, double lambda) {
  const double q = alpha[0] * u.c0 * u.c0 + alpha[1] * u.c1 * u.c1 + alpha[2] * u.c2 * u.c2;
  const double norm = std::sqrt(u.c0 * u.c0 + u.c1 * u.c1 + u.c2 * u.c2);
  if (norm == 0.0 || q == 0.0) return 1.0;
  const double mu = std::max(1.0 - lambda * norm / q, 0.0);
  return 1.0 - mu;
}

ImageBuffer transform_l22(const ImageBuffer& img, const PowerModel& model, double lambda) {
  return transform_pixels(img, model, DistanceMetric::L22, lambda);
}

ImageBuffer transform_l2(const ImageBuffer& img, const PowerModel& model, double lambda) {
  return transform_pixels(img, model, DistanceMetric::L2, lambda);
}

ImageBuffer transform_image(const ImageBuffer& img, const PowerModel& model, DistanceMetric metric, double lambda) {
  return transform_pixels(img, model, metric, lambda);
}

double white_power_ratio(const PowerModel& model, DistanceMetric metric, double lambda) {
  const ColorTriple u = model.rescale().to_unit(white_in(model.space()));
  const double p_white = model.pixel_power_unit(u);
  if (!(p_white > 0.0)) throw CalibrationError("white image has non-positive power under this model");
  return model.pixel_power_unit(transform_unit(u, model, metric, lambda)) / p_white;
}

LambdaRange compute_lambda_range(const PowerModel& model, DistanceMetric metric, std::size_t width,
                                 std::size_t height, LambdaScale scale) {
  if (width == 0 || height == 0) throw InputError("calibration canvas must be nonempty");
  const auto ratio = [&](double lambda) { return white_power_ratio(model, metric, lambda); };

  double lo = kBracketLow, hi = kBracketHigh;
  while (ratio(lo) > kWhiteRatioAtMin && lo > kBracketLimitLow) lo /= 10.0;
  while (ratio(hi) < kWhiteRatioAtMax && hi < kBracketLimitHigh) hi *= 10.0;
  const double r_lo = ratio(lo), r_hi = ratio(hi);
  if (r_hi - r_lo < 1e-9) {
    throw CalibrationError("white-image power ratio is insensitive to lambda (stays near " + std::to_string(r_lo) +
                           ")");
  }
  if (r_lo > kWhiteRatioAtMin || r_hi < kWhiteRatioAtMax) {
    throw CalibrationError("white-image power ratio only spans [" + std::to_string(r_lo) + ", " +
                           std::to_string(r_hi) + "]; targets 0.40 and 0.95 must both be reachable");
  }

  const double log_lo = std::log(lo), log_hi = std::log(hi);
  double prev = r_lo;
  for (int i = 1; i < kMonotoneSamples; ++i) {
    const double t = static_cast<double>(i) / (kMonotoneSamples - 1);
    const double r = ratio(std::exp(log_lo + t * (log_hi - log_lo)));
    if (r < prev - 1e-12 * std::max(1.0, std::abs(prev))) {
      throw CalibrationError("white-image power ratio is not monotone in lambda");
    }
    prev = r;
  }

  const auto solve = [&](double target) {
    double a = lo, b = hi;
    while ((b - a) > kBisectionRelTol * a) {
      const double mid = std::sqrt(a * b);
      if (ratio(mid) < target) a = mid;
      else b = mid;
    }
    return std::sqrt(a * b);
  };
  return {solve(kWhiteRatioAtMin), solve(kWhiteRatioAtMax), scale};
}

double denormalize_lambda(const LambdaRange& range, double lambda_norm) {
  if (!(lambda_norm >= 0.0 && lambda_norm <= 1.0)) {
    throw RangeError("normalized lambda outside [0,1]: " + std::to_string(lambda_norm));
  }
  if (!(range.lambda_min > 0.0 && range.lambda_min < range.lambda_max)) {
    throw ConfigError("lambda range must satisfy 0 < min < max");
  }
  if (lambda_norm == 0.0) return range.lambda_min;
  if (lambda_norm == 1.0) return range.lambda_max;
  if (range.scale == LambdaScale::Linear) {
    return range.lambda_min + lambda_norm * (range.lambda_max - range.lambda_min);
  }
  return range.lambda_min * std::pow(range.lambda_max / range.lambda_min, lambda_norm);
}

double normalize_lambda(const LambdaRange& range, double lambda) {
  if (!(range.lambda_min > 0.0 && range.lambda_min < range.lambda_max)) {
    throw ConfigError("lambda range must satisfy 0 < min < max");
  }
  if (range.scale == LambdaScale::Linear) {
    return (lambda - range.lambda_min) / (range.lambda_max - range.lambda_min);
  }
  return std::log(lambda / range.lambda_min) / std::log(range.lambda_max / range.lambda_min);
}

std::vector<double> study_lambda_grid(std::size_t steps) {
  std::vector<double> grid;
  grid.reserve(steps);
  for (std::size_t i = 1; i <= steps; ++i) grid.push_back(static_cast<double>(i) / static_cast<double>(steps));
  return grid;
}

TransformResult apply(const TransformConfig& cfg, const PowerModel& model_srgb, const ImageBuffer& img_srgb) {
  if (img_srgb.space() != ColorSpace::SRGB) throw ConfigError("apply expects an srgb image");
  if (img_srgb.empty()) throw InputError("cannot transform an empty image");
  if (model_srgb.space() != ColorSpace::SRGB) throw ConfigError("apply expects an srgb power model");
  if (cfg.space != ColorSpace::SRGB && cfg.space != ColorSpace::LAB && cfg.space != ColorSpace::UVW) {
    throw ConfigError("transforms run in srgb, lab or uvw");
  }

  TransformResult result;
  result.config = cfg;
  const PowerModel local =
      cfg.space == ColorSpace::SRGB ? model_srgb : refit_in_space(model_srgb, cfg.space, cfg.refit_grid_steps);
  if (cfg.space != ColorSpace::SRGB) result.refit = local.fit_report();

  result.range = compute_lambda_range(local, cfg.metric, img_srgb.width(), img_srgb.height(), cfg.scale);
  result.lambda_raw = denormalize_lambda(result.range, cfg.lambda_norm);

  const ImageBuffer work = convert_image(img_srgb, cfg.space);
  const ImageBuffer transformed = transform_image(work, local, cfg.metric, result.lambda_raw);
  // Only the inverse conversion can leave the gamut; those pixels are
  // clamped per channel and counted.
  ImageBuffer out = convert_image(transformed, ColorSpace::SRGB);
  auto data = out.data();
  for (std::size_t i = 0; i < out.pixel_count(); ++i) {
    bool clamped = false;
    for (std::size_t c = 0; c < 3; ++c) {
      double& v = data[3 * i + c];
      if (v < -kGamutSlack || v > 1.0 + kGamutSlack) clamped = true;
      v = std::clamp(v, 0.0, 1.0);
    }
    if (clamped) ++result.clamped_pixels;
  }
  result.power_in = image_power(model_srgb, img_srgb);
  result.power_out = image_power(model_srgb, out);
  result.saving_pct = result.power_in > 0.0 ? 100.0 * (1.0 - result.power_out / result.power_in) : 0.0;
  result.output = std::move(out);
  return result;
}

}  // namespace wattcolor
