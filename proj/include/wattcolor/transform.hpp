#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "wattcolor/image.hpp"
#include "wattcolor/power_model.hpp"

namespace wattcolor {

// Fidelity term of the power/fidelity trade-off: squared Euclidean (L22) or
// Euclidean (L2) distance between the transformed and original pixel.
enum class DistanceMetric { L22, L2 };

std::string_view to_string(DistanceMetric metric);
DistanceMetric parse_metric(std::string_view name);

// How a normalized lambda in [0,1] maps onto [lambda_min, lambda_max].
// Geometric interpolates log(lambda); Linear interpolates lambda itself.
enum class LambdaScale { Geometric, Linear };

std::string_view to_string(LambdaScale scale);
LambdaScale parse_lambda_scale(std::string_view name);

inline constexpr double kWhiteRatioAtMax = 0.95;
inline constexpr double kWhiteRatioAtMin = 0.40;

struct LambdaRange {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  LambdaScale scale = LambdaScale::Geometric;
  friend bool operator==(const LambdaRange&, const LambdaRange&) = default;
};

struct TransformConfig {
  DistanceMetric metric = DistanceMetric::L22;
  ColorSpace space = ColorSpace::SRGB;
  double lambda_norm = 1.0;
  LambdaScale scale = LambdaScale::Geometric;
  std::size_t refit_grid_steps = 16;
  friend bool operator==(const TransformConfig&, const TransformConfig&) = default;
};

struct TransformResult {
  ImageBuffer output;  // sRGB
  double power_in = 0.0;
  double power_out = 0.0;
  double saving_pct = 0.0;
  std::size_t clamped_pixels = 0;
  double lambda_raw = 0.0;
  LambdaRange range;
  TransformConfig config;
  std::optional<FitReport> refit;  // set when the power model was refitted
};

// Closed-form per-channel minimizer of
//   0.5 a y^2 + b y + 0.5 lambda (y - x)^2,
// i.e. y = (lambda x - b) / (lambda + a). Not clamped.
double l22_value(double x, const ChannelPowerParams& p, double lambda);

// Scale factor c = 1 - mu applied to pixel u by the L2 transform, with
//   mu = max(1 - lambda ||u|| / (u^T D_alpha u), 0)
// and c = 1 for the zero pixel. Restricted to the ray through u this is the
// exact minimizer of 0.5 y^T D_alpha y + lambda ||y - u||; off the ray it
// is exact only when D_alpha is a multiple of the identity. A (mu + 1)
// coefficient would scale pixels up and raise power.
double l2_scale(const ColorTriple& u, const std::array<double, 3>& alpha, double lambda);

// Whole-image transforms. The image must be tagged with model.space();
// values are mapped into the model's unit coordinates, transformed, clamped
// to [0,1] there, and mapped back. The L2 transform ignores beta and gamma.
ImageBuffer transform_l22(const ImageBuffer& img, const PowerModel& model, double lambda);
ImageBuffer transform_l2(const ImageBuffer& img, const PowerModel& model, double lambda);
ImageBuffer transform_image(const ImageBuffer& img, const PowerModel& model, DistanceMetric metric, double lambda);

// P(T(white, lambda)) / P(white) under `model`, white taken in model.space().
double white_power_ratio(const PowerModel& model, DistanceMetric metric, double lambda);

// Lambda values at which a white image keeps 95% (lambda_max) and 40%
// (lambda_min) of its power. The ratio of a uniform image does not depend on
// its size, so width/height are only validated. Searches the bracket
// [1e-6, 1e9], widened by decades when needed, after checking the ratio is
// monotone on it. Throws CalibrationError if a target is out of reach.
LambdaRange compute_lambda_range(const PowerModel& model, DistanceMetric metric, std::size_t width = 1,
                                 std::size_t height = 1, LambdaScale scale = LambdaScale::Geometric);

double denormalize_lambda(const LambdaRange& range, double lambda_norm);
double normalize_lambda(const LambdaRange& range, double lambda);

// Normalized lambda grid used by the rating study: 0.05, 0.10, ..., 1.00.
std::vector<double> study_lambda_grid(std::size_t steps = 20);

// End to end: sRGB in, transform in cfg.space, sRGB out. Power figures are
// evaluated with the sRGB model on the input and on the clamped output.
TransformResult apply(const TransformConfig& cfg, const PowerModel& model_srgb, const ImageBuffer& img_srgb);

}  // namespace wattcolor
