#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "wattcolor/image.hpp"

namespace wattcolor {

// Per-channel quadratic: power(v) = 0.5 * alpha * v^2 + beta * v + gamma.
struct ChannelPowerParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  double operator()(double v) const { return 0.5 * alpha * v * v + beta * v + gamma; }
  friend bool operator==(const ChannelPowerParams&, const ChannelPowerParams&) = default;
};

// Affine map from a space's native coordinates to the [0,1] working
// coordinates the power model is expressed in: u = (c - offset) / scale.
struct ChannelRescale {
  std::array<double, 3> offset{0.0, 0.0, 0.0};
  std::array<double, 3> scale{1.0, 1.0, 1.0};

  ColorTriple to_unit(const ColorTriple& c) const;
  ColorTriple from_unit(const ColorTriple& u) const;
  friend bool operator==(const ChannelRescale&, const ChannelRescale&) = default;
};

struct FitReport {
  std::array<double, 3> channel_rmse{0.0, 0.0, 0.0};
  double r_squared = 1.0;
  double rmse = 0.0;
  std::size_t samples = 0;
  friend bool operator==(const FitReport&, const FitReport&) = default;
};

class PowerModel {
 public:
  // Throws ConfigError unless alpha > 0 and gamma >= 0 on every channel and
  // space is one of SRGB, LAB, UVW.
  PowerModel(std::array<ChannelPowerParams, 3> params, ColorSpace space = ColorSpace::SRGB,
             ChannelRescale rescale = {}, std::string provenance = {});

  const std::array<ChannelPowerParams, 3>& params() const { return params_; }
  const ChannelPowerParams& channel(std::size_t c) const { return params_[c]; }
  ColorSpace space() const { return space_; }
  const ChannelRescale& rescale() const { return rescale_; }
  const std::string& provenance() const { return provenance_; }
  const std::optional<FitReport>& fit_report() const { return report_; }

  PowerModel with_fit_report(FitReport report) const;
  PowerModel with_params(std::array<ChannelPowerParams, 3> params) const;

  // Power of one pixel given in the model's working [0,1] coordinates.
  double pixel_power_unit(const ColorTriple& u) const;
  // Power of one pixel given in the space's native coordinates.
  double pixel_power(const ColorTriple& c) const { return pixel_power_unit(rescale_.to_unit(c)); }

  friend bool operator==(const PowerModel&, const PowerModel&) = default;

 private:
  std::array<ChannelPowerParams, 3> params_;
  ColorSpace space_;
  ChannelRescale rescale_;
  std::string provenance_;
  std::optional<FitReport> report_;
};

// Display power of a whole image. The image must be tagged with model.space().
double image_power(const PowerModel& model, const ImageBuffer& img);

struct MeasurementSample {
  std::size_t channel = 0;  // 0 = r, 1 = g, 2 = b
  double intensity = 0.0;   // normalized drive level in [0,1]
  double power = 0.0;       // watts
};

// Per-channel least squares on [0.5 v^2, v, 1]. gamma is constrained to be
// non-negative; a non-convex channel (alpha <= 0) is a FitError, as is a
// channel with fewer than 3 distinct intensities.
PowerModel fit_from_measurements(const std::vector<MeasurementSample>& samples);

// Lower bound applied to refitted alphas, relative to the largest alpha of
// the source model, so every working-space model stays strictly convex.
inline constexpr double kRefitAlphaFloor = 1e-6;

// Re-expresses an sRGB model as a diagonal quadratic in the coordinates of
// `to` (LAB or UVW), rescaled to [0,1] over the bounding box of a
// grid_steps^3 lattice of the sRGB cube. Power at each lattice point is
// taken from the sRGB model; cross-channel coupling is dropped and the
// fit quality is returned in fit_report(). Requesting SRGB returns the model
// unchanged.
PowerModel refit_in_space(const PowerModel& model, ColorSpace to, std::size_t grid_steps = 16);

}  // namespace wattcolor
