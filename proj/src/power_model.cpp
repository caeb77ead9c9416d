#include "wattcolor/power_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "least_squares.hpp"
#include "wattcolor/errors.hpp"

namespace wattcolor {

namespace {

constexpr std::array<const char*, 3> kChannelNames{"r", "g", "b"};

void validate(const std::array<ChannelPowerParams, 3>& params, ColorSpace space, const ChannelRescale& rescale) {
  if (space != ColorSpace::SRGB && space != ColorSpace::LAB && space != ColorSpace::UVW) {
    throw ConfigError("power models live in srgb, lab or uvw, not " + std::string(to_string(space)));
  }
  for (std::size_t c = 0; c < 3; ++c) {
    const auto& p = params[c];
    if (!std::isfinite(p.alpha) || !std::isfinite(p.beta) || !std::isfinite(p.gamma)) {
      throw ConfigError("non-finite power coefficient on channel " + std::to_string(c));
    }
    if (!(p.alpha > 0.0)) throw ConfigError("alpha must be > 0 on channel " + std::to_string(c));
    if (p.gamma < 0.0) throw ConfigError("gamma must be >= 0 on channel " + std::to_string(c));
    if (!(rescale.scale[c] > 0.0)) throw ConfigError("rescale factor must be > 0");
  }
}

double r_squared(const std::vector<double>& truth, const std::vector<double>& pred) {
  double mean = 0.0;
  for (double t : truth) mean += t;
  mean /= static_cast<double>(truth.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ss_res += (truth[i] - pred[i]) * (truth[i] - pred[i]);
    ss_tot += (truth[i] - mean) * (truth[i] - mean);
  }
  return ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
}

}  // namespace

ColorTriple ChannelRescale::to_unit(const ColorTriple& c) const {
  return {(c.c0 - offset[0]) / scale[0], (c.c1 - offset[1]) / scale[1], (c.c2 - offset[2]) / scale[2]};
}

ColorTriple ChannelRescale::from_unit(const ColorTriple& u) const {
  return {u.c0 * scale[0] + offset[0], u.c1 * scale[1] + offset[1], u.c2 * scale[2] + offset[2]};
}

PowerModel::PowerModel(std::array<ChannelPowerParams, 3> params, ColorSpace space, ChannelRescale rescale,
                       std::string provenance)
    : params_(params), space_(space), rescale_(rescale), provenance_(std::move(provenance)) {
  validate(params_, space_, rescale_);
}

PowerModel PowerModel::with_fit_report(FitReport report) const {
  PowerModel m = *this;
  m.report_ = report;
  return m;
}

PowerModel PowerModel::with_params(std::array<ChannelPowerParams, 3> params) const {
  validate(params, space_, rescale_);
  PowerModel m = *this;
  m.params_ = params;
  return m;
}

double PowerModel::pixel_power_unit(const ColorTriple& u) const {
  return params_[0](u.c0) + params_[1](u.c1) + params_[2](u.c2);
}

double image_power(const PowerModel& model, const ImageBuffer& img) {
  if (img.space() != model.space()) {
    throw ConfigError("image is in " + std::string(to_string(img.space())) + " but the power model is in " +
                      std::string(to_string(model.space())));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < img.pixel_count(); ++i) total += model.pixel_power(img.pixel(i));
  return total;
}

PowerModel fit_from_measurements(const std::vector<MeasurementSample>& samples) {
  std::array<std::vector<const MeasurementSample*>, 3> by_channel;
  for (const auto& s : samples) {
    if (s.channel > 2) throw InputError("channel index out of range: " + std::to_string(s.channel));
    if (!(s.intensity >= 0.0 && s.intensity <= 1.0)) throw RangeError("intensity outside [0,1]");
    if (!(s.power >= 0.0)) throw RangeError("measured power must be >= 0");
    by_channel[s.channel].push_back(&s);
  }

  std::array<ChannelPowerParams, 3> params;
  FitReport report;
  std::vector<double> truth, pred;
  for (std::size_t c = 0; c < 3; ++c) {
    const auto& rows = by_channel[c];
    const std::string name = kChannelNames[c];
    if (rows.empty()) throw FitError("no measurements for channel '" + name + "'");
    std::set<double> distinct;
    for (const auto* s : rows) distinct.insert(s->intensity);
    if (distinct.size() < 3) {
      throw FitError("channel '" + name + "' needs at least 3 distinct intensities, got " +
                     std::to_string(distinct.size()));
    }
    Eigen::MatrixXd A(static_cast<Eigen::Index>(rows.size()), 3);
    Eigen::VectorXd b(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double v = rows[i]->intensity;
      const auto r = static_cast<Eigen::Index>(i);
      A(r, 0) = 0.5 * v * v;
      A(r, 1) = v;
      A(r, 2) = 1.0;
      b[r] = rows[i]->power;
    }
    const auto sol = detail::bounded_least_squares(A, b, {std::nullopt, std::nullopt, 0.0});
    if (!sol) throw FitError("rank-deficient design for channel '" + name + "'");
    params[c] = {sol->x[0], sol->x[1], sol->x[2]};
    if (!(params[c].alpha > 0.0)) {
      throw FitError("channel '" + name + "' fits a non-convex curve (alpha = " + std::to_string(params[c].alpha) +
                     ")");
    }
    report.channel_rmse[c] = std::sqrt(sol->ssr / static_cast<double>(rows.size()));
    for (const auto* s : rows) {
      truth.push_back(s->power);
      pred.push_back(params[c](s->intensity));
    }
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) ss += (truth[i] - pred[i]) * (truth[i] - pred[i]);
  report.samples = truth.size();
  report.rmse = std::sqrt(ss / static_cast<double>(truth.size()));
  report.r_squared = r_squared(truth, pred);
  return PowerModel(params, ColorSpace::SRGB, {}, "fitted from " + std::to_string(truth.size()) + " measurements")
      .with_fit_report(report);
}

PowerModel refit_in_space(const PowerModel& model, ColorSpace to, std::size_t grid_steps) {
  if (model.space() != ColorSpace::SRGB) throw ConfigError("refit_in_space expects an srgb model");
  if (to == ColorSpace::SRGB) return model;
  if (to != ColorSpace::LAB && to != ColorSpace::UVW) {
    throw ConfigError("cannot refit a power model in " + std::string(to_string(to)));
  }
  if (grid_steps < 4) throw ConfigError("refit grid needs at least 4 steps per axis");

  const std::size_t n = grid_steps * grid_steps * grid_steps;
  std::vector<ColorTriple> coords;
  std::vector<double> power;
  coords.reserve(n);
  power.reserve(n);
  const double step = 1.0 / static_cast<double>(grid_steps - 1);
  for (std::size_t i = 0; i < grid_steps; ++i) {
    for (std::size_t j = 0; j < grid_steps; ++j) {
      for (std::size_t k = 0; k < grid_steps; ++k) {
        const ColorTriple rgb{i * step, j * step, k * step};
        coords.push_back(convert_triple(rgb, ColorSpace::SRGB, to));
        power.push_back(model.pixel_power_unit(rgb));
      }
    }
  }

  ChannelRescale rescale;
  for (std::size_t c = 0; c < 3; ++c) {
    double lo = coords[0][c], hi = coords[0][c];
    for (const auto& p : coords) {
      lo = std::min(lo, p[c]);
      hi = std::max(hi, p[c]);
    }
    rescale.offset[c] = lo;
    rescale.scale[c] = hi > lo ? hi - lo : 1.0;
  }

  Eigen::MatrixXd A(static_cast<Eigen::Index>(n), 7);
  Eigen::VectorXd b(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const ColorTriple u = rescale.to_unit(coords[i]);
    const auto r = static_cast<Eigen::Index>(i);
    for (std::size_t c = 0; c < 3; ++c) {
      A(r, static_cast<Eigen::Index>(2 * c)) = 0.5 * u[c] * u[c];
      A(r, static_cast<Eigen::Index>(2 * c + 1)) = u[c];
    }
    A(r, 6) = 1.0;
    b[r] = power[i];
  }
  double alpha_scale = 0.0;
  for (const auto& p : model.params()) alpha_scale = std::max(alpha_scale, p.alpha);
  const double floor = kRefitAlphaFloor * alpha_scale;
  const std::vector<std::optional<double>> lower{floor, std::nullopt, floor, std::nullopt, floor, std::nullopt, 0.0};
  const auto sol = detail::bounded_least_squares(A, b, lower);
  if (!sol) throw FitError("refit lattice is rank deficient");

  // Only the total offset is identifiable; it is shared equally.
  const double gamma = sol->x[6] / 3.0;
  std::array<ChannelPowerParams, 3> params;
  for (std::size_t c = 0; c < 3; ++c) {
    params[c] = {sol->x[static_cast<Eigen::Index>(2 * c)], sol->x[static_cast<Eigen::Index>(2 * c + 1)], gamma};
  }

  FitReport report;
  report.samples = n;
  report.rmse = std::sqrt(sol->ssr / static_cast<double>(n));
  std::vector<double> pred(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ColorTriple u = rescale.to_unit(coords[i]);
    pred[i] = params[0](u.c0) + params[1](u.c1) + params[2](u.c2);
  }
  report.r_squared = r_squared(power, pred);
  report.channel_rmse = {report.rmse, report.rmse, report.rmse};

  std::string note = "diagonal refit in " + std::string(to_string(to)) + " over a " + std::to_string(grid_steps) +
                     "^3 srgb lattice";
  if (!model.provenance().empty()) note += "; source: " + model.provenance();
  return PowerModel(params, to, rescale, note).with_fit_report(report);
}

}  // namespace wattcolor
