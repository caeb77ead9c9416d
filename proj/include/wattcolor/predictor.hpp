#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wattcolor/colorspace.hpp"
#include "wattcolor/features.hpp"
#include "wattcolor/transform.hpp"

namespace wattcolor {

enum class RegressorKind { Linear, Cubic, SVR };

std::string_view to_string(RegressorKind kind);
RegressorKind parse_regressor_kind(std::string_view name);

struct TrainingRow {
  std::string image;
  FeatureVector features;
  double k = 0.0;
};

// Rows for one (space, metric) configuration. Image ids are unique.
struct TrainingSet {
  ColorSpace space = ColorSpace::SRGB;
  DistanceMetric metric = DistanceMetric::L22;
  std::vector<TrainingRow> rows;
};

struct Hyperparameters {
  double ridge = 1e-8;
  // Used instead of `ridge` when a cubic model has fewer rows than basis
  // functions.
  double cubic_fallback_ridge = 1e-2;
  double svr_epsilon = 0.05;
  double svr_c = 10.0;
  // RBF bandwidth; defaults to the median pairwise distance between
  // standardized training rows.
  std::optional<double> svr_bandwidth;
  double svr_kkt_tolerance = 1e-4;
  std::size_t svr_max_sweeps = 200000;
};

// Minimum training rows per model kind.
std::size_t min_training_rows(RegressorKind kind);

// Per-feature z-scoring with population standard deviation. Constant
// features get scale 1.
struct Standardizer {
  std::array<double, FeatureVector::kSize> mean{};
  std::array<double, FeatureVector::kSize> scale{1.0, 1.0, 1.0, 1.0};

  static Standardizer fit(const std::vector<TrainingRow>& rows);
  std::array<double, FeatureVector::kSize> apply(const FeatureVector& f) const;
  FeatureVector invert(const std::array<double, FeatureVector::kSize>& z) const;
};

struct TrainedPredictor {
  RegressorKind kind = RegressorKind::Linear;
  ColorSpace space = ColorSpace::SRGB;
  DistanceMetric metric = DistanceMetric::L22;
  Standardizer standardizer;

  // Linear / cubic: intercept followed by weights on the standardized basis
  // (z for linear; z, z^2, z^3 per feature for cubic).
  std::vector<double> coefficients;

  // SVR: prediction = target_offset + sum_i dual_i * exp(-|z - sv_i|^2 / (2 h^2)).
  std::vector<std::array<double, FeatureVector::kSize>> support_vectors;
  std::vector<double> duals;
  double bandwidth = 1.0;
  double target_offset = 0.0;
  double epsilon = 0.0;

  // Unclamped model output.
  double raw_prediction(const FeatureVector& f) const;
};

// Training error naming the minimum row count when data is too small.
TrainedPredictor train(const TrainingSet& data, RegressorKind kind, const Hyperparameters& hyper = {});

// Linear model mapped back to raw feature units: {intercept, w_mean_lum,
// w_std_lum, w_std_sat, w_std_hue}.
std::array<double, 5> linear_raw_coefficients(const TrainedPredictor& p);

// Smallest k returned when a prediction is not positive.
inline constexpr double kMinRate = 1e-3;

struct KPrediction {
  double k = 0.0;
  double raw = 0.0;
  bool clamped = false;
};

// Model output clamped into (0, ln 1001].
KPrediction predict_k(const TrainedPredictor& p, const FeatureVector& f);

struct FoldSummary {
  double mean = 0.0;
  double variance = 0.0;  // population variance across folds
};
FoldSummary summarize_folds(const std::vector<double>& fold_mse);

// 100 * mse / k_range; NaN when the range is zero.
double percent_error(double mse, double k_range);

struct CVReport {
  RegressorKind kind = RegressorKind::Linear;
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  std::vector<double> fold_mse;
  double mse_mean = 0.0;
  double mse_variance = 0.0;
  double k_range = 0.0;
  double pct_error = 0.0;
};

// Seeded shuffle, contiguous folds, per-fold test MSE of predict_k.
CVReport cross_validate(const TrainingSet& data, RegressorKind kind, std::size_t folds = 5, std::uint64_t seed = 0,
                        const Hyperparameters& hyper = {});

struct LeaveOneOutResult {
  std::string image;
  double predicted = 0.0;
  double truth = 0.0;
  double squared_error = 0.0;
};

LeaveOneOutResult leave_one_image_out(const TrainingSet& data, const std::string& held_out_image, RegressorKind kind,
                                      const Hyperparameters& hyper = {});

// Mean squared error over holding out every image in turn.
double leave_one_out_mse(const TrainingSet& data, RegressorKind kind, const Hyperparameters& hyper = {});

// CSV: image,space,metric,mean_lum,std_lum,std_sat,std_hue,k
// Returns one TrainingSet per (space, metric), in first-appearance order.
std::vector<TrainingSet> parse_training_csv(std::string_view text, std::string source);
std::vector<TrainingSet> read_training_csv(const std::filesystem::path& path);
std::string training_csv_header();
std::string to_csv_row(const TrainingSet& set, const TrainingRow& row);

}  // namespace wattcolor
