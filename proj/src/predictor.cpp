#include "wattcolor/predictor.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "wattcolor/csv.hpp"
#include "wattcolor/errors.hpp"
#include "wattcolor/study.hpp"
#include "shuffle.hpp"

namespace wattcolor {

namespace {

constexpr std::size_t kF = FeatureVector::kSize;
using Z = std::array<double, kF>;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<double> basis(RegressorKind kind, const Z& z) {
  std::vector<double> b;
  if (kind == RegressorKind::Linear) {
    b.assign(z.begin(), z.end());
  } else {
    for (double v : z) {
      b.push_back(v);
      b.push_back(v * v);
      b.push_back(v * v * v);
    }
  }
  return b;
}

// Ridge regression with an unpenalized intercept: columns and targets are
// centered, the penalized normal equations solved, the intercept recovered.
std::vector<double> fit_ridge(const std::vector<std::vector<double>>& rows, const std::vector<double>& y, double tau) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(rows.front().size());
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd t(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) X(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    t[i] = y[static_cast<std::size_t>(i)];
  }
  const Eigen::RowVectorXd x_mean = X.colwise().mean();
  const double y_mean = t.mean();
  X.rowwise() -= x_mean;
  t.array() -= y_mean;
  const Eigen::MatrixXd gram = X.transpose() * X + tau * Eigen::MatrixXd::Identity(p, p);
  const Eigen::VectorXd w = gram.ldlt().solve(X.transpose() * t);
  std::vector<double> coef(static_cast<std::size_t>(p) + 1);
  coef[0] = y_mean - x_mean.dot(w);
  for (Eigen::Index j = 0; j < p; ++j) coef[static_cast<std::size_t>(j) + 1] = w[j];
  return coef;
}

double sq_dist(const Z& a, const Z& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < kF; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

double median_pairwise_distance(const std::vector<Z>& zs) {
  std::vector<double> d;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    for (std::size_t j = i + 1; j < zs.size(); ++j) d.push_back(std::sqrt(sq_dist(zs[i], zs[j])));
  }
  if (d.empty()) return 1.0;
  std::sort(d.begin(), d.end());
  const double m = d.size() % 2 ? d[d.size() / 2] : 0.5 * (d[d.size() / 2 - 1] + d[d.size() / 2]);
  return m > 1e-12 ? m : 1.0;
}

// Epsilon-insensitive SVR in the dual, bias absorbed by centering targets:
//   min_b 0.5 b^T K b - r^T b + eps |b|_1,  -C <= b_i <= C.
// Cyclic coordinate descent, each step solved exactly; stops when the
// largest KKT violation drops below tol.
std::vector<double> svr_dual(const Eigen::MatrixXd& K, const std::vector<double>& r, double eps, double C, double tol,
                             std::size_t max_sweeps) {
  const std::size_t n = r.size();
  std::vector<double> beta(n, 0.0);
  std::vector<double> grad(n);  // (K beta)_i - r_i
  for (std::size_t i = 0; i < n; ++i) grad[i] = -r[i];

  const auto violation = [&](std::size_t i) {
    const double g = grad[i], b = beta[i];
    if (b == 0.0) return std::max(std::abs(g) - eps, 0.0);
    if (b >= C) return std::max(g + eps, 0.0);
    if (b <= -C) return std::max(eps - g, 0.0);
    return b > 0.0 ? std::abs(g + eps) : std::abs(g - eps);
  };

  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    for (std::size_t i = 0; i < n; ++i) {
      const double kii = K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
      const double z = kii * beta[i] - grad[i];
      const double soft = std::copysign(std::max(std::abs(z) - eps, 0.0), z);
      const double next = std::clamp(soft / kii, -C, C);
      const double delta = next - beta[i];
      if (delta != 0.0) {
        beta[i] = next;
        for (std::size_t j = 0; j < n; ++j) {
          grad[j] += delta * K(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
        }
      }
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, violation(i));
    if (worst < tol) return beta;
  }
  throw TrainingError("SVR dual did not reach KKT tolerance within " + std::to_string(max_sweeps) + " sweeps");
}

TrainedPredictor train_svr(const std::vector<Z>& zs, const std::vector<double>& y, const Hyperparameters& h,
                           TrainedPredictor p) {
  const std::size_t n = zs.size();
  p.epsilon = h.svr_epsilon;
  p.bandwidth = h.svr_bandwidth.value_or(median_pairwise_distance(zs));
  if (!(p.bandwidth > 0.0)) throw TrainingError("SVR bandwidth must be positive");
  p.target_offset = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = y[i] - p.target_offset;

  const double inv = 1.0 / (2.0 * p.bandwidth * p.bandwidth);
  Eigen::MatrixXd K(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::exp(-sq_dist(zs[i], zs[j]) * inv);
    }
  }
  const auto beta = svr_dual(K, r, h.svr_epsilon, h.svr_c, h.svr_kkt_tolerance, h.svr_max_sweeps);
  for (std::size_t i = 0; i < n; ++i) {
    if (beta[i] != 0.0) {
      p.support_vectors.push_back(zs[i]);
      p.duals.push_back(beta[i]);
    }
  }
  return p;
}

std::size_t find_group_index(const std::vector<TrainingSet>& sets, ColorSpace s, DistanceMetric m) {
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (sets[i].space == s && sets[i].metric == m) return i;
  }
  return sets.size();
}

}  // namespace

std::string_view to_string(RegressorKind kind) {
  switch (kind) {
    case RegressorKind::Linear: return "linear";
    case RegressorKind::Cubic: return "cubic";
    case RegressorKind::SVR: return "svr";
  }
  return "?";
}

RegressorKind parse_regressor_kind(std::string_view name) {
  const std::string s = lower(name);
  if (s == "linear") return RegressorKind::Linear;
  if (s == "cubic") return RegressorKind::Cubic;
  if (s == "svr" || s == "svm") return RegressorKind::SVR;
  throw ConfigError("unknown model kind '" + std::string(name) + "'");
}

std::size_t min_training_rows(RegressorKind kind) {
  switch (kind) {
    case RegressorKind::Linear: return kF + 1;
    case RegressorKind::Cubic: return 2;
    case RegressorKind::SVR: return 1;
  }
  return 1;
}

Standardizer Standardizer::fit(const std::vector<TrainingRow>& rows) {
  Standardizer s;
  if (rows.empty()) return s;
  const double n = static_cast<double>(rows.size());
  for (std::size_t j = 0; j < kF; ++j) {
    double mean = 0.0;
    for (const auto& r : rows) mean += r.features.as_array()[j];
    mean /= n;
    double ss = 0.0;
    for (const auto& r : rows) {
      const double d = r.features.as_array()[j] - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / n);
    s.mean[j] = mean;
    s.scale[j] = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

Z Standardizer::apply(const FeatureVector& f) const {
  const Z a = f.as_array();
  Z z;
  for (std::size_t j = 0; j < kF; ++j) z[j] = (a[j] - mean[j]) / scale[j];
  return z;
}

FeatureVector Standardizer::invert(const Z& z) const {
  Z a;
  for (std::size_t j = 0; j < kF; ++j) a[j] = z[j] * scale[j] + mean[j];
  return FeatureVector::from_array(a);
}

double TrainedPredictor::raw_prediction(const FeatureVector& f) const {
  const Z z = standardizer.apply(f);
  if (kind == RegressorKind::SVR) {
    const double inv = 1.0 / (2.0 * bandwidth * bandwidth);
    double out = target_offset;
    for (std::size_t i = 0; i < duals.size(); ++i) out += duals[i] * std::exp(-sq_dist(z, support_vectors[i]) * inv);
    return out;
  }
  const auto b = basis(kind, z);
  if (coefficients.size() != b.size() + 1) throw ConfigError("predictor coefficient count does not match its kind");
  double out = coefficients[0];
  for (std::size_t j = 0; j < b.size(); ++j) out += coefficients[j + 1] * b[j];
  return out;
}

TrainedPredictor train(const TrainingSet& data, RegressorKind kind, const Hyperparameters& hyper) {
  const std::size_t need = min_training_rows(kind);
  if (data.rows.size() < need) {
    throw TrainingError(std::string(to_string(kind)) + " model needs at least " + std::to_string(need) +
                        " training rows, got " + std::to_string(data.rows.size()));
  }
  TrainedPredictor p;
  p.kind = kind;
  p.space = data.space;
  p.metric = data.metric;
  p.standardizer = Standardizer::fit(data.rows);

  std::vector<Z> zs;
  std::vector<double> y;
  for (const auto& r : data.rows) {
    const auto a = r.features.as_array();
    for (double v : a) {
      if (!std::isfinite(v)) throw TrainingError("non-finite feature in row '" + r.image + "'");
    }
    if (!std::isfinite(r.k)) throw TrainingError("non-finite k in row '" + r.image + "'");
    zs.push_back(p.standardizer.apply(r.features));
    y.push_back(r.k);
  }

  if (kind == RegressorKind::SVR) return train_svr(zs, y, hyper, std::move(p));

  std::vector<std::vector<double>> rows;
  for (const auto& z : zs) rows.push_back(basis(kind, z));
  double tau = hyper.ridge;
  if (kind == RegressorKind::Cubic && rows.size() < rows.front().size() + 1) tau = hyper.cubic_fallback_ridge;
  p.coefficients = fit_ridge(rows, y, tau);
  return p;
}

std::array<double, 5> linear_raw_coefficients(const TrainedPredictor& p) {
  if (p.kind != RegressorKind::Linear || p.coefficients.size() != kF + 1) {
    throw ConfigError("raw coefficients are only defined for linear predictors");
  }
  std::array<double, 5> out{};
  out[0] = p.coefficients[0];
  for (std::size_t j = 0; j < kF; ++j) {
    out[j + 1] = p.coefficients[j + 1] / p.standardizer.scale[j];
    out[0] -= out[j + 1] * p.standardizer.mean[j];
  }
  return out;
}

KPrediction predict_k(const TrainedPredictor& p, const FeatureVector& f) {
  for (double v : f.as_array()) {
    if (!std::isfinite(v)) throw NumericError("feature vector has a non-finite component");
  }
  KPrediction out;
  out.raw = p.raw_prediction(f);
  if (!std::isfinite(out.raw)) throw NumericError("predictor produced a non-finite value");
  const double k_max = max_rate();
  if (out.raw > k_max) {
    out.k = k_max;
    out.clamped = true;
  } else if (out.raw <= 0.0) {
    out.k = kMinRate;
    out.clamped = true;
  } else {
    out.k = out.raw;
  }
  return out;
}

FoldSummary summarize_folds(const std::vector<double>& fold_mse) {
  if (fold_mse.empty()) throw InputError("no folds to summarize");
  const double n = static_cast<double>(fold_mse.size());
  FoldSummary s;
  s.mean = std::accumulate(fold_mse.begin(), fold_mse.end(), 0.0) / n;
  for (double m : fold_mse) s.variance += (m - s.mean) * (m - s.mean);
  s.variance /= n;
  return s;
}

double percent_error(double mse, double k_range) {
  if (!(k_range > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return 100.0 * mse / k_range;
}

CVReport cross_validate(const TrainingSet& data, RegressorKind kind, std::size_t folds, std::uint64_t seed,
                        const Hyperparameters& hyper) {
  if (folds < 2) throw ConfigError("cross validation needs at least 2 folds");
  const std::size_t n = data.rows.size();
  if (n < folds) {
    throw ConfigError("cross validation with " + std::to_string(folds) + " folds needs at least that many rows, got " +
                      std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  detail::seeded_shuffle(order, seed);

  CVReport report;
  report.kind = kind;
  report.folds = folds;
  report.seed = seed;
  std::size_t start = 0;
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t size = n / folds + (f < n % folds ? 1 : 0);
    TrainingSet train_set{data.space, data.metric, {}};
    std::vector<const TrainingRow*> test;
    for (std::size_t i = 0; i < n; ++i) {
      const bool in_test = i >= start && i < start + size;
      if (in_test) test.push_back(&data.rows[order[i]]);
      else train_set.rows.push_back(data.rows[order[i]]);
    }
    start += size;
    const TrainedPredictor p = train(train_set, kind, hyper);
    double se = 0.0;
    for (const auto* row : test) {
      const double d = predict_k(p, row->features).k - row->k;
      se += d * d;
    }
    report.fold_mse.push_back(se / static_cast<double>(test.size()));
  }
  const FoldSummary s = summarize_folds(report.fold_mse);
  report.mse_mean = s.mean;
  report.mse_variance = s.variance;
  const auto [lo, hi] = std::minmax_element(data.rows.begin(), data.rows.end(),
                                            [](const TrainingRow& a, const TrainingRow& b) { return a.k < b.k; });
  report.k_range = hi->k - lo->k;
  report.pct_error = percent_error(report.mse_mean, report.k_range);
  return report;
}

LeaveOneOutResult leave_one_image_out(const TrainingSet& data, const std::string& held_out_image, RegressorKind kind,
                                      const Hyperparameters& hyper) {
  TrainingSet rest{data.space, data.metric, {}};
  const TrainingRow* held = nullptr;
  for (const auto& r : data.rows) {
    if (r.image == held_out_image && !held) held = &r;
    else rest.rows.push_back(r);
  }
  if (!held) throw LookupError("image '" + held_out_image + "' is not in the training set");
  const TrainedPredictor p = train(rest, kind, hyper);
  LeaveOneOutResult out;
  out.image = held_out_image;
  out.truth = held->k;
  out.predicted = predict_k(p, held->features).k;
  out.squared_error = (out.predicted - out.truth) * (out.predicted - out.truth);
  return out;
}

double leave_one_out_mse(const TrainingSet& data, RegressorKind kind, const Hyperparameters& hyper) {
  if (data.rows.empty()) throw InputError("empty training set");
  double total = 0.0;
  for (const auto& r : data.rows) total += leave_one_image_out(data, r.image, kind, hyper).squared_error;
  return total / static_cast<double>(data.rows.size());
}

std::string training_csv_header() { return "image,space,metric,mean_lum,std_lum,std_sat,std_hue,k"; }

std::string to_csv_row(const TrainingSet& set, const TrainingRow& row) {
  require_plain_field(row.image, "image id");
  return row.image + "," + std::string(to_string(set.space)) + "," + std::string(to_string(set.metric)) + "," +
         format_double(row.features.mean_lum) + "," + format_double(row.features.std_lum) + "," +
         format_double(row.features.std_sat) + "," + format_double(row.features.std_hue) + "," + format_double(row.k);
}

std::vector<TrainingSet> parse_training_csv(std::string_view text, std::string source) {
  const CsvTable t = parse_csv(text, std::move(source));
  const std::size_t c_image = t.column("image"), c_space = t.column("space"), c_metric = t.column("metric"),
                    c_ml = t.column("mean_lum"), c_sl = t.column("std_lum"), c_ss = t.column("std_sat"),
                    c_sh = t.column("std_hue"), c_k = t.column("k");
  std::vector<TrainingSet> sets;
  std::map<std::pair<int, int>, std::set<std::string>> seen;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::string ctx = t.source + " row " + std::to_string(i + 1);
    ColorSpace space;
    DistanceMetric metric;
    try {
      space = parse_color_space(row[c_space]);
      metric = parse_metric(row[c_metric]);
    } catch (const ConfigError& e) {
      throw MalformedDataError(ctx + ": " + e.what());
    }
    TrainingRow r;
    r.image = row[c_image];
    r.features = {parse_double(row[c_ml], ctx), parse_double(row[c_sl], ctx), parse_double(row[c_ss], ctx),
                  parse_double(row[c_sh], ctx)};
    r.k = parse_double(row[c_k], ctx);
    if (!seen[{static_cast<int>(space), static_cast<int>(metric)}].insert(r.image).second) {
      throw MalformedDataError(ctx + ": duplicate image '" + r.image + "' within one configuration");
    }
    std::size_t g = find_group_index(sets, space, metric);
    if (g == sets.size()) sets.push_back({space, metric, {}});
    sets[g].rows.push_back(std::move(r));
  }
  return sets;
}

std::vector<TrainingSet> read_training_csv(const std::filesystem::path& path) {
  return parse_training_csv(read_text_file(path), path.string());
}

}  // namespace wattcolor
