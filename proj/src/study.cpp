#include "wattcolor/study.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "wattcolor/csv.hpp"
#include "wattcolor/errors.hpp"

namespace wattcolor {

namespace {

constexpr int kScanPoints = 400;
constexpr double kGoldenTol = 1e-8;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

double golden_section(const auto& f, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::string_view to_string(ControlKind kind) {
  switch (kind) {
    case ControlKind::None: return "none";
    case ControlKind::Identical: return "identical";
    case ControlKind::Black: return "black";
  }
  return "none";
}

ControlKind parse_control_kind(std::string_view name) {
  const std::string s = lower(name);
  if (s == "none" || s.empty()) return ControlKind::None;
  if (s == "identical") return ControlKind::Identical;
  if (s == "black") return ControlKind::Black;
  throw MalformedDataError("unknown control kind '" + std::string(name) + "'");
}

std::vector<RatingRecord> filter_batches(const std::vector<RatingRecord>& records, const ControlPolicy& policy) {
  struct Controls {
    int identical_count = 0;
    int black_count = 0;
    bool pass = true;
  };
  std::map<std::pair<std::string, std::string>, Controls> submissions;
  for (const auto& r : records) {
    auto& s = submissions[{r.participant, r.batch}];
    if (r.control == ControlKind::Identical) {
      ++s.identical_count;
      if (r.score < policy.identical_min) s.pass = false;
    } else if (r.control == ControlKind::Black) {
      ++s.black_count;
      if (r.score > policy.black_max) s.pass = false;
    }
  }
  for (const auto& [key, s] : submissions) {
    if (s.identical_count != 1 || s.black_count != 1) {
      throw MalformedDataError("batch '" + key.second + "' of participant '" + key.first + "' has " +
                               std::to_string(s.identical_count) + " identical and " +
                               std::to_string(s.black_count) + " black controls; expected one of each");
    }
  }
  std::vector<RatingRecord> out;
  for (const auto& r : records) {
    if (r.control != ControlKind::None) continue;
    if (submissions.at({r.participant, r.batch}).pass) out.push_back(r);
  }
  return out;
}

std::vector<MOSEntry> aggregate_mos(const std::vector<RatingRecord>& records) {
  using Key = std::tuple<std::string, int, int, double>;
  std::map<Key, std::pair<double, std::size_t>> groups;
  for (const auto& r : records) {
    if (r.score < 1 || r.score > 5) throw MalformedDataError("score outside 1-5");
    auto& g = groups[{r.image, static_cast<int>(r.metric), static_cast<int>(r.space), r.lambda_norm}];
    g.first += r.score;
    ++g.second;
  }
  std::vector<MOSEntry> out;
  out.reserve(groups.size());
  for (const auto& [key, g] : groups) {
    MOSEntry e;
    e.image = std::get<0>(key);
    e.metric = static_cast<DistanceMetric>(std::get<1>(key));
    e.space = static_cast<ColorSpace>(std::get<2>(key));
    e.lambda_norm = std::get<3>(key);
    e.mos = g.first / static_cast<double>(g.second);
    e.mos_norm = normalize_mos(e.mos);
    e.n_ratings = g.second;
    out.push_back(e);
  }
  return out;
}

std::vector<BoundaryPoint> lower_boundary(const std::vector<BoundaryPoint>& points, std::size_t raters) {
  if (points.empty()) throw InputError("lower_boundary needs at least one point");
  if (raters == 0) throw ConfigError("rater count must be positive");
  const double levels = 4.0 * static_cast<double>(raters);
  std::map<long, double> min_lambda;
  for (const auto& p : points) {
    const long bin = std::lround(std::clamp(p.mos_norm, 0.0, 1.0) * levels);
    auto [it, inserted] = min_lambda.emplace(bin, p.lambda_norm);
    if (!inserted) it->second = std::min(it->second, p.lambda_norm);
  }
  std::vector<BoundaryPoint> out;
  double running_max = -std::numeric_limits<double>::infinity();
  for (const auto& [bin, lambda] : min_lambda) {
    if (lambda > running_max) {
      out.push_back({static_cast<double>(bin) / levels, lambda});
      running_max = lambda;
    }
  }
  return out;
}

double max_rate() { return std::log(1001.0); }

double lambda_lower_bound(double k, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw RangeError("normalized MOS outside [0,1]");
  if (!(k > 0.0 && k <= max_rate() * (1.0 + 1e-12))) throw RangeError("rate k outside (0, ln 1001]");
  return std::clamp(std::expm1(k * s) / 1000.0, 0.0, 1.0);
}

double lower_bound_residual(double k, const std::vector<BoundaryPoint>& points) {
  double ss = 0.0;
  for (const auto& p : points) {
    const double r = std::expm1(k * p.mos_norm) / 1000.0 - p.lambda_norm;
    ss += r * r;
  }
  return ss;
}

LowerBoundFit fit_k(const std::vector<BoundaryPoint>& boundary) {
  if (boundary.size() < 2) throw InputError("fit_k needs at least 2 boundary points");
  bool any_nonzero = false;
  for (const auto& p : boundary) {
    if (!(p.mos_norm >= 0.0 && p.mos_norm <= 1.0)) throw RangeError("boundary mos_norm outside [0,1]");
    if (!std::isfinite(p.lambda_norm)) throw NumericError("non-finite boundary lambda");
    if (p.lambda_norm != 0.0) any_nonzero = true;
  }
  if (!any_nonzero) throw FitError("degenerate lower-bound fit: every boundary lambda is zero");

  const double k_max = max_rate();
  const auto residual = [&](double k) { return lower_bound_residual(k, boundary); };
  const double step = k_max / kScanPoints;
  int best = 1;
  double best_val = residual(step);
  for (int i = 2; i <= kScanPoints; ++i) {
    const double v = residual(i * step);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const double lo = (best - 1) * step;
  const double hi = std::min((best + 1) * step, k_max);
  double k = golden_section(residual, lo, hi, kGoldenTol);
  // The upper end is closed; golden section never evaluates the endpoint.
  if (residual(k_max) < residual(k)) k = k_max;
  k = std::clamp(k, std::numeric_limits<double>::min(), k_max);

  LowerBoundFit fit;
  fit.k = k;
  fit.rmse = std::sqrt(residual(k) / static_cast<double>(boundary.size()));
  fit.n_boundary = boundary.size();
  return fit;
}

std::string ratings_csv_header() { return "participant,batch,image,metric,space,lambda_norm,score,control"; }

std::string to_csv_row(const RatingRecord& r) {
  require_plain_field(r.participant, "participant id");
  require_plain_field(r.batch, "batch id");
  require_plain_field(r.image, "image id");
  return r.participant + "," + r.batch + "," + r.image + "," + std::string(to_string(r.metric)) + "," +
         std::string(to_string(r.space)) + "," + format_double(r.lambda_norm) + "," + std::to_string(r.score) + "," +
         std::string(to_string(r.control));
}

std::vector<RatingRecord> parse_ratings_csv(std::string_view text, std::string source) {
  const CsvTable t = parse_csv(text, std::move(source));
  const std::size_t c_part = t.column("participant"), c_batch = t.column("batch"), c_image = t.column("image"),
                    c_metric = t.column("metric"), c_space = t.column("space"), c_lambda = t.column("lambda_norm"),
                    c_score = t.column("score"), c_control = t.column("control");
  std::vector<RatingRecord> out;
  out.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::string ctx = t.source + " row " + std::to_string(i + 1);
    RatingRecord r;
    r.participant = row[c_part];
    r.batch = row[c_batch];
    r.image = row[c_image];
    try {
      r.metric = parse_metric(row[c_metric]);
      r.space = parse_color_space(row[c_space]);
    } catch (const ConfigError& e) {
      throw MalformedDataError(ctx + ": " + e.what());
    }
    r.lambda_norm = parse_double(row[c_lambda], ctx);
    if (!(r.lambda_norm >= 0.0 && r.lambda_norm <= 1.0)) throw MalformedDataError(ctx + ": lambda_norm outside [0,1]");
    const long score = parse_long(row[c_score], ctx);
    if (score < 1 || score > 5) throw MalformedDataError(ctx + ": score outside 1-5");
    r.score = static_cast<int>(score);
    r.control = parse_control_kind(row[c_control]);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<RatingRecord> read_ratings_csv(const std::filesystem::path& path) {
  return parse_ratings_csv(read_text_file(path), path.string());
}

LowerBoundPipeline fit_lower_bound_from_ratings(const std::vector<RatingRecord>& records, const std::string& image,
                                                DistanceMetric metric, ColorSpace space, const ControlPolicy& policy,
                                                std::size_t raters) {
  LowerBoundPipeline out;
  out.surviving = filter_batches(records, policy);
  std::vector<BoundaryPoint> points;
  for (const auto& e : aggregate_mos(out.surviving)) {
    if (e.image != image || e.metric != metric || e.space != space) continue;
    out.mos.push_back(e);
    points.push_back({e.mos_norm, e.lambda_norm});
  }
  if (points.empty()) {
    throw LookupError("no surviving ratings for image '" + image + "' with " + std::string(to_string(metric)) + "/" +
                      std::string(to_string(space)));
  }
  out.boundary = lower_boundary(points, raters);
  out.fit = fit_k(out.boundary);
  out.fit.image = image;
  out.fit.metric = metric;
  out.fit.space = space;
  return out;
}

}  // namespace wattcolor
