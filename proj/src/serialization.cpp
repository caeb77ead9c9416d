#include "wattcolor/serialization.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "wattcolor/csv.hpp"
#include "wattcolor/errors.hpp"

namespace wattcolor {

namespace {

constexpr int kFormatVersion = 1;

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw MalformedDataError(std::string("expected an object holding '") + key + "'");
  const auto it = j.find(key);
  if (it == j.end()) throw MalformedDataError(std::string("missing field '") + key + "'");
  return *it;
}

double get_num(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!v.is_number()) throw MalformedDataError(std::string("field '") + key + "' is not a number");
  return v.get<double>();
}

std::string get_str(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_string()) throw MalformedDataError(std::string("field '") + key + "' is not a string");
  return v.get<std::string>();
}

std::uint64_t get_uint(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw MalformedDataError(std::string("field '") + key + "' is not a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::vector<double> get_nums(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_array()) throw MalformedDataError(std::string("field '") + key + "' is not an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (e.is_null()) out.push_back(std::numeric_limits<double>::quiet_NaN());
    else if (e.is_number()) out.push_back(e.get<double>());
    else throw MalformedDataError(std::string("field '") + key + "' holds a non-number");
  }
  return out;
}

template <std::size_t N>
std::array<double, N> get_fixed(const Json& j, const char* key) {
  const auto v = get_nums(j, key);
  if (v.size() != N) throw MalformedDataError(std::string("field '") + key + "' must have " + std::to_string(N) + " entries");
  std::array<double, N> out;
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

template <typename Container>
Json nums(const Container& c) {
  Json a = Json::array();
  for (double v : c) a.push_back(num(v));
  return a;
}

// Re-raises enum parse failures from the domain parsers as data errors.
template <typename F>
auto parse_enum(F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    throw MalformedDataError(e.what());
  }
}

ColorSpace get_space(const Json& j, const char* key = "space") {
  return parse_enum([&] { return parse_color_space(get_str(j, key)); });
}
DistanceMetric get_metric(const Json& j) {
  return parse_enum([&] { return parse_metric(get_str(j, "metric")); });
}
RegressorKind get_kind(const Json& j) {
  return parse_enum([&] { return parse_regressor_kind(get_str(j, "kind")); });
}

constexpr const char* kChannelNames[3] = {"c0", "c1", "c2"};

}  // namespace

Json to_json(const FitReport& r) {
  Json j;
  j["channel_rmse"] = nums(r.channel_rmse);
  j["r_squared"] = num(r.r_squared);
  j["rmse"] = num(r.rmse);
  j["samples"] = r.samples;
  return j;
}

FitReport fit_report_from_json(const Json& j) {
  FitReport r;
  r.channel_rmse = get_fixed<3>(j, "channel_rmse");
  r.r_squared = get_num(j, "r_squared");
  r.rmse = get_num(j, "rmse");
  r.samples = get_uint(j, "samples");
  return r;
}

Json to_json(const PowerModel& m) {
  Json j;
  j["format"] = "wattcolor.power_model";
  j["version"] = kFormatVersion;
  j["space"] = to_string(m.space());
  Json channels;
  for (std::size_t c = 0; c < 3; ++c) {
    const auto& p = m.channel(c);
    channels[kChannelNames[c]] = {{"alpha", num(p.alpha)}, {"beta", num(p.beta)}, {"gamma", num(p.gamma)}};
  }
  j["channels"] = channels;
  j["rescale"] = {{"offset", nums(m.rescale().offset)}, {"scale", nums(m.rescale().scale)}};
  j["provenance"] = m.provenance();
  if (m.fit_report()) j["fit"] = to_json(*m.fit_report());
  return j;
}

namespace {

// The format tag is optional so hand-written documents load; when present
// it must match, and newer versions are refused.
void check_format(const Json& j, const std::string& format) {
  if (!j.is_object()) throw MalformedDataError("expected a JSON object");
  if (j.contains("format") && get_str(j, "format") != format) {
    throw MalformedDataError("expected a '" + format + "' document, got '" + get_str(j, "format") + "'");
  }
  if (j.contains("version") && get_uint(j, "version") > static_cast<std::size_t>(kFormatVersion)) {
    throw MalformedDataError(format + " version " + std::to_string(get_uint(j, "version")) + " is newer than " +
                             std::to_string(kFormatVersion));
  }
}

}  // namespace

PowerModel power_model_from_json(const Json& j) {
  check_format(j, "wattcolor.power_model");
  const Json& ch = field(j, "channels");
  std::array<ChannelPowerParams, 3> params;
  for (std::size_t c = 0; c < 3; ++c) {
    const Json& p = field(ch, kChannelNames[c]);
    params[c] = {get_num(p, "alpha"), get_num(p, "beta"), get_num(p, "gamma")};
  }
  ChannelRescale rescale;
  if (j.contains("rescale")) {
    const Json& r = field(j, "rescale");
    rescale.offset = get_fixed<3>(r, "offset");
    rescale.scale = get_fixed<3>(r, "scale");
  }
  const std::string provenance = j.contains("provenance") ? get_str(j, "provenance") : std::string();
  PowerModel m = parse_enum([&] { return PowerModel(params, get_space(j), rescale, provenance); });
  if (j.contains("fit")) m = m.with_fit_report(fit_report_from_json(j["fit"]));
  return m;
}

Json to_json(const LambdaRange& r) {
  return {{"lambda_min", num(r.lambda_min)}, {"lambda_max", num(r.lambda_max)}, {"scale", to_string(r.scale)}};
}

LambdaRange lambda_range_from_json(const Json& j) {
  LambdaRange r;
  r.lambda_min = get_num(j, "lambda_min");
  r.lambda_max = get_num(j, "lambda_max");
  r.scale = parse_enum([&] { return parse_lambda_scale(get_str(j, "scale")); });
  return r;
}

Json to_json(const TransformConfig& c) {
  return {{"metric", to_string(c.metric)},
          {"space", to_string(c.space)},
          {"lambda_norm", num(c.lambda_norm)},
          {"lambda_scale", to_string(c.scale)},
          {"refit_grid_steps", c.refit_grid_steps}};
}

TransformConfig transform_config_from_json(const Json& j) {
  TransformConfig c;
  c.metric = get_metric(j);
  c.space = get_space(j);
  c.lambda_norm = get_num(j, "lambda_norm");
  c.scale = parse_enum([&] { return parse_lambda_scale(get_str(j, "lambda_scale")); });
  c.refit_grid_steps = get_uint(j, "refit_grid_steps");
  return c;
}

Json to_json(const TransformResult& r) {
  Json j;
  j["config"] = to_json(r.config);
  j["width"] = r.output.width();
  j["height"] = r.output.height();
  j["power_in"] = num(r.power_in);
  j["power_out"] = num(r.power_out);
  j["saving_pct"] = num(r.saving_pct);
  j["clamped_pixels"] = r.clamped_pixels;
  j["lambda_raw"] = num(r.lambda_raw);
  j["lambda_range"] = to_json(r.range);
  j["refit"] = r.refit ? to_json(*r.refit) : Json(nullptr);
  return j;
}

TransformResult transform_result_from_json(const Json& j) {
  TransformResult r;
  r.config = transform_config_from_json(field(j, "config"));
  r.output = ImageBuffer(get_uint(j, "width"), get_uint(j, "height"), ColorSpace::SRGB);
  r.power_in = get_num(j, "power_in");
  r.power_out = get_num(j, "power_out");
  r.saving_pct = get_num(j, "saving_pct");
  r.clamped_pixels = get_uint(j, "clamped_pixels");
  r.lambda_raw = get_num(j, "lambda_raw");
  r.range = lambda_range_from_json(field(j, "lambda_range"));
  if (const Json& refit = field(j, "refit"); !refit.is_null()) r.refit = fit_report_from_json(refit);
  return r;
}

Json to_json(const FeatureVector& f) {
  return {{"mean_lum", num(f.mean_lum)}, {"std_lum", num(f.std_lum)}, {"std_sat", num(f.std_sat)},
          {"std_hue", num(f.std_hue)}};
}

FeatureVector feature_vector_from_json(const Json& j) {
  return {get_num(j, "mean_lum"), get_num(j, "std_lum"), get_num(j, "std_sat"), get_num(j, "std_hue")};
}

Json to_json(const LowerBoundFit& f) {
  return {{"image", f.image},          {"metric", to_string(f.metric)}, {"space", to_string(f.space)},
          {"k", num(f.k)},             {"rmse", num(f.rmse)},           {"n_boundary", f.n_boundary}};
}

LowerBoundFit lower_bound_fit_from_json(const Json& j) {
  LowerBoundFit f;
  f.image = get_str(j, "image");
  f.metric = get_metric(j);
  f.space = get_space(j);
  f.k = get_num(j, "k");
  f.rmse = get_num(j, "rmse");
  f.n_boundary = get_uint(j, "n_boundary");
  return f;
}

Json to_json(const TrainedPredictor& p) {
  Json j;
  j["format"] = "wattcolor.predictor";
  j["version"] = kFormatVersion;
  j["kind"] = to_string(p.kind);
  j["space"] = to_string(p.space);
  j["metric"] = to_string(p.metric);
  j["standardizer"] = {{"mean", nums(p.standardizer.mean)}, {"scale", nums(p.standardizer.scale)}};
  if (p.kind == RegressorKind::SVR) {
    Json sv = Json::array();
    for (const auto& s : p.support_vectors) sv.push_back(nums(s));
    j["kernel"] = {{"type", "rbf"}, {"bandwidth", num(p.bandwidth)}};
    j["epsilon"] = num(p.epsilon);
    j["target_offset"] = num(p.target_offset);
    j["support_vectors"] = sv;
    j["duals"] = nums(p.duals);
  } else {
    j["coefficients"] = nums(p.coefficients);
  }
  return j;
}

TrainedPredictor predictor_from_json(const Json& j) {
  check_format(j, "wattcolor.predictor");
  TrainedPredictor p;
  p.kind = get_kind(j);
  p.space = get_space(j);
  p.metric = get_metric(j);
  const Json& st = field(j, "standardizer");
  p.standardizer.mean = get_fixed<FeatureVector::kSize>(st, "mean");
  p.standardizer.scale = get_fixed<FeatureVector::kSize>(st, "scale");
  for (double s : p.standardizer.scale) {
    if (!(s > 0.0) || !std::isfinite(s)) throw MalformedDataError("standardizer scale must be positive");
  }
  if (p.kind == RegressorKind::SVR) {
    const Json& kernel = field(j, "kernel");
    if (get_str(kernel, "type") != "rbf") throw MalformedDataError("unsupported kernel type");
    p.bandwidth = get_num(kernel, "bandwidth");
    if (!(p.bandwidth > 0.0)) throw MalformedDataError("kernel bandwidth must be positive");
    p.epsilon = get_num(j, "epsilon");
    p.target_offset = get_num(j, "target_offset");
    p.duals = get_nums(j, "duals");
    const Json& sv = field(j, "support_vectors");
    if (!sv.is_array() || sv.size() != p.duals.size()) {
      throw MalformedDataError("support_vectors and duals differ in length");
    }
    for (const auto& row : sv) {
      const Json wrapped = {{"v", row}};
      p.support_vectors.push_back(get_fixed<FeatureVector::kSize>(wrapped, "v"));
    }
  } else {
    p.coefficients = get_nums(j, "coefficients");
    const std::size_t want = p.kind == RegressorKind::Linear ? FeatureVector::kSize + 1 : 3 * FeatureVector::kSize + 1;
    if (p.coefficients.size() != want) {
      throw MalformedDataError(std::string(to_string(p.kind)) + " predictor needs " + std::to_string(want) +
                               " coefficients");
    }
  }
  return p;
}

Json to_json(const CVReport& r) {
  return {{"kind", to_string(r.kind)},     {"folds", r.folds},
          {"seed", r.seed},                {"fold_mse", nums(r.fold_mse)},
          {"mse_mean", num(r.mse_mean)},   {"mse_variance", num(r.mse_variance)},
          {"k_range", num(r.k_range)},     {"pct_error", num(r.pct_error)}};
}

CVReport cv_report_from_json(const Json& j) {
  CVReport r;
  r.kind = get_kind(j);
  r.folds = get_uint(j, "folds");
  r.seed = get_uint(j, "seed");
  r.fold_mse = get_nums(j, "fold_mse");
  r.mse_mean = get_num(j, "mse_mean");
  r.mse_variance = get_num(j, "mse_variance");
  r.k_range = get_num(j, "k_range");
  r.pct_error = get_num(j, "pct_error");
  return r;
}

Json to_json(const LeaveOneOutResult& r) {
  return {{"image", r.image},
          {"predicted", num(r.predicted)},
          {"truth", num(r.truth)},
          {"squared_error", num(r.squared_error)}};
}

LeaveOneOutResult leave_one_out_from_json(const Json& j) {
  LeaveOneOutResult r;
  r.image = get_str(j, "image");
  r.predicted = get_num(j, "predicted");
  r.truth = get_num(j, "truth");
  r.squared_error = get_num(j, "squared_error");
  return r;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json parse_json(std::string_view text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw MalformedDataError(source + ": " + e.what());
  }
}

Json load_json(const std::filesystem::path& path) { return parse_json(read_text_file(path), path.string()); }

void save_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw InputError("write failed for '" + path.string() + "'");
}

std::vector<MeasurementSample> parse_measurements_csv(std::string_view text, std::string source) {
  const CsvTable t = parse_csv(text, std::move(source));
  const std::size_t c_ch = t.column("channel"), c_code = t.column("code"), c_pw = t.column("power_w");
  std::vector<MeasurementSample> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::string ctx = t.source + " row " + std::to_string(i + 1);
    MeasurementSample s;
    const std::string& ch = row[c_ch];
    if (ch == "r" || ch == "R") s.channel = 0;
    else if (ch == "g" || ch == "G") s.channel = 1;
    else if (ch == "b" || ch == "B") s.channel = 2;
    else throw MalformedDataError(ctx + ": channel must be r, g or b, got '" + ch + "'");
    const long code = parse_long(row[c_code], ctx);
    if (code < 0 || code > 255) throw MalformedDataError(ctx + ": code outside 0-255");
    s.intensity = static_cast<double>(code) / 255.0;
    s.power = parse_double(row[c_pw], ctx);
    out.push_back(s);
  }
  if (out.empty()) throw EmptyInputError(t.source + ": no measurement rows");
  return out;
}

std::vector<MeasurementSample> read_measurements_csv(const std::filesystem::path& path) {
  return parse_measurements_csv(read_text_file(path), path.string());
}

}  // namespace wattcolor
