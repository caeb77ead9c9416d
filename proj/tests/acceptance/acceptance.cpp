// Acceptance checks, one line per criterion:
//   PASS|FAIL <name>: <measurement>
// With a criterion name as the only argument just that one runs; the exit
// status is nonzero when any executed criterion fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "datasets.hpp"
#include "oracles.hpp"
#include "wattcolor/colorspace.hpp"
#include "wattcolor/predictor.hpp"
#include "wattcolor/serialization.hpp"
#include "wattcolor/study.hpp"
#include "wattcolor/transform.hpp"

#if !defined(WATTCOLOR_CLI) || !defined(WATTCOLOR_DATA_DIR) || !defined(WATTCOLOR_FIXTURE_DIR)
#error "acceptance needs WATTCOLOR_CLI, WATTCOLOR_DATA_DIR and WATTCOLOR_FIXTURE_DIR"
#endif

namespace {

using namespace wattcolor;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
  std::vector<std::string> info;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

PowerModel uniform_model(double a, double b = 0.0, double g = 0.0) {
  return PowerModel({ChannelPowerParams{a, b, g}, {a, b, g}, {a, b, g}});
}

Outcome l22_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double a = 0.1 + 4.9 * u(rng), b = u(rng), lam = 0.01 + 99.99 * u(rng), x = u(rng);
    const double want = oracle::nested_grid_min_1d(
        [&](double y) { return oracle::l22_objective(y, x, a, b, lam); }, -10.0, 10.0);
    worst = std::max(worst, std::abs(l22_value(x, {a, b, 0}, lam) - want));
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-6 && secs < 5.0, fmt("1000 draws, max |y - y_oracle| = %.2e, %.2f s", worst, secs), {}};
}

Outcome l2_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  int gap_fail = 0, beat_fail = 0, shrinking = 0, isotropic_fail = 0;
  double worst_gap = 0.0;
  for (int i = 0; i < 200; ++i) {
    const std::array<double, 3> x{u(rng), u(rng), u(rng)};
    const std::array<double, 3> alpha{0.1 + 4.9 * u(rng), 0.1 + 4.9 * u(rng), 0.1 + 4.9 * u(rng)};
    const double lam = 0.01 + 4.99 * u(rng);
    const auto f = [&](const std::array<double, 3>& y) { return oracle::l2_objective(y, x, alpha, lam); };
    const double c = l2_scale({x[0], x[1], x[2]}, alpha, lam);
    const double mu = 1.0 - c;
    const std::array<double, 3> ours{c * x[0], c * x[1], c * x[2]};
    const std::array<double, 3> inflated{(mu + 1) * x[0], (mu + 1) * x[1], (mu + 1) * x[2]};
    const auto best = oracle::nested_grid_min_3d(f, {-0.25, -0.25, -0.25}, {1.25, 1.25, 1.25}, {x, ours});
    const double gap = f(ours) - best.value;
    worst_gap = std::max(worst_gap, gap);
    if (gap >= 1e-8) ++gap_fail;
    if (mu > 0) {
      ++shrinking;
      if (!(f(ours) < f(inflated))) ++beat_fail;
    }
    // Same pixel with an isotropic D of equal trace: the ray restriction is
    // exact there.
    const double a_iso = (alpha[0] + alpha[1] + alpha[2]) / 3;
    const std::array<double, 3> iso{a_iso, a_iso, a_iso};
    const auto fi = [&](const std::array<double, 3>& y) { return oracle::l2_objective(y, x, iso, lam); };
    const double ci = l2_scale({x[0], x[1], x[2]}, iso, lam);
    const auto best_iso = oracle::nested_grid_min_3d(fi, {-0.25, -0.25, -0.25}, {1.25, 1.25, 1.25}, {x});
    if (fi({ci * x[0], ci * x[1], ci * x[2]}) - best_iso.value >= 1e-8) ++isotropic_fail;
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = gap_fail == 0 && beat_fail == 0 && secs < 30.0;
  o.detail = fmt("%d/200 draws exceed the 1e-8 objective gap (max %.2e); (1-mu) beats (mu+1) on %d/%d shrinking draws; "
                 "%.1f s",
                 gap_fail, worst_gap, shrinking - beat_fail, shrinking, secs);
  o.info.push_back(fmt("isotropic D with the same pixels: %d/200 draws exceed the gap. The scaled-pixel form is the "
                       "exact minimizer only when D is a multiple of the identity; for anisotropic D the true "
                       "minimizer leaves the ray through x.",
                       isotropic_fail));
  return o;
}

Outcome lambda_range_anchors() {
  const auto m = uniform_model(2.0);
  const auto r = compute_lambda_range(m, DistanceMetric::L22, 8, 8);
  const double want_max = 2 / (std::pow(0.95, -0.5) - 1), want_min = 2 / (std::pow(0.40, -0.5) - 1);
  const double rel_max = std::abs(r.lambda_max / want_max - 1), rel_min = std::abs(r.lambda_min / want_min - 1);
  const auto white = ImageBuffer::filled(8, 8, ColorSpace::SRGB, {1, 1, 1});
  TransformConfig cfg;
  cfg.lambda_norm = 1.0;
  const auto hi = apply(cfg, m, white);
  cfg.lambda_norm = 0.0;
  const auto lo = apply(cfg, m, white);
  const double ratio_hi = hi.power_out / hi.power_in, ratio_lo = lo.power_out / lo.power_in;
  const bool pass = rel_max < 1e-4 && rel_min < 1e-4 && std::abs(ratio_hi - 0.95) <= 0.005 &&
                    std::abs(ratio_lo - 0.40) <= 0.005;
  return {pass,
          fmt("lambda_max %.6f (rel err %.1e), lambda_min %.6f (rel err %.1e); white ratio %.5f at 1.0, %.5f at 0.0",
              r.lambda_max, rel_max, r.lambda_min, rel_min, ratio_hi, ratio_lo),
          {}};
}

Outcome saving_50pct() {
  const auto m = power_model_from_json(load_json(fs::path(WATTCOLOR_DATA_DIR) / "model_synthetic_srgb.json"));
  const auto white = ImageBuffer::filled(8, 8, ColorSpace::SRGB, {1, 1, 1});
  TransformConfig cfg;
  cfg.lambda_norm = 0.1;
  const double geo = apply(cfg, m, white).saving_pct;
  cfg.scale = LambdaScale::Linear;
  const double lin = apply(cfg, m, white).saving_pct;
  return {geo >= 45.0 && geo <= 60.0,
          fmt("synthetic model, L22, lambda_norm 0.1 on white: %.2f%% saving (geometric lambda scale)", geo),
          {fmt("the linear lambda scale gives %.2f%% at the same setting", lin)}};
}

Outcome rate_recovery() {
  std::uniform_real_distribution<double> noise(-0.01, 0.01);
  bool pass = true;
  std::string detail;
  std::vector<std::string> info;
  for (double k_true : {2.0, 4.0, 6.0}) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(k_true * 1000));
    int ok = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<BoundaryPoint> pts;
      for (int j = 0; j <= 20; ++j) {
        const double s = j / 20.0;
        pts.push_back({s, std::clamp(lambda_lower_bound(k_true, s) + noise(rng), 0.0, 1.0)});
      }
      const double err = std::abs(fit_k(pts).k / k_true - 1);
      worst = std::max(worst, err);
      if (err <= 0.02) ++ok;
    }
    if (ok != 100) pass = false;
    detail += fmt("%sk*=%.0f %d/100 within 2%% (worst %.1f%%)", detail.empty() ? "" : "; ", k_true, ok, 100 * worst);
  }
  info.push_back(
      fmt("at k*=2 the whole curve stays below lambda %.4f, under the +-0.01 noise amplitude; at k*=4 it reaches "
          "%.4f",
          lambda_lower_bound(2.0, 1.0), lambda_lower_bound(4.0, 1.0)));
  for (double k_true : {2.0, 4.0}) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(k_true * 7919));
    std::uniform_real_distribution<double> rel(-0.01, 0.01);
    int ok = 0;
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<BoundaryPoint> pts;
      for (int j = 0; j <= 20; ++j) {
        const double s = j / 20.0;
        pts.push_back({s, lambda_lower_bound(k_true, s) * (1 + rel(rng))});
      }
      if (std::abs(fit_k(pts).k / k_true - 1) <= 0.02) ++ok;
    }
    info.push_back(fmt("with +-1%% relative noise instead, k*=%.0f recovers within 2%% in %d/100 trials", k_true, ok));
  }
  return {pass, detail, info};
}

Outcome monotonicity() {
  const auto m = power_model_from_json(load_json(fs::path(WATTCOLOR_DATA_DIR) / "model_synthetic_srgb.json"));
  const auto range22 = compute_lambda_range(m, DistanceMetric::L22);
  const auto range2 = compute_lambda_range(m, DistanceMetric::L2);
  int violations = 0, checks = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    ImageBuffer img(16, 16, ColorSpace::SRGB);
    for (auto& v : img.data()) v = u(rng);
    for (const auto metric : {DistanceMetric::L22, DistanceMetric::L2}) {
      const auto& range = metric == DistanceMetric::L22 ? range22 : range2;
      double prev_p = -1.0, prev_d = std::numeric_limits<double>::infinity();
      for (double norm : study_lambda_grid()) {
        const auto out = transform_image(img, m, metric, denormalize_lambda(range, norm));
        double d2 = 0.0;
        for (std::size_t i = 0; i < img.pixel_count(); ++i) {
          const auto x = img.pixel(i), y = out.pixel(i);
          double sq = 0.0;
          for (std::size_t c = 0; c < 3; ++c) sq += (y[c] - x[c]) * (y[c] - x[c]);
          d2 += metric == DistanceMetric::L22 ? sq : std::sqrt(sq);
        }
        const double p = image_power(m, out);
        checks += 2;
        if (p < prev_p * (1 - 1e-12)) ++violations;
        if (d2 > prev_d * (1 + 1e-12)) ++violations;
        prev_p = p;
        prev_d = d2;
      }
    }
  }
  int lb_violations = 0;
  for (int i = 1; i <= 50; ++i) {
    for (int j = 0; j < 50; ++j) {
      const double k = max_rate() * i / 50.0, s = j / 49.0;
      if (j > 0 && !(lambda_lower_bound(k, s) > lambda_lower_bound(k, (j - 1) / 49.0))) ++lb_violations;
      if (i > 1 && j > 0 && !(lambda_lower_bound(k, s) > lambda_lower_bound(max_rate() * (i - 1) / 50.0, s))) {
        ++lb_violations;
      }
    }
  }
  return {violations == 0 && lb_violations == 0,
          fmt("%d/%d image checks violated (20 images x 2 metrics x 20 lambdas); %d violations on the 50x50 "
              "lambda_LB grid (s > 0)",
              violations, checks, lb_violations),
          {}};
}

Outcome study_fixture() {
  const fs::path dir = WATTCOLOR_FIXTURE_DIR;
  const auto records = read_ratings_csv(dir / "ratings_fixture.csv");
  std::ifstream f(dir / "ratings_fixture_expected.json");
  const auto expected = nlohmann::json::parse(f);
  int mismatches = 0;
  const auto surviving = filter_batches(records);
  if (surviving.size() != expected["filter"]["surviving_records"].get<std::size_t>()) ++mismatches;
  const auto mos = aggregate_mos(surviving);
  for (const std::string image : {"imgA", "imgB"}) {
    const auto& want = expected["mos"][image];
    std::size_t n = 0;
    for (const auto& e : mos) {
      if (e.image != image) continue;
      if (n >= want.size() || e.lambda_norm != want[n]["lambda_norm"].get<double>() ||
          e.mos != want[n]["mos"].get<double>() || e.mos_norm != want[n]["mos_norm"].get<double>()) {
        ++mismatches;
      }
      ++n;
    }
    if (n != want.size()) ++mismatches;
    const auto run = fit_lower_bound_from_ratings(records, image, DistanceMetric::L22, ColorSpace::SRGB);
    const auto& wb = expected["boundary"][image];
    if (run.boundary.size() != wb.size()) {
      ++mismatches;
    } else {
      for (std::size_t i = 0; i < wb.size(); ++i) {
        if (run.boundary[i].mos_norm != wb[i][0].get<double>() || run.boundary[i].lambda_norm != wb[i][1].get<double>()) {
          ++mismatches;
        }
      }
    }
  }
  const auto fit = fit_lower_bound_from_ratings(records, "imgA", DistanceMetric::L22, ColorSpace::SRGB).fit;
  const double k_want = expected["fit"]["k"].get<double>();
  if (std::abs(fit.k - k_want) > 1e-7 || fit.rmse > 1e-9) ++mismatches;
  return {mismatches == 0,
          fmt("%zu surviving records, %zu MOS entries, imgA k = %.9f (expected %.9f), %d mismatches", surviving.size(),
              mos.size(), fit.k, k_want, mismatches),
          {}};
}

Outcome predictor_suite() {
  const auto cv = cross_validate(datasets::linear(20, 11), RegressorKind::Linear, 5, 42);
  const auto data = datasets::nonlinear(14, 15);
  const double svr = leave_one_out_mse(data, RegressorKind::SVR);
  const double lin = leave_one_out_mse(data, RegressorKind::Linear);
  const double cubic = leave_one_out_mse(data, RegressorKind::Cubic);
  return {cv.pct_error < 0.1 && svr < lin,
          fmt("noiseless linear 5-fold pct_error %.2e%%; nonlinear leave-one-out MSE SVR %.4f vs LINEAR %.4f",
              cv.pct_error, svr, lin),
          {fmt("CUBIC leave-one-out MSE on the same data: %.4f", cubic)}};
}

Outcome color_roundtrip() {
  double worst = 0.0;
  for (const auto space : {ColorSpace::LAB, ColorSpace::UVW}) {
    for (int i = 0; i < 16; ++i) {
      for (int j = 0; j < 16; ++j) {
        for (int k = 0; k < 16; ++k) {
          const ColorTriple c{i / 15.0, j / 15.0, k / 15.0};
          const auto back = convert_triple(convert_triple(c, ColorSpace::SRGB, space), space, ColorSpace::SRGB);
          for (std::size_t ch = 0; ch < 3; ++ch) worst = std::max(worst, std::abs(back[ch] - c[ch]));
        }
      }
    }
  }
  return {worst < 1e-4, fmt("max channel error over 2 x 16^3 round trips: %.2e", worst), {}};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome e2e_determinism() {
  const fs::path data = WATTCOLOR_DATA_DIR;
  const fs::path dir = fs::temp_directory_path() / "wattcolor_acceptance_e2e";
  fs::remove_all(dir);
  fs::create_directories(dir);
  for (int i = 0; i < 2; ++i) {
    const std::string cmd = std::string("'") + WATTCOLOR_CLI + "' auto-transform '" + (data / "sample.png").string() +
                            "' '" + (data / "model_synthetic_srgb.json").string() + "' '" +
                            (data / "predictor_synthetic_svr.json").string() + "' '" +
                            (dir / ("out" + std::to_string(i) + ".png")).string() + "' --target-mos 3.5 --report '" +
                            (dir / ("report" + std::to_string(i) + ".json")).string() + "' > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return {false, fmt("run %d exited with status %d", i, status), {}};
  }
  const auto png0 = slurp(dir / "out0.png"), png1 = slurp(dir / "out1.png");
  const auto rep0 = slurp(dir / "report0.json"), rep1 = slurp(dir / "report1.json");
  const bool same = !png0.empty() && png0 == png1 && !rep0.empty() && rep0 == rep1;
  fs::remove_all(dir);
  return {same, fmt("two auto-transform runs on sample.png: PNG %s (%zu bytes), report %s", png0 == png1 ? "identical" : "differs",
                    png0.size(), rep0 == rep1 ? "identical" : "differs"),
          {}};
}

struct Criterion {
  const char* name;
  Outcome (*run)();
};

constexpr Criterion kCriteria[] = {
    {"l22_oracle", l22_oracle},
    {"l2_oracle", l2_oracle},
    {"lambda_range_anchors", lambda_range_anchors},
    {"saving_50pct", saving_50pct},
    {"rate_recovery", rate_recovery},
    {"monotonicity", monotonicity},
    {"study_fixture", study_fixture},
    {"predictor_suite", predictor_suite},
    {"color_roundtrip", color_roundtrip},
    {"e2e_determinism", e2e_determinism},
};

}  // namespace

int main(int argc, char** argv) {
  const std::string only = argc > 1 ? argv[1] : "";
  if (only == "--list") {
    for (const auto& c : kCriteria) std::cout << c.name << "\n";
    return 0;
  }
  bool any = false, all_pass = true;
  for (const auto& c : kCriteria) {
    if (!only.empty() && only != c.name) continue;
    any = true;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what(), {}};
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail << "\n";
    for (const auto& line : o.info) std::cout << "  info: " << line << "\n";
    all_pass = all_pass && o.pass;
  }
  if (!any) {
    std::cerr << "unknown criterion '" << only << "'\n";
    return 2;
  }
  return all_pass ? 0 : 1;
}
