// wattcolor: command-line front end.
//
// Exit status: 0 success, 1 runtime failure, 2 usage error (bad flags,
// out-of-range arguments, empty input files).

#include <CLI11.hpp>

#include <csignal>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include "wattcolor/errors.hpp"
#include "wattcolor/features.hpp"
#include "wattcolor/png_io.hpp"
#include "wattcolor/predictor.hpp"
#include "wattcolor/serialization.hpp"
#include "wattcolor/study.hpp"
#include "wattcolor/study_server.hpp"
#include "wattcolor/transform.hpp"

namespace wc = wattcolor;

namespace {

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const wc::Json& j, const std::string& path) {
  if (path.empty() || path == "-") std::cout << wc::dump(j);
  else wc::save_json(path, j);
}

wc::TrainingSet select_group(const std::vector<wc::TrainingSet>& groups, const std::string& source,
                             const std::string& space, const std::string& metric) {
  std::optional<wc::ColorSpace> want_space;
  std::optional<wc::DistanceMetric> want_metric;
  if (!space.empty()) want_space = wc::parse_color_space(space);
  if (!metric.empty()) want_metric = wc::parse_metric(metric);
  std::vector<const wc::TrainingSet*> hits;
  for (const auto& g : groups) {
    if ((!want_space || g.space == *want_space) && (!want_metric || g.metric == *want_metric)) hits.push_back(&g);
  }
  if (hits.empty()) throw wc::LookupError(source + ": no rows for the requested space/metric");
  if (hits.size() > 1) throw UsageError(source + ": several space/metric groups present; pick one with --space and --metric");
  return *hits.front();
}

wc::StudyServer* g_server = nullptr;
void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Power-saving color transforms for emissive displays"};
  app.require_subcommand(1);
  std::function<void()> run;

  // calibrate
  std::string cal_csv, cal_out;
  auto* cal = app.add_subcommand("calibrate", "Fit a power model from channel,code,power_w measurements");
  cal->add_option("measurements", cal_csv, "Measurement CSV")->required();
  cal->add_option("out", cal_out, "Output model JSON")->required();
  cal->callback([&] {
    run = [&] {
      const auto model = wc::fit_from_measurements(wc::read_measurements_csv(cal_csv));
      wc::save_json(cal_out, wc::to_json(model));
    };
  });

  // transform
  std::string tr_in, tr_model, tr_out, tr_report, tr_metric = "l22", tr_space = "srgb", tr_scale = "geometric";
  double tr_lambda = 1.0;
  auto* tr = app.add_subcommand("transform", "Apply a power-saving transform to a PNG");
  tr->add_option("input", tr_in, "Input PNG")->required();
  tr->add_option("model", tr_model, "sRGB power model JSON")->required();
  tr->add_option("output", tr_out, "Output PNG")->required();
  tr->add_option("--metric", tr_metric, "l22 or l2")->capture_default_str();
  tr->add_option("--space", tr_space, "srgb, lab or uvw")->capture_default_str();
  tr->add_option("--lambda-norm", tr_lambda, "Normalized lambda in [0,1]")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  tr->add_option("--lambda-scale", tr_scale, "geometric or linear")->capture_default_str();
  tr->add_option("--report", tr_report, "TransformResult JSON ('-' for stdout)");
  tr->callback([&] {
    run = [&] {
      wc::TransformConfig cfg;
      cfg.metric = wc::parse_metric(tr_metric);
      cfg.space = wc::parse_color_space(tr_space);
      cfg.lambda_norm = tr_lambda;
      cfg.scale = wc::parse_lambda_scale(tr_scale);
      const auto model = wc::power_model_from_json(wc::load_json(tr_model));
      const auto result = wc::apply(cfg, model, wc::read_png(tr_in));
      wc::write_png(tr_out, result.output);
      if (!tr_report.empty()) emit(wc::to_json(result), tr_report);
    };
  });

  // auto-transform
  std::string at_in, at_model, at_pred, at_out, at_report, at_scale = "geometric";
  double at_mos = 0.0;
  auto* at = app.add_subcommand("auto-transform", "Pick lambda from a trained predictor and a target quality score");
  at->add_option("input", at_in, "Input PNG")->required();
  at->add_option("model", at_model, "sRGB power model JSON")->required();
  at->add_option("predictor", at_pred, "Trained predictor JSON")->required();
  at->add_option("output", at_out, "Output PNG")->required();
  at->add_option("--target-mos", at_mos, "Target mean opinion score in [1,5]")->required();
  at->add_option("--lambda-scale", at_scale, "geometric or linear")->capture_default_str();
  at->add_option("--report", at_report, "Report JSON ('-' for stdout)");
  at->callback([&] {
    run = [&] {
      if (!(at_mos >= 1.0 && at_mos <= 5.0)) throw UsageError("--target-mos must lie in [1,5]");
      const auto model = wc::power_model_from_json(wc::load_json(at_model));
      const auto predictor = wc::predictor_from_json(wc::load_json(at_pred));
      const auto img = wc::read_png(at_in);
      const auto features = wc::extract_features(img);
      const auto k = wc::predict_k(predictor, features);
      const double s = wc::normalize_mos(at_mos);
      wc::TransformConfig cfg;
      cfg.metric = predictor.metric;
      cfg.space = predictor.space;
      cfg.lambda_norm = wc::lambda_lower_bound(k.k, s);
      cfg.scale = wc::parse_lambda_scale(at_scale);
      const auto result = wc::apply(cfg, model, img);
      wc::write_png(at_out, result.output);
      wc::Json report;
      report["target_mos"] = at_mos;
      report["mos_norm"] = s;
      report["features"] = wc::to_json(features);
      report["predicted_k"] = k.k;
      report["k_raw"] = k.raw;
      report["k_clamped"] = k.clamped;
      report["lambda_lb"] = cfg.lambda_norm;
      report["lambda_raw"] = result.lambda_raw;
      report["saving_pct"] = result.saving_pct;
      report["transform"] = wc::to_json(result);
      emit(report, at_report);
    };
  });

  // fit-lb
  std::string lb_csv, lb_out, lb_image, lb_metric, lb_space;
  std::size_t lb_raters = 5;
  wc::ControlPolicy lb_policy;
  auto* lb = app.add_subcommand("fit-lb", "Fit the lambda lower bound for one image from study ratings");
  lb->add_option("ratings", lb_csv, "Ratings CSV")->required();
  lb->add_option("out", lb_out, "Output fit JSON ('-' for stdout)")->required();
  lb->add_option("--image", lb_image, "Image id")->required();
  lb->add_option("--metric", lb_metric, "l22 or l2")->required();
  lb->add_option("--space", lb_space, "srgb, lab or uvw")->required();
  lb->add_option("--raters", lb_raters, "Raters per item; sets the MOS levels")->capture_default_str()->check(CLI::PositiveNumber);
  lb->add_option("--identical-min", lb_policy.identical_min, "Lowest passing score for the identical control")->capture_default_str();
  lb->add_option("--black-max", lb_policy.black_max, "Highest passing score for the black control")->capture_default_str();
  lb->callback([&] {
    run = [&] {
      const auto metric = wc::parse_metric(lb_metric);
      const auto space = wc::parse_color_space(lb_space);
      const auto records = wc::read_ratings_csv(lb_csv);
      const auto out = wc::fit_lower_bound_from_ratings(records, lb_image, metric, space, lb_policy, lb_raters);
      emit(wc::to_json(out.fit), lb_out);
    };
  });

  // train
  std::string tn_csv, tn_out, tn_kind = "linear", tn_space, tn_metric;
  auto* tn = app.add_subcommand("train", "Train a k predictor from image features");
  tn->add_option("training", tn_csv, "Training CSV")->required();
  tn->add_option("out", tn_out, "Output predictor JSON")->required();
  tn->add_option("--model-kind", tn_kind, "linear, cubic or svr")->capture_default_str();
  tn->add_option("--space", tn_space, "Select rows for this space");
  tn->add_option("--metric", tn_metric, "Select rows for this metric");
  tn->callback([&] {
    run = [&] {
      const auto kind = wc::parse_regressor_kind(tn_kind);
      const auto data = select_group(wc::read_training_csv(tn_csv), tn_csv, tn_space, tn_metric);
      wc::save_json(tn_out, wc::to_json(wc::train(data, kind)));
    };
  });

  // evaluate
  std::string ev_csv, ev_kind = "linear", ev_space, ev_metric, ev_leave_out, ev_out;
  std::size_t ev_folds = 5;
  std::uint64_t ev_seed = 0;
  auto* ev = app.add_subcommand("evaluate", "Cross-validate a predictor kind or hold out one image");
  ev->add_option("training", ev_csv, "Training CSV")->required();
  ev->add_option("--model-kind", ev_kind, "linear, cubic or svr")->capture_default_str();
  ev->add_option("--space", ev_space, "Select rows for this space");
  ev->add_option("--metric", ev_metric, "Select rows for this metric");
  auto* folds_opt = ev->add_option("--folds", ev_folds, "Number of folds")->capture_default_str()->check(CLI::Range(2, 1000000));
  ev->add_option("--seed", ev_seed, "Fold shuffle seed")->capture_default_str();
  ev->add_option("--leave-out", ev_leave_out, "Image id to hold out")->excludes(folds_opt);
  ev->add_option("--out", ev_out, "Write JSON here instead of stdout");
  ev->callback([&] {
    run = [&] {
      const auto kind = wc::parse_regressor_kind(ev_kind);
      const auto data = select_group(wc::read_training_csv(ev_csv), ev_csv, ev_space, ev_metric);
      if (!ev_leave_out.empty()) emit(wc::to_json(wc::leave_one_image_out(data, ev_leave_out, kind)), ev_out);
      else emit(wc::to_json(wc::cross_validate(data, kind, ev_folds, ev_seed)), ev_out);
    };
  });

  // features
  std::string ft_in;
  bool ft_csv = false;
  auto* ft = app.add_subcommand("features", "Print the feature vector of a PNG");
  ft->add_option("input", ft_in, "Input PNG")->required();
  ft->add_flag("--csv", ft_csv, "Print a CSV header and record instead of JSON");
  ft->callback([&] {
    run = [&] {
      const auto f = wc::extract_features(wc::read_png(ft_in));
      if (ft_csv) std::cout << wc::feature_csv_header() << '\n' << wc::to_csv_record(f) << '\n';
      else std::cout << wc::dump(wc::to_json(f));
    };
  });

  // serve-study
  std::string sv_manifest, sv_host = "127.0.0.1", sv_static;
  int sv_port = 8080;
  wc::SessionOptions sv_opts;
  std::string sv_out = "ratings.csv";
  auto* sv = app.add_subcommand("serve-study", "Serve one rating session over local HTTP");
  sv->add_option("manifest", sv_manifest, "Study manifest JSON")->required();
  sv->add_option("--host", sv_host, "Bind address")->capture_default_str();
  sv->add_option("--port", sv_port, "Port")->capture_default_str()->check(CLI::Range(1, 65535));
  sv->add_option("--out", sv_out, "Ratings CSV to append to")->capture_default_str();
  sv->add_option("--batch", sv_opts.batch_index, "Batch index")->capture_default_str();
  sv->add_option("--participant", sv_opts.participant, "Participant id")->capture_default_str();
  sv->add_option("--seed", sv_opts.seed, "Batching and control placement seed")->capture_default_str();
  sv->add_option("--static", sv_static, "Directory with the harness assets");
  sv->callback([&] {
    run = [&] {
      sv_opts.ratings_csv = sv_out;
      if (!sv_static.empty()) sv_opts.static_dir = sv_static;
      wc::StudyServer server(wc::load_study_manifest(sv_manifest), sv_opts);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "serving batch " << server.batch_id() << " (" << server.pairs().size() << " pairs) on http://"
                << sv_host << ":" << sv_port << "/\n";
      const bool ok = server.listen(sv_host, sv_port);
      g_server = nullptr;
      if (!ok && server.scored_count() == 0) throw wc::InputError("could not listen on " + sv_host + ":" + std::to_string(sv_port));
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    run();
  } catch (const UsageError& e) {
    std::cerr << "wattcolor: " << e.what() << '\n';
    return 2;
  } catch (const wc::EmptyInputError& e) {
    std::cerr << "wattcolor: " << e.what() << '\n';
    return 2;
  } catch (const wc::ConfigError& e) {
    std::cerr << "wattcolor: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "wattcolor: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
