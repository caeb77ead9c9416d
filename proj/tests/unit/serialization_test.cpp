#include <gtest/gtest.h>

#include <cmath>

#include "datasets.hpp"
#include "wattcolor/errors.hpp"
#include "wattcolor/serialization.hpp"

namespace wattcolor {
namespace {

// Every document must survive text serialization too, not just the Json tree.
Json through_text(const Json& j) { return parse_json(dump(j), "roundtrip"); }

TEST(Serialization, PowerModel) {
  const PowerModel m({ChannelPowerParams{1.25e-7, 3e-9, 1e-10}, {0.7, 0.1, 0}, {2, 0, 0.3}}, ColorSpace::SRGB, {},
                     "unit test");
  EXPECT_EQ(power_model_from_json(through_text(to_json(m))), m);
  const auto refit = refit_in_space(m, ColorSpace::LAB, 6);
  EXPECT_EQ(power_model_from_json(through_text(to_json(refit))), refit);
}

TEST(Serialization, PowerModelRejectsWrongFormat) {
  auto j = to_json(PowerModel({ChannelPowerParams{1, 0, 0}, {1, 0, 0}, {1, 0, 0}}));
  j["format"] = "something.else";
  EXPECT_THROW(power_model_from_json(j), MalformedDataError);
  j = to_json(PowerModel({ChannelPowerParams{1, 0, 0}, {1, 0, 0}, {1, 0, 0}}));
  j["channels"].erase("c1");
  EXPECT_THROW(power_model_from_json(j), MalformedDataError);
}

TEST(Serialization, InvalidModelValues) {
  auto j = to_json(PowerModel({ChannelPowerParams{1, 0, 0}, {1, 0, 0}, {1, 0, 0}}));
  j["channels"]["c0"]["alpha"] = -1.0;
  EXPECT_THROW(power_model_from_json(j), Error);
}

TEST(Serialization, SmallRecords) {
  const LambdaRange r{3.44, 76.97, LambdaScale::Linear};
  EXPECT_EQ(lambda_range_from_json(through_text(to_json(r))), r);
  const TransformConfig c{DistanceMetric::L2, ColorSpace::UVW, 0.35, LambdaScale::Geometric, 10};
  EXPECT_EQ(transform_config_from_json(through_text(to_json(c))), c);
  const FitReport f{{0.1, 0.2, 0.3}, 0.95, 0.2, 4096};
  EXPECT_EQ(fit_report_from_json(through_text(to_json(f))), f);
  const FeatureVector fv{0.1, 0.2, 0.3, 0.4};
  EXPECT_EQ(feature_vector_from_json(through_text(to_json(fv))), fv);
}

TEST(Serialization, TransformResult) {
  TransformConfig cfg;
  cfg.space = ColorSpace::LAB;
  cfg.lambda_norm = 0.5;
  const auto in = ImageBuffer::filled(5, 3, ColorSpace::SRGB, {0.8, 0.4, 0.2});
  const auto r = apply(cfg, PowerModel({ChannelPowerParams{2, 0, 0}, {2, 0, 0}, {2, 0, 0}}), in);
  const auto back = transform_result_from_json(through_text(to_json(r)));
  EXPECT_EQ(back.config, r.config);
  EXPECT_EQ(back.range, r.range);
  EXPECT_EQ(back.power_in, r.power_in);
  EXPECT_EQ(back.power_out, r.power_out);
  EXPECT_EQ(back.saving_pct, r.saving_pct);
  EXPECT_EQ(back.clamped_pixels, r.clamped_pixels);
  EXPECT_EQ(back.lambda_raw, r.lambda_raw);
  EXPECT_EQ(back.refit, r.refit);
  EXPECT_EQ(back.output.width(), 5u);
  EXPECT_EQ(back.output.height(), 3u);
}

TEST(Serialization, LowerBoundFit) {
  LowerBoundFit f;
  f.k = 6.089044875446846;
  f.rmse = 0.001;
  f.n_boundary = 2;
  f.image = "imgA";
  f.metric = DistanceMetric::L2;
  f.space = ColorSpace::UVW;
  const auto back = lower_bound_fit_from_json(through_text(to_json(f)));
  EXPECT_EQ(back.k, f.k);
  EXPECT_EQ(back.rmse, f.rmse);
  EXPECT_EQ(back.n_boundary, f.n_boundary);
  EXPECT_EQ(back.image, f.image);
  EXPECT_EQ(back.metric, f.metric);
  EXPECT_EQ(back.space, f.space);
}

TEST(Serialization, PredictorsPredictIdentically) {
  const auto data = datasets::nonlinear(14, 3);
  std::mt19937_64 rng(4);
  for (const auto kind : {RegressorKind::Linear, RegressorKind::Cubic, RegressorKind::SVR}) {
    const auto p = train(data, kind);
    const auto q = predictor_from_json(through_text(to_json(p)));
    EXPECT_EQ(q.kind, kind);
    for (int i = 0; i < 20; ++i) {
      const auto f = datasets::random_features(rng);
      EXPECT_EQ(q.raw_prediction(f), p.raw_prediction(f));
    }
  }
}

TEST(Serialization, PredictorCoefficientCountChecked) {
  auto j = to_json(train(datasets::linear(6, 1), RegressorKind::Linear));
  j["coefficients"].push_back(1.0);
  EXPECT_THROW(predictor_from_json(j), Error);
}

TEST(Serialization, CvReportWithNaN) {
  CVReport r;
  r.kind = RegressorKind::SVR;
  r.seed = 7;
  r.fold_mse = {0.1, 0.2};
  r.mse_mean = 0.15;
  r.mse_variance = 0.0025;
  r.k_range = 0.0;
  r.pct_error = std::nan("");
  const auto j = through_text(to_json(r));
  EXPECT_TRUE(j["pct_error"].is_null());
  const auto back = cv_report_from_json(j);
  EXPECT_TRUE(std::isnan(back.pct_error));
  EXPECT_EQ(back.fold_mse, r.fold_mse);
  EXPECT_EQ(back.seed, 7u);
  EXPECT_EQ(back.kind, RegressorKind::SVR);
}

TEST(Serialization, LeaveOneOut) {
  const LeaveOneOutResult r{"img3", 2.5, 2.0, 0.25};
  const auto back = leave_one_out_from_json(through_text(to_json(r)));
  EXPECT_EQ(back.image, r.image);
  EXPECT_EQ(back.predicted, r.predicted);
  EXPECT_EQ(back.squared_error, r.squared_error);
}

TEST(Serialization, ParseErrorNamesSource) {
  try {
    parse_json("{not json", "broken.json");
    FAIL() << "expected MalformedDataError";
  } catch (const MalformedDataError& e) {
    EXPECT_NE(std::string(e.what()).find("broken.json"), std::string::npos);
  }
}

TEST(MeasurementsCsv, Parses) {
  const auto s = parse_measurements_csv("channel,code,power_w\nr,0,0.5\ng,255,1.25\nb,51,0.75\n", "m.csv");
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[1].channel, 1u);
  EXPECT_EQ(s[1].intensity, 1.0);
  EXPECT_NEAR(s[2].intensity, 0.2, 1e-15);
  EXPECT_EQ(s[2].power, 0.75);
}

TEST(MeasurementsCsv, Errors) {
  EXPECT_THROW(parse_measurements_csv("channel,code,power_w\nx,0,0.5\n", "m.csv"), MalformedDataError);
  EXPECT_THROW(parse_measurements_csv("channel,code,power_w\nr,256,0.5\n", "m.csv"), MalformedDataError);
  EXPECT_THROW(parse_measurements_csv("channel,code,power_w\nr,1.5,0.5\n", "m.csv"), MalformedDataError);
  EXPECT_THROW(parse_measurements_csv("channel,code\nr,1\n", "m.csv"), MalformedDataError);
  EXPECT_THROW(parse_measurements_csv("", "m.csv"), EmptyInputError);
  EXPECT_THROW(parse_measurements_csv("channel,code,power_w\n", "m.csv"), EmptyInputError);
}

}  // namespace
}  // namespace wattcolor
