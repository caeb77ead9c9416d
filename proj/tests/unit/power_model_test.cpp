#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "wattcolor/errors.hpp"
#include "wattcolor/power_model.hpp"

namespace wattcolor {
namespace {

PowerModel uniform(double a, double b, double g) {
  return PowerModel({ChannelPowerParams{a, b, g}, {a, b, g}, {a, b, g}});
}

std::vector<MeasurementSample> sample_model(const std::array<ChannelPowerParams, 3>& p, int codes) {
  std::vector<MeasurementSample> out;
  for (std::size_t c = 0; c < 3; ++c) {
    for (int i = 0; i < codes; ++i) {
      const double v = i / static_cast<double>(codes - 1);
      out.push_back({c, v, p[c](v)});
    }
  }
  return out;
}

TEST(ImagePower, WhitePixel) {
  EXPECT_DOUBLE_EQ(image_power(uniform(2, 0, 0), ImageBuffer::filled(1, 1, ColorSpace::SRGB, {1, 1, 1})), 3.0);
}

TEST(ImagePower, BlackIsThreeGamma) {
  EXPECT_DOUBLE_EQ(image_power(uniform(1.3, 0.2, 0.7), ImageBuffer::filled(1, 1, ColorSpace::SRGB, {0, 0, 0})), 2.1);
}

TEST(ImagePower, HandEvaluated) {
  const PowerModel m({ChannelPowerParams{1, 0.1, 0}, {2, 0.1, 0}, {3, 0.1, 0}});
  EXPECT_NEAR(image_power(m, ImageBuffer::filled(1, 1, ColorSpace::SRGB, {0.5, 0.5, 0.5})), 0.9, 1e-15);
}

TEST(ImagePower, SpaceMismatch) {
  EXPECT_THROW(image_power(uniform(2, 0, 0), ImageBuffer::filled(1, 1, ColorSpace::LAB, {50, 0, 0})), ConfigError);
}

TEST(ImagePower, AdditiveOverDisjointPixels) {
  const PowerModel m({ChannelPowerParams{1.2, 0.3, 0.01}, {0.7, 0.2, 0.02}, {2.1, 0.05, 0.0}});
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  ImageBuffer all(6, 1, ColorSpace::SRGB), left(3, 1, ColorSpace::SRGB), right(3, 1, ColorSpace::SRGB);
  for (std::size_t i = 0; i < 6; ++i) {
    const ColorTriple c{u(rng), u(rng), u(rng)};
    all.set_pixel(i, c);
    (i < 3 ? left : right).set_pixel(i % 3, c);
  }
  EXPECT_NEAR(image_power(m, all), image_power(m, left) + image_power(m, right), 1e-14);
}

TEST(ImagePower, WhiteAboveBlack) {
  for (const auto& m : {uniform(1, 0, 0), uniform(0.5, 0.5, 1), uniform(1e-3, 0, 5)}) {
    EXPECT_GT(image_power(m, ImageBuffer::filled(1, 1, ColorSpace::SRGB, {1, 1, 1})),
              image_power(m, ImageBuffer::filled(1, 1, ColorSpace::SRGB, {0, 0, 0})));
  }
}

TEST(PowerModelInvariants, RejectsNonConvexOrNegativeOffset) {
  EXPECT_THROW(uniform(0, 1, 0), ConfigError);
  EXPECT_THROW(uniform(-1, 1, 0), ConfigError);
  EXPECT_THROW(uniform(1, 0, -0.1), ConfigError);
  EXPECT_THROW(PowerModel({ChannelPowerParams{1, 0, 0}, {1, 0, 0}, {1, 0, 0}}, ColorSpace::XYZ), ConfigError);
}

TEST(FitFromMeasurements, ExactRecovery) {
  const std::array<ChannelPowerParams, 3> truth{ChannelPowerParams{2, 1, 0.5}, {2, 1, 0.5}, {2, 1, 0.5}};
  const auto m = fit_from_measurements(sample_model(truth, 18));
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_NEAR(m.channel(c).alpha, 2.0, 1e-9);
    EXPECT_NEAR(m.channel(c).beta, 1.0, 1e-9);
    EXPECT_NEAR(m.channel(c).gamma, 0.5, 1e-9);
  }
  ASSERT_TRUE(m.fit_report().has_value());
  EXPECT_LT(m.fit_report()->rmse, 1e-12);
}

TEST(FitFromMeasurements, ReproducesTrainingSamples) {
  const std::array<ChannelPowerParams, 3> truth{ChannelPowerParams{1.7, 0.2, 0.01}, {0.9, 0.4, 0.0}, {3.1, 0.0, 0.2}};
  const auto samples = sample_model(truth, 12);
  const auto m = fit_from_measurements(samples);
  for (const auto& s : samples) EXPECT_NEAR(m.channel(s.channel)(s.intensity), s.power, 1e-9);
}

TEST(FitFromMeasurements, SingleIntensityIsFitError) {
  std::vector<MeasurementSample> s;
  for (std::size_t c = 0; c < 3; ++c) {
    for (int i = 0; i < 5; ++i) s.push_back({c, 0.5, 1.0});
  }
  EXPECT_THROW(fit_from_measurements(s), FitError);
}

TEST(FitFromMeasurements, MissingChannelNamed) {
  auto s = sample_model({ChannelPowerParams{2, 1, 0.5}, {2, 1, 0.5}, {2, 1, 0.5}}, 8);
  std::erase_if(s, [](const MeasurementSample& m) { return m.channel == 1; });
  try {
    fit_from_measurements(s);
    FAIL() << "expected FitError";
  } catch (const FitError& e) {
    EXPECT_NE(std::string(e.what()).find("'g'"), std::string::npos) << e.what();
  }
}

TEST(FitFromMeasurements, NoisyMonteCarlo) {
  // A full 256-code sweep per channel at sigma = 1e-3, repeated 100 times;
  // every coefficient must land within 1e-2 of the truth.
  const std::array<ChannelPowerParams, 3> truth{ChannelPowerParams{2, 1, 0.5}, {1.5, 0.3, 0.2}, {2.5, 0.1, 0.1}};
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> noise(0.0, 1e-3);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    auto s = sample_model(truth, 256);
    for (auto& m : s) m.power += noise(rng);
    const auto fit = fit_from_measurements(s);
    for (std::size_t c = 0; c < 3; ++c) {
      worst = std::max({worst, std::abs(fit.channel(c).alpha - truth[c].alpha),
                        std::abs(fit.channel(c).beta - truth[c].beta),
                        std::abs(fit.channel(c).gamma - truth[c].gamma)});
    }
  }
  EXPECT_LT(worst, 1e-2);
}

TEST(FitFromMeasurements, ConcaveChannelRejected) {
  std::vector<MeasurementSample> s = sample_model({ChannelPowerParams{2, 1, 0.5}, {2, 1, 0.5}, {2, 1, 0.5}}, 8);
  for (auto& m : s) {
    if (m.channel == 2) m.power = 1.0 + m.intensity - 0.8 * m.intensity * m.intensity;
  }
  EXPECT_THROW(fit_from_measurements(s), FitError);
}

TEST(Refit, SrgbIsIdentity) {
  const auto m = uniform(2, 0.1, 0.01);
  EXPECT_EQ(refit_in_space(m, ColorSpace::SRGB), m);
}

TEST(Refit, GridTooSmall) { EXPECT_THROW(refit_in_space(uniform(2, 0, 0), ColorSpace::LAB, 3), ConfigError); }

TEST(Refit, RejectsOtherSpaces) {
  EXPECT_THROW(refit_in_space(uniform(2, 0, 0), ColorSpace::XYZ), ConfigError);
}

// R^2 frozen from an independent bounded least-squares solve of the same
// lattice regression (box-constrained alpha >= 2e-6, total offset >= 0).
TEST(Refit, LabRSquaredFrozen) {
  const auto lab = refit_in_space(uniform(2, 0, 0), ColorSpace::LAB, 16);
  ASSERT_TRUE(lab.fit_report());
  EXPECT_NEAR(lab.fit_report()->r_squared, 0.9605509739286362, 1e-9);
  EXPECT_EQ(lab.fit_report()->samples, 16u * 16u * 16u);
  EXPECT_EQ(lab.space(), ColorSpace::LAB);
}

TEST(Refit, UvwRSquaredFrozen) {
  const auto uvw = refit_in_space(uniform(2, 0, 0), ColorSpace::UVW, 16);
  EXPECT_NEAR(uvw.fit_report()->r_squared, 0.9796024189640518, 1e-9);
}

TEST(Refit, WhitePowerWithinTenPercent) {
  const auto m = uniform(2, 0, 0);
  for (const auto space : {ColorSpace::LAB, ColorSpace::UVW}) {
    const auto local = refit_in_space(m, space, 16);
    const double truth = m.pixel_power({1, 1, 1});
    const double approx = local.pixel_power(convert_triple({1, 1, 1}, ColorSpace::SRGB, space));
    EXPECT_LT(std::abs(approx - truth) / truth, 0.10) << to_string(space);
  }
}

TEST(Refit, RescaleCoversLattice) {
  const auto lab = refit_in_space(uniform(2, 0, 0), ColorSpace::LAB, 8);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      for (int k = 0; k < 8; ++k) {
        const auto u = lab.rescale().to_unit(convert_triple({i / 7.0, j / 7.0, k / 7.0}, ColorSpace::SRGB, ColorSpace::LAB));
        for (std::size_t c = 0; c < 3; ++c) {
          EXPECT_GE(u[c], -1e-12);
          EXPECT_LE(u[c], 1 + 1e-12);
        }
      }
    }
  }
}

TEST(Refit, AlphaStaysPositiveAtAnyScale) {
  for (double scale : {1e-9, 1.0, 1e6}) {
    const auto local = refit_in_space(uniform(2 * scale, 0.1 * scale, 0), ColorSpace::UVW, 8);
    for (std::size_t c = 0; c < 3; ++c) EXPECT_GT(local.channel(c).alpha, 0.0);
    EXPECT_GT(local.fit_report()->r_squared, 0.9) << scale;
  }
}

}  // namespace
}  // namespace wattcolor
