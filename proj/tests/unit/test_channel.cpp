#include <gtest/gtest.h>

#include <cmath>

#include "lorawban/channel.hpp"
#include "lorawban/error.hpp"
#include "lorawban/numerics.hpp"
#include "lorawban/rng.hpp"

using namespace lorawban;

TEST(PathLoss, ReferenceAndInverse) {
  const channel::PathLossModel pl;
  EXPECT_NEAR(channel::path_gain(pl, 1.0), std::pow(10.0, -4.96), 1e-18);
  EXPECT_NEAR(channel::path_gain(pl, 1000.0), std::pow(10.0, -4.96) * std::pow(1000.0, -2.8), 1e-25);
  for (double d : {1.0, 37.0, 1500.0, 8000.0}) {
    EXPECT_NEAR(channel::log_path_gain(pl, d), std::log(channel::path_gain(pl, d)), 1e-12);
    EXPECT_NEAR(channel::distance_for_gain(pl, channel::path_gain(pl, d)) / d, 1.0, 1e-12);
  }
  EXPECT_THROW(channel::path_gain(pl, 0.0), DomainError);
}

TEST(PathLoss, ValidationRejectsBadModels) {
  channel::PathLossModel pl;
  pl.exponent = 0.0;
  EXPECT_THROW(pl.validate(), DomainError);
}

struct FadingCase {
  double sigma_db, xi, delta;
};

class Fading : public ::testing::TestWithParam<FadingCase> {};

TEST_P(Fading, ParametersMatchHighPrecisionValues) {
  const auto c = GetParam();
  const auto f = channel::fading_params(c.sigma_db);
  EXPECT_NEAR(f.xi / c.xi, 1.0, 1e-13);
  EXPECT_NEAR(f.delta / c.delta, 1.0, 1e-13);
}

// The gamma approximation keeps the first moment of the composite gain.
TEST_P(Fading, MeanMatchesCompositeMean) {
  const auto f = channel::fading_params(GetParam().sigma_db);
  EXPECT_NEAR(f.xi * f.delta, std::exp(0.5 * f.sigma_h * f.sigma_h), 1e-9 * f.xi * f.delta);
}

TEST_P(Fading, CdfIsIntegralOfPdf) {
  const auto f = channel::fading_params(GetParam().sigma_db);
  // integrate in t = ln z so the z^(xi-1) singularity disappears
  auto dens = [&](double t) { return std::exp(f.xi * t - std::exp(t) / f.delta - f.log_norm()); };
  for (double z : {1e-3, 0.1, 1.0, 10.0}) {
    const double lo = std::log(z) - 60.0 / f.xi;
    const double v = numerics::integrate(dens, lo, std::log(z), 1e-11, 1e-16).value;
    EXPECT_NEAR(channel::beta_cdf(f, z), v, 1e-9) << z;
    EXPECT_NEAR(channel::beta_cdf_log(f, std::log(z)), v, 1e-9) << z;
  }
}

TEST_P(Fading, CdfMonotoneAndBounded) {
  const auto f = channel::fading_params(GetParam().sigma_db);
  double prev = 0.0;
  for (double t = -30.0; t <= 12.0; t += 0.5) {
    const double c = channel::beta_cdf_log(f, t);
    EXPECT_GE(c, prev);
    EXPECT_LE(c, 1.0);
    prev = c;
  }
}

INSTANTIATE_TEST_SUITE_P(Sigma, Fading,
                         ::testing::Values(FadingCase{0.0, 1.0, 1.0},
                                           FadingCase{4.0, 0.27237841030122196, 5.6109206456184087},
                                           FadingCase{8.0, 0.017087313282760834, 319.26657095976627},
                                           FadingCase{10.0, 0.002497285045465005, 5673.1521345412392}));

TEST(FadingParams, RejectsNegativeSigma) { EXPECT_THROW(channel::fading_params(-1.0), DomainError); }

TEST(SampleBeta, CompositeMoments) {
  for (double sigma : {0.0, 4.0}) {
    const auto f = channel::fading_params(sigma);
    rng::Stream rng(8, static_cast<std::uint64_t>(sigma));
    constexpr int n = 400000;
    double log_sum = 0.0;
    double log_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double l = std::log(channel::sample_beta(f, rng));
      log_sum += l;
      log_sq += l * l;
    }
    // ln|h|^2 has mean -gamma_E and variance pi^2/6; ln H adds N(0, sigma_h^2).
    const double mean = log_sum / n;
    const double var = log_sq / n - mean * mean;
    EXPECT_NEAR(mean, -0.5772156649015329, 0.01);
    EXPECT_NEAR(var, numerics::kPi * numerics::kPi / 6.0 + f.sigma_h * f.sigma_h, 0.03);
  }
}

TEST(SampleBeta, ExponentialWithoutShadowing) {
  const auto f = channel::fading_params(0.0);
  rng::Stream rng(3, 3);
  constexpr int n = 200000;
  int below = 0;
  for (int i = 0; i < n; ++i) below += channel::sample_beta(f, rng) < 1.0;
  EXPECT_NEAR(static_cast<double>(below) / n, channel::beta_cdf(f, 1.0), 0.005);
}

TEST(LinkBudget, NoiseAndSnr) {
  EXPECT_NEAR(channel::noise_power_dbm(125e3, 6.0), -174.0 + 6.0 + 10.0 * std::log10(125e3), 1e-12);
  const channel::LinkBudget link;
  const channel::PathLossModel pl;
  const double snr = channel::average_snr(link, pl, 1000.0);
  EXPECT_NEAR(10.0 * std::log10(snr), 14.0 - 49.6 - 28.0 * 3.0 - channel::noise_power_dbm(125e3, 6.0), 1e-9);
  EXPECT_NEAR(channel::received_snr(link, pl, 1000.0, 0.5), 0.5 * snr, 1e-12 * snr);
}
