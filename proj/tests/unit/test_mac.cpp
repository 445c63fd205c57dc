#include <gtest/gtest.h>

#include <cmath>

#include "lorawban/error.hpp"
#include "lorawban/mac.hpp"
#include "lorawban/rng.hpp"
#include "lorawban/units.hpp"

using namespace lorawban;

TEST(TimeOnAir, DefaultFrameAllSf) {
  const mac::MacConfig cfg;
  const double expected[] = {0.061696, 0.107008, 0.214016, 0.362496, 0.724992, 1.18784};
  for (int sf = 7; sf <= 12; ++sf) EXPECT_NEAR(mac::time_on_air(sf, cfg), expected[sf - 7], 1e-9) << sf;
}

TEST(TimeOnAir, PayloadSymbolsNeverNegative) {
  mac::MacConfig cfg;
  cfg.payload_bytes = 0;
  cfg.crc_bits = 0;
  cfg.header_bits = 0;
  EXPECT_EQ(mac::payload_symbols(12, cfg), 0);
  EXPECT_NEAR(mac::time_on_air(12, cfg), (8 + 4.25 + 8) * 4096 / 125e3, 1e-12);
}

TEST(TimeOnAir, GrowsWithSfAndPayload) {
  mac::MacConfig small;
  mac::MacConfig big;
  big.payload_bytes = 50;
  for (int sf = 7; sf < 12; ++sf) {
    EXPECT_LT(mac::time_on_air(sf, small), mac::time_on_air(sf + 1, small));
    EXPECT_LT(mac::time_on_air(sf, small), mac::time_on_air(sf, big));
  }
}

TEST(Allocation, BoundariesAndAreas) {
  const double r = 6.0;
  const auto eib = mac::build_allocation(mac::Scheme::kEib, r);
  const auto eab = mac::build_allocation(mac::Scheme::kEab, r);
  double total = 0.0;
  for (int j = 1; j <= 6; ++j) {
    EXPECT_NEAR(eib.outer_km(j), r * j / 6.0, 1e-12);
    EXPECT_NEAR(eab.outer_km(j), r * std::sqrt(j / 6.0), 1e-12);
    EXPECT_NEAR(eab.area_km2(j), numerics::kPi * r * r / 6.0, 1e-9);
    EXPECT_EQ(eib.sf_of(j), 6 + j);
    total += eib.area_km2(j);
  }
  EXPECT_NEAR(total, numerics::kPi * r * r, 1e-9);
  EXPECT_DOUBLE_EQ(eib.threshold_db(1), mac::kSnrThresholdDb[0]);
  EXPECT_THROW(mac::build_allocation(mac::Scheme::kEib, 0.0), DomainError);
  EXPECT_THROW(mac::build_allocation(mac::Scheme::kEib, 1.0, 5), ConfigError);
}

TEST(Allocation, HalfOpenAnnuli) {
  const auto a = mac::build_allocation(mac::Scheme::kEib, 6.0);
  EXPECT_EQ(mac::sf_for_distance(a, 0.0).annulus, 1);
  EXPECT_EQ(mac::sf_for_distance(a, 0.999).annulus, 1);
  EXPECT_EQ(mac::sf_for_distance(a, 1.0).annulus, 2);
  EXPECT_EQ(mac::sf_for_distance(a, 6.0).annulus, 6);
  EXPECT_EQ(mac::sf_for_distance(a, 6.0).sf, 12);
  EXPECT_THROW(mac::sf_for_distance(a, 6.01), DomainError);
}

TEST(Names, RoundTrip) {
  for (auto p : mac::kAllProtocols) EXPECT_EQ(mac::parse_protocol(mac::to_string(p)), p);
  for (auto s : mac::kAllSchemes) EXPECT_EQ(mac::parse_scheme(mac::to_string(s)), s);
  EXPECT_THROW(mac::parse_protocol("TDMA"), DomainError);
}

TEST(MacConfig, ValidationNamesTheKey) {
  mac::MacConfig cfg;
  cfg.csma_p = cfg.duty_cycle;
  try {
    cfg.validate();
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "csma_p");
  }
  cfg = {};
  cfg.coding_rate = 5;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.duty_cycle = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Intensity, AlohaVariants) {
  const mac::MacConfig cfg;
  const auto a = mac::build_allocation(mac::Scheme::kEib, 1.0);
  const double lambda = 955.0;
  EXPECT_NEAR(mac::interferer_intensity(mac::Protocol::kPureAloha, lambda, 7, cfg, a, 1, 0.0).lambda_u,
              2.0 * cfg.duty_cycle * lambda, 1e-12);
  const double to = mac::time_on_air(9, cfg);
  const double ts = mac::symbol_time(9, cfg.bandwidth_hz);
  const double tp = (cfg.preamble_symbols + 4.25) * ts;
  const double s = std::sqrt(2.0) * 0.01 * to;
  const double ps = 1.0 + numerics::q_function((cfg.guard_s + tp - 5.0 * ts) / s) + numerics::q_function(cfg.guard_s / s);
  EXPECT_NEAR(mac::interferer_intensity(mac::Protocol::kSlottedAloha, lambda, 9, cfg, a, 3, 0.0).lambda_u,
              (1.0 + cfg.guard_s / to) * ps * cfg.duty_cycle * lambda, 1e-12);
}

TEST(Intensity, CsmaWithoutSensedNeighbours) {
  const mac::MacConfig cfg;
  const auto a = mac::build_allocation(mac::Scheme::kEab, 2.0);
  const double lambda = 300.0;
  const int sf = 10;
  const double to = mac::time_on_air(sf, cfg);
  const double ts = mac::symbol_time(sf, cfg.bandwidth_hz);
  const double tp = mac::preamble_time(sf, cfg);
  const double expect = 2.0 * (1.0 - (tp - 5.0 * ts) / (2.0 * to)) * cfg.csma_p * lambda;
  EXPECT_NEAR(mac::interferer_intensity(mac::Protocol::kNpCsma, lambda, sf, cfg, a, 4, 0.0).lambda_u, expect, 1e-12);
  EXPECT_NEAR(mac::interferer_intensity(mac::Protocol::kNpCsma, lambda, sf, cfg, a, 4, 1e-12).lambda_u, expect, 1e-9);
}

TEST(Intensity, CsmaDirectFormula) {
  const mac::MacConfig cfg;
  const auto a = mac::build_allocation(mac::Scheme::kEib, 3.0);
  const double lambda = 106.0;
  const double xi = 0.4;
  const int sf = 9;
  const double e = lambda * cfg.csma_p * a.area_km2(3) * xi;
  const double reduction = (mac::preamble_time(sf, cfg) - 5.0 * mac::symbol_time(sf, cfg.bandwidth_hz)) /
                           mac::time_on_air(sf, cfg);
  EXPECT_NEAR(mac::interferer_intensity(mac::Protocol::kNpCsma, lambda, sf, cfg, a, 3, xi).lambda_u,
              (2.0 - reduction) * (1.0 - xi) * (1.0 - std::exp(-e)) / e * cfg.csma_p * lambda, 1e-12);
}

TEST(Energy, PerProtocol) {
  const mac::MacConfig cfg;
  const auto a = mac::build_allocation(mac::Scheme::kEib, 1.0);
  const double ptx = units::dbm_to_watts(cfg.tx_power_dbm);
  const double prx = cfg.rx_power_mw * 1e-3;
  const double to = mac::time_on_air(8, cfg);
  EXPECT_NEAR(mac::energy_per_message(mac::Protocol::kPureAloha, 8, cfg, a, 2, 900.0, 0.0), ptx * to, 1e-15);
  EXPECT_NEAR(mac::energy_per_message(mac::Protocol::kSlottedAloha, 8, cfg, a, 2, 900.0, 0.0),
              ptx * to + prx * cfg.beacon_s * to / (cfg.duty_cycle * cfg.sync_interval_s), 1e-15);
  const double tcad = 2.0 * mac::symbol_time(8, cfg.bandwidth_hz);
  EXPECT_NEAR(mac::energy_per_message(mac::Protocol::kNpCsma, 8, cfg, a, 2, 900.0, 0.0), ptx * to + prx * tcad, 1e-15);
  const double e = 900.0 * cfg.csma_p * a.area_km2(2) * 0.7;
  EXPECT_NEAR(mac::energy_per_message(mac::Protocol::kNpCsma, 8, cfg, a, 2, 900.0, 0.7),
              ptx * to + prx * tcad * e / (1.0 - std::exp(-e)), 1e-15);
}

TEST(DiskDistance, DensityIntegratesToOne) {
  for (double r : {0.5, 1.0, 8000.0}) {
    const auto res = numerics::integrate([r](double x) { return mac::disk_distance_pdf(x, r); }, 0.0, 2.0 * r, 1e-10);
    EXPECT_NEAR(res.value, 1.0, 1e-8);
  }
}

TEST(HiddenFraction, MatchesPointPairSampling) {
  // Two uniform points in the disk of radius l_j, exponential fading.
  mac::MacConfig cfg;
  cfg.detection_threshold_dbm = -120.0;
  const auto a = mac::build_allocation(mac::Scheme::kEib, 6.0);
  const mac::ChannelContext ch{{}, channel::fading_params(0.0)};
  const int j = 4;
  const double xi = mac::csma_hidden_fraction(a, j, cfg, ch);
  rng::Stream rng(12, 0);
  const double rad = units::km_to_m(a.outer_km(j));
  constexpr int n = 200000;
  int detected = 0;
  for (int i = 0; i < n; ++i) {
    const double r1 = rad * std::sqrt(rng.uniform()), t1 = 2.0 * numerics::kPi * rng.uniform();
    const double r2 = rad * std::sqrt(rng.uniform()), t2 = 2.0 * numerics::kPi * rng.uniform();
    const double d = std::hypot(r1 * std::cos(t1) - r2 * std::cos(t2), r1 * std::sin(t1) - r2 * std::sin(t2));
    const double rx_dbm = cfg.tx_power_dbm + units::linear_to_db(rng.exponential() * channel::path_gain(ch.pathloss, d));
    detected += rx_dbm >= cfg.detection_threshold_dbm;
  }
  const double p = static_cast<double>(detected) / n;
  EXPECT_NEAR(xi, p, 4.0 * std::sqrt(p * (1.0 - p) / n) + 1e-4);
  EXPECT_GT(xi, 0.05);
  EXPECT_LT(xi, 0.95);
}

TEST(HiddenFraction, NonincreasingInThreshold) {
  const auto a = mac::build_allocation(mac::Scheme::kEab, 4.0);
  const mac::ChannelContext ch{{}, channel::fading_params(8.0)};
  mac::MacConfig cfg;
  double prev = 1.0;
  for (int i = 0; i < 10; ++i) {
    cfg.detection_threshold_dbm = -160.0 + 6.0 * i;
    const double xi = mac::csma_hidden_fraction(a, 5, cfg, ch);
    EXPECT_LE(xi, prev + 1e-12);
    EXPECT_GE(xi, 0.0);
    prev = xi;
  }
}
