#include <gtest/gtest.h>

#include <cmath>

#include "lorawban/error.hpp"
#include "lorawban/metrics.hpp"
#include "lorawban/montecarlo.hpp"

using namespace lorawban;

namespace {

metrics::NetworkModel model(mac::Protocol p, mac::Scheme s, double r, double n, double sigma,
                            const mac::MacConfig& cfg = {}) {
  return metrics::make_network(p, s, r, n, sigma, cfg);
}

}  // namespace

TEST(GainPdf, IntegratesToOne) {
  const auto m = model(mac::Protocol::kPureAloha, mac::Scheme::kEib, 6.0, 3000.0, 8.0);
  for (int j = 2; j <= 6; ++j) {
    const double g_lo = channel::path_gain(m.pathloss, units::km_to_m(m.alloc.outer_km(j)));
    const double g_hi = channel::path_gain(m.pathloss, units::km_to_m(m.alloc.inner_km(j)));
    // x = e^t
    auto f = [&](double t) { return metrics::interferer_gain_pdf(m, j, std::exp(t)) * std::exp(t); };
    EXPECT_NEAR(numerics::integrate(f, std::log(g_lo), std::log(g_hi), 1e-10).value, 1.0, 1e-8) << j;
  }
}

// F_X(z) = (1 / area) int_annulus P(beta <= z / g(r)) 2 pi r dr, evaluated directly.
TEST(XiCdf, MatchesDirectRadialIntegral) {
  for (double sigma : {0.0, 8.0}) {
    const auto m = model(mac::Protocol::kPureAloha, mac::Scheme::kEib, 6.0, 3000.0, sigma);
    for (int j : {1, 3, 6}) {
      const double lo = m.alloc.inner_km(j);
      const double hi = m.alloc.outer_km(j);
      for (double log_z : {-40.0, -33.0, -28.0, -20.0}) {
        auto f = [&](double r) {
          if (r <= 0.0) return 0.0;
          const double lg = channel::log_path_gain(m.pathloss, units::km_to_m(r));
          return channel::beta_cdf_log(m.fading, log_z - lg) * 2.0 * numerics::kPi * r;
        };
        const double direct = numerics::integrate(f, lo, hi, 1e-11, 1e-15).value / m.alloc.area_km2(j);
        EXPECT_NEAR(metrics::xi_cdf_log(m, j, log_z), direct, 1e-8) << sigma << " " << j << " " << log_z;
      }
    }
  }
}

TEST(ConnectionProbability, ExponentialClosedForm) {
  const auto m = model(mac::Protocol::kPureAloha, mac::Scheme::kEib, 6.0, 3000.0, 0.0);
  for (double d : {0.5, 2.5, 5.9}) {
    const auto a = mac::sf_for_distance(m.alloc, d);
    const double x = m.noise_mw() * units::db_to_linear(a.snr_threshold_db) /
                     (m.tx_mw() * channel::path_gain(m.pathloss, units::km_to_m(d)));
    EXPECT_NEAR(metrics::connection_probability(m, d), std::exp(-x), 1e-12);
  }
  EXPECT_THROW(metrics::connection_probability(m, 0.0), DomainError);
  EXPECT_THROW(metrics::connection_probability(m, 6.5), DomainError);
}

TEST(SirSuccess, NoInterferersMeansSuccess) {
  const auto m = model(mac::Protocol::kPureAloha, mac::Scheme::kEib, 1.0, 0.0, 8.0);
  EXPECT_DOUBLE_EQ(metrics::sir_success_probability(m, 0.4), 1.0);
}

// With exponential fading the SIR event has no approximation in it, so the
// analytic value must match a network simulation where the SNR never binds.
TEST(SirSuccess, MatchesSimulationWithoutShadowing) {
  mac::MacConfig loud;
  loud.tx_power_dbm = 80.0;
  for (auto p : {mac::Protocol::kPureAloha, mac::Protocol::kSlottedAloha}) {
    const auto m = model(p, mac::Scheme::kEib, 6.0, 3000.0, 0.0, loud);
    for (double d : {0.7, 3.3, 5.5}) {
      montecarlo::CoveragePlan plan;
      plan.seed = 21;
      plan.trials = 100000;
      plan.model = m;
      plan.fixed_distance_km = d;
      const auto rep = montecarlo::run_coverage_trials(plan);
      EXPECT_NEAR(metrics::joint_success(m, d), rep.estimate, 4.0 * rep.stderr_ + 2e-3) << d;
    }
  }
}

TEST(Coverage, MatchesSimulationWithoutShadowingSmallDisk) {
  for (auto p : mac::kAllProtocols) {
    const auto m = model(p, mac::Scheme::kEab, 1.0, 3000.0, 0.0);
    montecarlo::CoveragePlan plan;
    plan.seed = 22;
    plan.trials = 100000;
    plan.model = m;
    const auto rep = montecarlo::run_coverage_trials(plan);
    EXPECT_NEAR(metrics::coverage_probability(m), rep.estimate, 4.0 * rep.stderr_ + 2e-3) << mac::to_string(p);
  }
}

TEST(Coverage, BoundedAndNonincreasingInDeviceCount) {
  for (auto p : mac::kAllProtocols) {
    for (double sigma : {0.0, 8.0}) {
      double prev = 1.0;
      for (double n : {100.0, 1000.0, 3000.0, 8000.0}) {
        const double c = metrics::coverage_probability(model(p, mac::Scheme::kEib, 2.0, n, sigma));
        EXPECT_GE(c, 0.0);
        EXPECT_LE(c, prev + 1e-9);
        prev = c;
      }
    }
  }
}

TEST(Evaluator, DerivedQuantitiesAreConsistent) {
  const auto m = model(mac::Protocol::kSlottedAloha, mac::Scheme::kEab, 2.0, 3000.0, 8.0);
  const metrics::NetworkEvaluator ev(m, true);
  double cov = 0.0;
  double thr = 0.0;
  for (const auto& a : ev.annuli()) {
    cov += a.success_integral;
    thr += a.throughput;
    EXPECT_NEAR(a.throughput, m.mac.duty_cycle * m.n_bar * a.success_integral, 1e-12);
    EXPECT_NEAR(a.delay, 1.0 / a.success_integral, 1e-9 / a.success_integral);
    EXPECT_LE(a.p_joint_avg, std::min(a.p_snr_avg, a.p_sir_avg) + 1e-6);
  }
  EXPECT_NEAR(ev.coverage(), cov, 1e-12);
  EXPECT_NEAR(ev.average_throughput(), thr, 1e-12);
  EXPECT_NEAR(metrics::throughput(m).average, thr, 1e-12);
  EXPECT_NEAR(metrics::delay(m).average, ev.average_delay(), 1e-9);
  const auto ee = metrics::energy_efficiency(m);
  EXPECT_NEAR(ee.average, ev.average_energy_efficiency(), 1e-9);
  EXPECT_GT(ee.at_distance(0.3), 0.0);
}

TEST(Evaluator, UnreachableAnnulusHasInfiniteDelay) {
  mac::MacConfig quiet;
  quiet.tx_power_dbm = -200.0;
  const auto m = model(mac::Protocol::kPureAloha, mac::Scheme::kEib, 8.0, 3000.0, 0.0, quiet);
  const metrics::NetworkEvaluator ev(m);
  EXPECT_EQ(ev.annuli().back().delay, metrics::kInfiniteDelay);
  EXPECT_EQ(ev.average_delay(), metrics::kInfiniteDelay);
}

TEST(NetworkModel, ValidationNamesTheKey) {
  try {
    model(mac::Protocol::kPureAloha, mac::Scheme::kEib, 1.0, -5.0, 8.0);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "n_bar");
  }
}
