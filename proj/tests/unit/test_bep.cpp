#include <gtest/gtest.h>

#include <cmath>

#include "lorawban/bep.hpp"
#include "lorawban/error.hpp"
#include "lorawban/units.hpp"

using namespace lorawban;

namespace {

bep::BepInputs inputs(int sf, double snr_db, double sigma_db, double sir_db = 6.0, int order = 20) {
  return {sf, units::db_to_linear(snr_db), units::db_to_linear(sir_db), channel::fading_params(sigma_db), order};
}

}  // namespace

TEST(HConstant, HarmonicApproximation) {
  EXPECT_NEAR(bep::h_constant(127.0), std::log(127.0) + 1.0 / 254.0 + 0.57722, 1e-15);
  double harmonic = 0.0;
  for (int i = 1; i <= 4095; ++i) harmonic += 1.0 / i;
  EXPECT_NEAR(bep::h_constant(4095.0), harmonic, 1e-4);
  EXPECT_THROW(bep::h_constant(0.5), DomainError);
}

TEST(LinearQ, EndpointsAndSlope) {
  const auto lq = bep::linear_q_params(7, units::db_to_linear(0.0));
  EXPECT_DOUBLE_EQ(lq.eval(lq.lower()), 1.0);
  EXPECT_DOUBLE_EQ(lq.eval(lq.upper()), 0.0);
  EXPECT_NEAR(lq.eval(lq.a), 0.5, 1e-15);
  EXPECT_LT(lq.b, 0.0);
}

struct SepCase {
  int sf;
  double snr_db, sigma_db, expected;
};

class SepNoInterference : public ::testing::TestWithParam<SepCase> {};

// Reference values integrate the linearised Q against the gamma density at high precision.
TEST_P(SepNoInterference, MatchesDirectIntegral) {
  const auto c = GetParam();
  EXPECT_NEAR(bep::sep_no_interference(inputs(c.sf, c.snr_db, c.sigma_db)), c.expected, 1e-10);
}

INSTANTIATE_TEST_SUITE_P(Grid, SepNoInterference,
                         ::testing::Values(SepCase{7, 10.0, 0.0, 0.0042278536026697296},
                                           SepCase{9, 0.0, 4.0, 0.20988825066027517},
                                           SepCase{12, -10.0, 8.0, 0.85602477844650918},
                                           SepCase{7, -5.0, 8.0, 0.88226186714662068},
                                           SepCase{11, 5.0, 10.0, 0.96368443727839971}));

TEST(SepNoInterference, DecreasesWithSnrAndSf) {
  for (double sigma : {0.0, 4.0, 8.0}) {
    double prev = 1.0;
    for (double snr = -20.0; snr <= 15.0; snr += 2.5) {
      const double p = bep::sep_no_interference(inputs(7, snr, sigma));
      EXPECT_LE(p, prev + 1e-15);
      EXPECT_GE(p, 0.0);
      prev = p;
    }
    for (int sf = 7; sf < 12; ++sf)
      EXPECT_GE(bep::sep_no_interference(inputs(sf, -5.0, sigma)),
                bep::sep_no_interference(inputs(sf + 1, -5.0, sigma)));
  }
}

struct ConditionalCase {
  int sf;
  double snr_db, sigma_db, u0, expected;
};

// Reference values come from adaptive 2-D quadrature of
// E[Q(sqrt(c b1) - sqrt(c bk) u0)] over two independent gamma gains.
class ConditionalSep : public ::testing::TestWithParam<ConditionalCase> {};

TEST_P(ConditionalSep, ConvergesToDirectIntegral) {
  const auto c = GetParam();
  double prev_err = 1.0;
  for (int order : {20, 40, 80}) {
    const auto in = inputs(c.sf, c.snr_db, c.sigma_db, 0.0, order);
    const double err = std::abs(bep::sep_interference_conditional(in, c.u0) - c.expected);
    EXPECT_LT(err, prev_err) << "order " << order;
    prev_err = err;
  }
  if (c.sigma_db == 0.0) {
    EXPECT_LT(prev_err, 1e-4);
  }
}

INSTANTIATE_TEST_SUITE_P(Grid, ConditionalSep,
                         ::testing::Values(ConditionalCase{7, 0.0, 0.0, 0.5, 0.20366889207171723},
                                           ConditionalCase{7, -10.0, 0.0, 0.8, 0.39939375741759103},
                                           ConditionalCase{9, -5.0, 4.0, 0.6, 0.39839918081231096},
                                           ConditionalCase{7, 0.0, 4.0, 1.0, 0.4999999090674256}));

TEST(ConditionalSep, IncreasesWithPeakBound) {
  const auto in = inputs(8, 0.0, 4.0);
  double prev = 0.0;
  for (double u0 = 0.0; u0 <= 1.2; u0 += 0.1) {
    const double p = bep::sep_interference_conditional(in, u0);
    EXPECT_GE(p, prev - 1e-15);
    prev = p;
  }
  EXPECT_THROW(bep::sep_interference_conditional(in, -0.1), DomainError);
}

// The binned average over every offset agrees with the exhaustive average.
TEST(SepInterference, MatchesExhaustiveOffsetAverage) {
  for (double sigma : {0.0, 8.0}) {
    for (double sir_db : {0.0, 6.0}) {
      const auto in = inputs(7, 0.0, sigma, sir_db);
      const bep::ConditionalSep cond(in);
      const int n = 128;
      double sum = 0.0;
      for (int tau = 0; tau <= n / 2; ++tau)
        for (int i1 = 0; i1 < n; ++i1) sum += cond(phy::peak_bin_bound({tau, i1, in.sir}, 7));
      const double exhaustive = sum / ((n / 2 + 1) * n);
      EXPECT_NEAR(bep::sep_interference(in), exhaustive, 1e-9) << sigma << " " << sir_db;
    }
  }
}

TEST(PeakBoundTable, CountsEveryOffset) {
  for (int sf : {7, 10}) {
    const auto& t = bep::PeakBoundTable::for_sf(sf);
    const auto n = static_cast<std::uint64_t>(phy::chips_per_symbol(sf));
    EXPECT_EQ(t.total(), (n / 2 + 1) * n);
    EXPECT_EQ(t.range_count(0, bep::PeakBoundTable::kBins), t.total());
  }
}

TEST(Bep, RangeAndInterferenceOrdering) {
  for (int sf : {7, 9, 12}) {
    for (double sigma : {0.0, 8.0}) {
      for (double snr : {-15.0, 0.0, 10.0}) {
        const auto b = bep::bep_breakdown(inputs(sf, snr, sigma), true);
        EXPECT_GE(b.bep, 0.0);
        EXPECT_LE(b.bep, 0.5);
        EXPECT_NEAR(b.bep, bep::combine(b.sep_no_interference, b.sep_interference), 1e-15);
        EXPECT_GE(b.bep + 1e-15, bep::bep(inputs(sf, snr, sigma), false));
      }
    }
  }
}

TEST(Bep, StrongerInterfererHurts) {
  double prev = 0.0;
  for (double sir : {12.0, 6.0, 3.0, 0.0}) {
    const double b = bep::bep(inputs(7, 0.0, 0.0, sir), true);
    EXPECT_GE(b, prev);
    prev = b;
  }
}

TEST(Bep, InputValidation) {
  EXPECT_THROW(bep::bep(inputs(6, 0.0, 0.0), true), DomainError);
  auto in = inputs(7, 0.0, 0.0);
  in.avg_snr = 0.0;
  EXPECT_THROW(bep::bep(in, true), DomainError);
  in = inputs(7, 0.0, 0.0);
  in.quad_order = 0;
  EXPECT_THROW(bep::bep(in, true), DomainError);
}

TEST(ClampProbability, CountsClamps) {
  bep::ClampStats s;
  EXPECT_EQ(bep::detail::clamp_probability(1.2, &s), 1.0);
  EXPECT_EQ(bep::detail::clamp_probability(-1e-3, &s), 0.0);
  EXPECT_EQ(bep::detail::clamp_probability(0.3, &s), 0.3);
  EXPECT_EQ(s.clamped, 2u);
}
