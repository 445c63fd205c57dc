#pragma once

// Acceptance criteria C1..C11, shared by the `validate` command and the
// acceptance test binary. Each check returns its measurement, the bound it
// was held to and a verdict; nothing here throws on a failed criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lorawban/bep.hpp"
#include "lorawban/channel.hpp"
#include "lorawban/config.hpp"
#include "lorawban/experiment.hpp"
#include "lorawban/mac.hpp"
#include "lorawban/metrics.hpp"
#include "lorawban/montecarlo.hpp"
#include "lorawban/phy.hpp"
#include "lorawban/rng.hpp"
#include "lorawban/units.hpp"

namespace lorawban::acceptance {

// Pinned tolerances.
namespace tol {
inline constexpr double kOrthogonality = 1e-9;
inline constexpr double kPhyRuntimeS = 10.0;
inline constexpr double kSfGapDb = 5.0;
inline constexpr double kSfGapTolDb = 1.5;
inline constexpr double kSfGapBep = 0.1;
inline constexpr double kFloorGap = 0.12;
inline constexpr double kFloorGapTol = 0.04;
inline constexpr double kSfGainDb = 12.5;
inline constexpr double kSfGainTolDb = 2.0;
inline constexpr double kSirGapLow = 0.04;
inline constexpr double kSirGapLowTol = 0.02;
inline constexpr double kSirGapHigh = 0.15;
inline constexpr double kSirGapHighTol = 0.05;
inline constexpr double kBepSimAbs = 0.04;
inline constexpr double kKsBeta = 0.02;
inline constexpr double kKsXi = 0.03;
inline constexpr double kCoverageAbs = 0.05;
inline constexpr double kToaS = 61.696e-3;
inline constexpr double kToaTolS = 1e-6;
}  // namespace tol

struct CriterionResult {
  int id = 0;
  std::string name;
  std::string measured;
  std::string bound;
  bool pass = false;
  std::string detail;
  double runtime_s = 0.0;
};

struct Options {
  std::uint64_t seed = 1;
  std::uint64_t bep_trials = 100000;
  std::uint64_t coverage_trials = 100000;
  std::uint64_t ks_samples = 1000000;
  // Negative keeps the pinned simulation tolerances.
  double sim_abs_tol = -1.0;
  double z_mult = 4.0;

  static Options from_config(const config::ExperimentConfig& c) {
    return {c.seed, c.bep_trials, c.coverage_trials, c.ks_samples, c.sim_abs_tol, c.z_mult};
  }
};

namespace detail {

inline std::string fmt(double x) { return experiment::format_number(x); }

inline bep::BepInputs inputs(int sf, double snr_db, double sigma_db, double sir_db) {
  return {sf, units::db_to_linear(snr_db), units::db_to_linear(sir_db), channel::fading_params(sigma_db), 20};
}

inline double analytic_bep(int sf, double snr_db, double sigma_db, double sir_db) {
  return bep::bep(inputs(sf, snr_db, sigma_db, sir_db), true);
}

// SNR (dB) at which the analytic BEP with interference falls to `target`.
inline std::optional<double> snr_at_bep(int sf, double target, double sigma_db, double sir_db, double lo_db = -40.0,
                                        double hi_db = 40.0) {
  auto f = [&](double db) { return analytic_bep(sf, db, sigma_db, sir_db) - target; };
  return numerics::bisect(f, lo_db, hi_db, 1e-4);
}

// Kolmogorov-Smirnov distance between sorted samples and a CDF.
inline double ks_distance(const std::vector<double>& sorted, const std::function<double(double)>& cdf) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - f)});
  }
  return d;
}

class Timer {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

// Sets LORA_WBAN_WORKERS for the lifetime of the object.
class ScopedWorkers {
 public:
  explicit ScopedWorkers(unsigned n) {
    if (const char* old = std::getenv(montecarlo::kWorkersEnv)) previous_ = old;
    ::setenv(montecarlo::kWorkersEnv, std::to_string(n).c_str(), 1);
  }
  ~ScopedWorkers() {
    if (previous_)
      ::setenv(montecarlo::kWorkersEnv, previous_->c_str(), 1);
    else
      ::unsetenv(montecarlo::kWorkersEnv);
  }
  ScopedWorkers(const ScopedWorkers&) = delete;
  ScopedWorkers& operator=(const ScopedWorkers&) = delete;

 private:
  std::optional<std::string> previous_;
};

inline double sim_tol(const Options& o, double pinned) { return o.sim_abs_tol >= 0.0 ? o.sim_abs_tol : pinned; }

}  // namespace detail

// C1: exhaustive SF7 orthogonality and noiseless loopback for every SF.
inline CriterionResult phy_exactness(const Options& o) {
  detail::Timer timer;
  CriterionResult r{1, "phy_exactness", {}, {}, false, {}, 0.0};
  double max_err = 0.0;
  const int n7 = phy::chips_per_symbol(7);
  for (int q = 0; q < n7; ++q) {
    const auto w = phy::unit_chirp(q, 7);
    for (int probe = 0; probe < n7; ++probe) {
      const double expect = probe == q ? 1.0 : 0.0;
      max_err = std::max(max_err, std::abs(std::abs(phy::dechirp(w, probe, 7)) - expect));
    }
  }
  int ok = 0;
  int total = 0;
  rng::Stream rng(o.seed, 0xC1);
  for (int sf = phy::kMinSf; sf <= phy::kMaxSf; ++sf) {
    for (int i = 0; i < 1000; ++i) {
      const phy::LoRaSymbol s(static_cast<int>(rng.uniform_int(phy::chips_per_symbol(sf))), sf);
      ok += phy::demodulate(phy::modulate(s, 1.0), sf) == s ? 1 : 0;
      ++total;
    }
  }
  r.runtime_s = timer.seconds();
  r.measured = "max_orthogonality_error=" + detail::fmt(max_err) + " loopback=" + std::to_string(ok) + "/" +
               std::to_string(total) + " runtime_s=" + detail::fmt(r.runtime_s);
  r.bound = "error<=1e-09 loopback=100% runtime<10s";
  r.pass = max_err <= tol::kOrthogonality && ok == total && r.runtime_s < tol::kPhyRuntimeS;
  return r;
}

// C2: analytic SNR gaps between SF7/9 and SF9/11 at BEP 0.1 (sigma 8 dB, rho 6 dB).
inline CriterionResult sf_gap(const Options&) {
  detail::Timer timer;
  CriterionResult r{2, "sf_gap_at_bep_0.1", {}, {}, false, {}, 0.0};
  std::vector<std::optional<double>> at;
  for (int sf : {7, 9, 11}) at.push_back(detail::snr_at_bep(sf, tol::kSfGapBep, 8.0, 6.0));
  std::ostringstream m;
  bool pass = true;
  for (int i = 0; i < 3; ++i) {
    m << "snr_sf" << 7 + 2 * i << "=" << (at[i] ? detail::fmt(*at[i]) : std::string("none")) << " ";
  }
  for (int i = 0; i < 2; ++i) {
    if (at[i] && at[i + 1]) {
      const double gap = *at[i] - *at[i + 1];
      m << "gap_" << 7 + 2 * i << "_" << 9 + 2 * i << "=" << detail::fmt(gap) << " ";
      pass = pass && std::abs(gap - tol::kSfGapDb) <= tol::kSfGapTolDb;
    } else {
      m << "gap_" << 7 + 2 * i << "_" << 9 + 2 * i << "=none ";
      pass = false;
    }
  }
  r.measured = m.str();
  r.bound = "both gaps in 5+-1.5 dB";
  r.pass = pass;
  if (!at[0] || !at[1] || !at[2])
    r.detail = "analytic BEP never reaches 0.1 for some SF within [-40, 40] dB";
  r.runtime_s = timer.seconds();
  return r;
}

// C3: analytic floor gap BEP(sigma 8) - BEP(sigma 0) at 10 dB, SF7, rho 6 dB.
inline CriterionResult shadowing_floor_gap(const Options&) {
  detail::Timer timer;
  CriterionResult r{3, "shadowing_floor_gap", {}, {}, false, {}, 0.0};
  const double b8 = detail::analytic_bep(7, 10.0, 8.0, 6.0);
  const double b0 = detail::analytic_bep(7, 10.0, 0.0, 6.0);
  const double gap = b8 - b0;
  r.measured = "bep_sigma8=" + detail::fmt(b8) + " bep_sigma0=" + detail::fmt(b0) + " gap=" + detail::fmt(gap);
  r.bound = "gap in 0.12+-0.04";
  r.pass = std::abs(gap - tol::kFloorGap) <= tol::kFloorGapTol;
  r.runtime_s = timer.seconds();
  return r;
}

// C4: horizontal SF7 -> SF12 gain at the SF7 BEP level of 0 dB, for each
// shadowing level, rho 6 dB.
inline CriterionResult sf_gain_under_shadowing(const Options&) {
  detail::Timer timer;
  CriterionResult r{4, "sf7_to_sf12_gain", {}, {}, false, {}, 0.0};
  constexpr double kRefDb = 0.0;
  std::ostringstream m;
  bool pass = true;
  for (double sigma : {0.0, 8.0, 10.0}) {
    const double level = detail::analytic_bep(7, kRefDb, sigma, 6.0);
    const auto at12 = detail::snr_at_bep(12, level, sigma, 6.0, -60.0, kRefDb);
    m << "sigma" << detail::fmt(sigma) << ":";
    if (at12) {
      const double gain = kRefDb - *at12;
      m << "gain=" << detail::fmt(gain) << " ";
      pass = pass && std::abs(gain - tol::kSfGainDb) <= tol::kSfGainTolDb;
    } else {
      m << "gain=none ";
      pass = false;
    }
  }
  r.measured = m.str();
  r.bound = "gain in 12.5+-2 dB for sigma_dB in {0, 8, 10}";
  r.pass = pass;
  r.runtime_s = timer.seconds();
  return r;
}

// C5: analytic SIR floor gaps at 5 and 10 dB, SF7, sigma 8 dB. The simulated
// gaps are reported alongside.
inline CriterionResult sir_floor_gaps(const Options& o) {
  detail::Timer timer;
  CriterionResult r{5, "sir_floor_gaps", {}, {}, false, {}, 0.0};
  std::ostringstream m;
  bool pass = true;
  for (double snr : {5.0, 10.0}) {
    const double b0 = detail::analytic_bep(7, snr, 8.0, 0.0);
    const double b3 = detail::analytic_bep(7, snr, 8.0, 3.0);
    const double b6 = detail::analytic_bep(7, snr, 8.0, 6.0);
    const double g_low = b0 - b3;
    const double g_high = b3 - b6;
    m << "snr" << detail::fmt(snr) << ":gap_0_3=" << detail::fmt(g_low) << ",gap_3_6=" << detail::fmt(g_high) << " ";
    pass = pass && std::abs(g_low - tol::kSirGapLow) <= tol::kSirGapLowTol &&
           std::abs(g_high - tol::kSirGapHigh) <= tol::kSirGapHighTol;
  }
  // Simulated reference at 10 dB.
  std::vector<double> sim;
  std::uint64_t row = 0;
  for (double sir : {0.0, 3.0, 6.0}) {
    montecarlo::BepPlan plan;
    plan.seed = experiment::row_seed(o.seed ^ 0xC5, row++);
    plan.trials = std::min<std::uint64_t>(o.bep_trials, 20000);
    plan.sf = 7;
    plan.avg_snr = units::db_to_linear(10.0);
    plan.sir = units::db_to_linear(sir);
    plan.fading = channel::fading_params(8.0);
    sim.push_back(montecarlo::run_bep_trials(plan).estimate);
  }
  r.detail = "simulated at 10 dB: gap_0_3=" + detail::fmt(sim[0] - sim[1]) + " gap_3_6=" + detail::fmt(sim[1] - sim[2]);
  r.measured = m.str();
  r.bound = "gap_0_3 in 0.04+-0.02 and gap_3_6 in 0.15+-0.05";
  r.pass = pass;
  r.runtime_s = timer.seconds();
  return r;
}

// C6: analytic BEP vs PHY simulation, SF 7/9/11, six SNRs in [-15, 10] dB.
inline CriterionResult closed_form_vs_simulation(const Options& o) {
  detail::Timer timer;
  CriterionResult r{6, "closed_form_vs_simulation", {}, {}, false, {}, 0.0};
  const double abs_tol = detail::sim_tol(o, tol::kBepSimAbs);
  double worst_diff = 0.0;
  double worst_margin = std::numeric_limits<double>::infinity();
  int failures = 0;
  std::ostringstream fails;
  std::uint64_t row = 0;
  for (int sf : {7, 9, 11}) {
    for (double snr : {-15.0, -10.0, -5.0, 0.0, 5.0, 10.0}) {
      const auto in = detail::inputs(sf, snr, 8.0, 6.0);
      const double analytic = bep::bep(in, true);
      montecarlo::BepPlan plan;
      plan.seed = experiment::row_seed(o.seed ^ 0xC6, row++);
      plan.trials = o.bep_trials;
      plan.sf = sf;
      plan.avg_snr = in.avg_snr;
      plan.sir = in.sir;
      plan.fading = in.fading;
      const auto rep = montecarlo::run_bep_trials(plan);
      const auto v = montecarlo::compare(analytic, rep, abs_tol, o.z_mult);
      worst_diff = std::max(worst_diff, v.difference);
      worst_margin = std::min(worst_margin, v.margin);
      if (!v.pass) {
        ++failures;
        fails << "sf" << sf << "@" << detail::fmt(snr) << "dB(analytic=" << detail::fmt(analytic)
              << ",sim=" << detail::fmt(rep.estimate) << ") ";
      }
    }
  }
  r.measured = "worst_abs_diff=" + detail::fmt(worst_diff) + " failing_points=" + std::to_string(failures) + "/18";
  r.bound = "|analytic-sim| <= max(" + detail::fmt(abs_tol) + ", " + detail::fmt(o.z_mult) + "*stderr)";
  r.pass = failures == 0;
  r.detail = fails.str();
  r.runtime_s = timer.seconds();
  return r;
}

// C7: KS distances of the gamma-approximated CDFs against exact sampling.
inline CriterionResult distribution_oracles(const Options& o) {
  detail::Timer timer;
  CriterionResult r{7, "distribution_oracles", {}, {}, false, {}, 0.0};
  std::ostringstream m;
  bool pass = true;
  std::uint64_t stream = 0;
  for (double sigma : {0.0, 4.0, 8.0, 10.0}) {
    const auto f = channel::fading_params(sigma);
    rng::Stream rng(o.seed ^ 0xC7, stream++);
    std::vector<double> log_samples(o.ks_samples);
    for (auto& s : log_samples) s = std::log(channel::sample_beta(f, rng));
    std::sort(log_samples.begin(), log_samples.end());
    const double ks = detail::ks_distance(log_samples, [&](double t) { return channel::beta_cdf_log(f, t); });
    m << "beta_sigma" << detail::fmt(sigma) << "=" << detail::fmt(ks) << " ";
    pass = pass && ks <= tol::kKsBeta;
  }
  const auto model = metrics::make_network(mac::Protocol::kPureAloha, mac::Scheme::kEib, 6.0, 3000.0, 8.0);
  for (int j = 1; j <= model.alloc.k; ++j) {
    rng::Stream rng(o.seed ^ 0xC7, 100 + j);
    const double lo = model.alloc.inner_km(j);
    const double hi = model.alloc.outer_km(j);
    std::vector<double> log_x(o.ks_samples);
    for (auto& s : log_x) {
      const double d = std::sqrt(lo * lo + rng.uniform_open() * (hi * hi - lo * lo));
      s = std::log(channel::sample_beta(model.fading, rng)) + channel::log_path_gain(model.pathloss, units::km_to_m(d));
    }
    std::sort(log_x.begin(), log_x.end());
    const double ks = detail::ks_distance(log_x, [&](double t) { return metrics::xi_cdf_log(model, j, t); });
    m << "xi_annulus" << j << "=" << detail::fmt(ks) << " ";
    pass = pass && ks <= tol::kKsXi;
  }
  r.measured = m.str();
  r.bound = "KS(beta)<=0.02 for sigma_dB in {0,4,8,10}; KS(X_i)<=0.03 per annulus (EIB, R=6 km, sigma_dB=8)";
  r.pass = pass;
  r.runtime_s = timer.seconds();
  return r;
}

// C8: analytic coverage vs network simulation over protocol x scheme x R.
inline CriterionResult coverage_cross_validation(const Options& o) {
  detail::Timer timer;
  CriterionResult r{8, "coverage_cross_validation", {}, {}, false, {}, 0.0};
  const double abs_tol = detail::sim_tol(o, tol::kCoverageAbs);
  std::ostringstream m;
  int failures = 0;
  double worst = 0.0;
  std::uint64_t cell = 0;
  for (auto protocol : mac::kAllProtocols) {
    for (auto scheme : mac::kAllSchemes) {
      for (double radius : {1.0, 6.0}) {
        const auto model = metrics::make_network(protocol, scheme, radius, 3000.0, 8.0);
        const double analytic = metrics::coverage_probability(model);
        montecarlo::CoveragePlan plan;
        plan.seed = experiment::row_seed(o.seed ^ 0xC8, cell++);
        plan.trials = o.coverage_trials;
        plan.model = model;
        const auto rep = montecarlo::run_coverage_trials(plan);
        const double diff = std::abs(analytic - rep.estimate);
        worst = std::max(worst, diff);
        const bool ok = diff <= abs_tol;
        failures += ok ? 0 : 1;
        m << mac::to_string(protocol) << "/" << mac::to_string(scheme) << "/R" << detail::fmt(radius) << ":"
          << detail::fmt(analytic) << "vs" << detail::fmt(rep.estimate) << " ";
      }
    }
  }
  r.measured = "worst_abs_diff=" + detail::fmt(worst) + " failing_cells=" + std::to_string(failures) + "/12";
  r.bound = "|analytic-sim| <= " + detail::fmt(abs_tol) + " per cell";
  r.pass = failures == 0;
  r.detail = m.str();
  r.runtime_s = timer.seconds();
  return r;
}

// C9: qualitative trends of the network metrics (sigma_dB = 8).
inline CriterionResult trend_suite(const Options&) {
  detail::Timer timer;
  CriterionResult r{9, "trend_suite", {}, {}, false, {}, 0.0};
  const std::vector<double> n_grid = {1000.0, 3000.0, 5000.0, 8000.0};
  const std::vector<double> r_grid = {0.5, 1.0, 2.0, 4.0, 6.0, 8.0};
  auto eval = [](mac::Protocol p, mac::Scheme s, double radius, double n_bar) {
    return metrics::NetworkEvaluator(metrics::make_network(p, s, radius, n_bar, 8.0));
  };
  std::vector<std::string> failed;
  // Coverage nonincreasing in N and in R; delay increasing in both.
  bool cov_n = true, cov_r = true, delay_n = true, delay_r = true;
  for (auto p : mac::kAllProtocols) {
    for (auto s : mac::kAllSchemes) {
      for (double radius : {1.0, 6.0}) {
        double prev_cov = 2.0;
        double prev_delay = -1.0;
        for (double n : n_grid) {
          const auto ev = eval(p, s, radius, n);
          cov_n = cov_n && ev.coverage() <= prev_cov;
          delay_n = delay_n && ev.average_delay() > prev_delay;
          prev_cov = ev.coverage();
          prev_delay = ev.average_delay();
        }
      }
      double prev_cov = 2.0;
      double prev_delay = -1.0;
      for (double radius : r_grid) {
        const auto ev = eval(p, s, radius, 3000.0);
        cov_r = cov_r && ev.coverage() <= prev_cov;
        delay_r = delay_r && ev.average_delay() > prev_delay;
        prev_cov = ev.coverage();
        prev_delay = ev.average_delay();
      }
    }
  }
  if (!cov_n) failed.push_back("coverage_vs_N");
  if (!cov_r) failed.push_back("coverage_vs_R");
  if (!delay_n) failed.push_back("delay_vs_N");
  if (!delay_r) failed.push_back("delay_vs_R");
  // NP-CSMA beats P-ALOHA at R = 1 km.
  bool csma = true;
  std::ostringstream m;
  for (auto s : mac::kAllSchemes) {
    const double c_csma = eval(mac::Protocol::kNpCsma, s, 1.0, 3000.0).coverage();
    const double c_aloha = eval(mac::Protocol::kPureAloha, s, 1.0, 3000.0).coverage();
    m << "R1_" << mac::to_string(s) << ":csma=" << detail::fmt(c_csma) << ",aloha=" << detail::fmt(c_aloha) << " ";
    csma = csma && c_csma > c_aloha;
  }
  if (!csma) failed.push_back("npcsma_over_paloha_at_R1");
  // EIB/EAB crossover on the R grid.
  bool crossover = false;
  for (auto p : mac::kAllProtocols) {
    bool eab_wins = false;
    bool eib_wins_later = false;
    for (double radius : r_grid) {
      const double eib = eval(p, mac::Scheme::kEib, radius, 3000.0).coverage();
      const double eab = eval(p, mac::Scheme::kEab, radius, 3000.0).coverage();
      if (eab > eib) eab_wins = true;
      if (eab_wins && eib > eab) eib_wins_later = true;
    }
    if (eab_wins && eib_wins_later) {
      crossover = true;
      m << "crossover:" << mac::to_string(p) << " ";
    }
  }
  if (!crossover) failed.push_back("scheme_crossover");
  // NP-CSMA energy efficiency peaks in the interior near 1.8 km.
  bool ee_peak = true;
  for (auto s : mac::kAllSchemes) {
    const double e05 = eval(mac::Protocol::kNpCsma, s, 0.5, 3000.0).average_energy_efficiency();
    const double e18 = eval(mac::Protocol::kNpCsma, s, 1.8, 3000.0).average_energy_efficiency();
    const double e5 = eval(mac::Protocol::kNpCsma, s, 5.0, 3000.0).average_energy_efficiency();
    m << "ee_" << mac::to_string(s) << ":0.5=" << detail::fmt(e05) << ",1.8=" << detail::fmt(e18)
      << ",5=" << detail::fmt(e5) << " ";
    ee_peak = ee_peak && e18 > e05 && e18 > e5;
  }
  if (!ee_peak) failed.push_back("npcsma_ee_interior_max");
  std::string f;
  for (const auto& s : failed) f += s + " ";
  r.measured = failed.empty() ? "all trends hold" : "failed: " + f;
  r.bound = "every listed trend holds";
  r.pass = failed.empty();
  r.detail = m.str();
  r.runtime_s = timer.seconds();
  return r;
}

// C10: time on air at SF7 with default frame parameters.
inline CriterionResult toa_golden(const Options&) {
  detail::Timer timer;
  CriterionResult r{10, "time_on_air_sf7", {}, {}, false, {}, 0.0};
  const double toa = mac::time_on_air(7, mac::MacConfig{});
  r.measured = "toa_s=" + detail::fmt(toa);
  r.bound = "61.696 ms +- 1 us";
  r.pass = std::abs(toa - tol::kToaS) <= tol::kToaTolS;
  r.runtime_s = timer.seconds();
  return r;
}

// Reduced validation tables (BEP and coverage simulation) rendered as CSV.
inline std::string determinism_probe(std::uint64_t seed) {
  config::ExperimentConfig cfg;
  cfg.sfs = {7};
  cfg.protocols = {mac::Protocol::kPureAloha, mac::Protocol::kNpCsma};
  cfg.schemes = {mac::Scheme::kEib};
  experiment::RunOptions opt;
  opt.seed = seed;
  opt.trials = 3000;
  opt.validate = true;
  const auto bep_table = experiment::run_bep_curve(cfg, {"snr_db", -10.0, 10.0, 3, false}, opt);
  const auto cov_table =
      experiment::run_network_sweep(cfg, experiment::NetworkCommand::kCoverage, {"radius_km", 1.0, 6.0, 2, false}, opt);
  return experiment::to_csv(bep_table) + experiment::to_csv(cov_table);
}

// C11: byte-identical validation CSV with 1 and 8 workers.
inline CriterionResult determinism(const Options& o) {
  detail::Timer timer;
  CriterionResult r{11, "determinism_across_workers", {}, {}, false, {}, 0.0};
  std::string one;
  std::string eight;
  {
    detail::ScopedWorkers w(1);
    one = determinism_probe(o.seed);
  }
  {
    detail::ScopedWorkers w(8);
    eight = determinism_probe(o.seed);
  }
  r.measured = std::string(one == eight ? "identical" : "different") + " (" + std::to_string(one.size()) + " bytes)";
  r.bound = "byte-identical CSV for workers 1 and 8";
  r.pass = one == eight;
  r.runtime_s = timer.seconds();
  return r;
}

inline constexpr int kCriteria = 11;

inline CriterionResult run(int id, const Options& o) {
  switch (id) {
    case 1: return phy_exactness(o);
    case 2: return sf_gap(o);
    case 3: return shadowing_floor_gap(o);
    case 4: return sf_gain_under_shadowing(o);
    case 5: return sir_floor_gaps(o);
    case 6: return closed_form_vs_simulation(o);
    case 7: return distribution_oracles(o);
    case 8: return coverage_cross_validation(o);
    case 9: return trend_suite(o);
    case 10: return toa_golden(o);
    case 11: return determinism(o);
  }
  throw DomainError("no acceptance criterion " + std::to_string(id));
}

inline experiment::Table report_table(const std::vector<CriterionResult>& results) {
  experiment::Table t;
  t.columns = {"criterion", "name", "measured", "bound", "verdict", "runtime_s", "detail"};
  for (const auto& r : results) {
    auto quote = [](std::string s) {
      for (auto& ch : s)
        if (ch == ',') ch = ';';
      return s;
    };
    t.add_row({static_cast<double>(r.id), r.name, quote(r.measured), quote(r.bound), r.pass ? "PASS" : "FAIL",
               r.runtime_s, quote(r.detail)});
  }
  return t;
}

}  // namespace lorawban::acceptance
