#pragma once

// Monte-Carlo ground truth: symbol-level BEP trials through the sample-level
// PHY, and network coverage trials over a Poisson field of devices. Trial i
// always draws from stream (seed, i), and outcomes are integer counts, so the
// estimates are bit-identical for any number of workers.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <algorithm>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "lorawban/channel.hpp"
#include "lorawban/error.hpp"
#include "lorawban/mac.hpp"
#include "lorawban/metrics.hpp"
#include "lorawban/numerics.hpp"
#include "lorawban/phy.hpp"
#include "lorawban/rng.hpp"
#include "lorawban/units.hpp"

namespace lorawban::montecarlo {

inline constexpr const char* kWorkersEnv = "LORA_WBAN_WORKERS";

// Worker count: LORA_WBAN_WORKERS wins, then the hint, then the hardware.
inline unsigned resolve_workers(unsigned hint = 0) {
  if (const char* env = std::getenv(kWorkersEnv)) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  if (hint > 0) return hint;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

// Sums fn(i) over i in [0, trials) on `workers` threads.
template <typename Fn>
std::uint64_t parallel_count(std::uint64_t trials, unsigned workers, Fn&& fn) {
  if (workers <= 1 || trials < 2) {
    std::uint64_t total = 0;
    for (std::uint64_t i = 0; i < trials; ++i) total += fn(i);
    return total;
  }
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, trials));
  std::vector<std::uint64_t> partial(workers, 0);
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        std::uint64_t local = 0;
        for (std::uint64_t i = w; i < trials; i += workers) local += fn(i);
        partial[w] = local;
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::uint64_t total = 0;
  for (auto p : partial) total += p;
  return total;
}

struct TrialReport {
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t events = 0;
  double wall_time_s = 0.0;
  std::uint64_t clamped = 0;
};

inline double binomial_stderr(double p, std::uint64_t n) {
  return n == 0 ? 0.0 : std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

struct PolarPoint {
  double r;
  double angle;
};

// Homogeneous PPP of intensity lambda (per unit area) in a disk of radius r.
inline std::vector<PolarPoint> sample_ppp_disk(double lambda, double radius, rng::Stream& rng) {
  if (!(lambda > 0.0) || !(radius > 0.0)) throw DomainError("sample_ppp_disk: lambda and R must be > 0");
  const auto count = rng.poisson(lambda * numerics::kPi * radius * radius);
  std::vector<PolarPoint> pts;
  pts.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const double r = radius * std::sqrt(rng.uniform());
    const double angle = 2.0 * numerics::kPi * rng.uniform();
    pts.push_back({r, angle});
  }
  return pts;
}

struct BepPlan {
  std::uint64_t seed = 1;
  std::uint64_t trials = 100000;
  int sf = 7;
  double avg_snr = 1.0;
  double sir = 1.0;
  channel::FadingParams fading{};
  bool with_interference = true;
  unsigned workers = 0;

  void validate() const {
    if (trials < 1) throw DomainError("trial count must be >= 1");
    phy::require_sf(sf);
    if (!(avg_snr > 0.0)) throw DomainError("average SNR must be > 0");
    if (!(sir > 0.0)) throw DomainError("SIR must be > 0");
  }
};

// Symbol error outcome of one BEP trial (1 = error).
inline std::uint64_t bep_trial(const BepPlan& plan, std::uint64_t index) {
  rng::Stream rng(plan.seed, index);
  const int n = phy::chips_per_symbol(plan.sf);
  const phy::LoRaSymbol symbol(static_cast<int>(rng.uniform_int(n)), plan.sf);
  const double beta1 = channel::sample_beta(plan.fading, rng);
  const double beta_k = channel::sample_beta(plan.fading, rng);
  std::optional<phy::InterferenceOffset> offset;
  if (plan.with_interference) {
    const int tau = static_cast<int>(rng.uniform_int(n / 2 + 1));
    const int i1 = static_cast<int>(rng.uniform_int(n));
    offset = phy::InterferenceOffset{tau, i1, plan.sir};
  }
  // Unit symbol energy; per-sample noise variance N0 = 1 / (2^sf avg_snr).
  const auto tx = phy::modulate(symbol, 1.0);
  const double n0 = 1.0 / (n * plan.avg_snr);
  const auto rx = phy::compose_received(tx, {beta1, 1.0}, offset, {beta_k, 1.0}, n0, &rng);
  return phy::demodulate(rx, plan.sf) == symbol ? 0 : 1;
}

// Estimate is the BEP 2^(sf-1) / (2^sf - 1) * SEP; events counts symbol errors.
inline TrialReport run_bep_trials(const BepPlan& plan) {
  plan.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const auto errors = parallel_count(plan.trials, resolve_workers(plan.workers),
                                     [&](std::uint64_t i) { return bep_trial(plan, i); });
  const double n = phy::chips_per_symbol(plan.sf);
  const double factor = (n / 2.0) / (n - 1.0);
  const double sep = static_cast<double>(errors) / static_cast<double>(plan.trials);
  TrialReport r;
  r.trials = plan.trials;
  r.events = errors;
  r.estimate = factor * sep;
  r.stderr_ = factor * binomial_stderr(sep, plan.trials);
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

struct CoveragePlan {
  std::uint64_t seed = 1;
  std::uint64_t trials = 100000;
  metrics::NetworkModel model{};
  // When set, the desired device sits at this distance (km) instead of being
  // drawn from the disk.
  std::optional<double> fixed_distance_km;
  unsigned workers = 0;
};

// Precomputed per-annulus interferer statistics shared by all trials.
class CoverageSimulator {
 public:
  explicit CoverageSimulator(const CoveragePlan& plan) : plan_(plan) {
    plan_.model.validate();
    if (plan_.trials < 1) throw DomainError("trial count must be >= 1");
    if (plan_.fixed_distance_km) metrics::detail::check_distance(plan_.model, *plan_.fixed_distance_km);
    for (int j = 1; j <= plan_.model.alloc.k; ++j) contexts_.push_back(metrics::annulus_context(plan_.model, j));
    log_tx_over_noise_ = std::log(plan_.model.tx_mw()) - std::log(plan_.model.noise_mw());
  }

  // 1 when the desired link clears both the SNR and SIR thresholds.
  std::uint64_t trial(std::uint64_t index) const {
    const auto& m = plan_.model;
    rng::Stream rng(plan_.seed, index);
    const double d1 = plan_.fixed_distance_km ? *plan_.fixed_distance_km : m.radius_km() * std::sqrt(rng.uniform_open());
    const auto a = mac::sf_for_distance(m.alloc, d1);
    const auto& ctx = contexts_[a.annulus - 1];
    const double beta1 = channel::sample_beta(m.fading, rng);
    const double log_signal = std::log(beta1) + channel::log_path_gain(m.pathloss, units::km_to_m(d1));
    const bool snr_ok = log_tx_over_noise_ + log_signal >= std::log(units::db_to_linear(a.snr_threshold_db));
    // Interferers: PPP of intensity lambda_u over the same annulus.
    const double lo = m.alloc.inner_km(a.annulus);
    const double hi = m.alloc.outer_km(a.annulus);
    const auto count = rng.poisson(ctx.upsilon);
    const double limit = log_signal - std::log(m.theta());
    bool sir_ok = true;
    for (std::uint64_t k = 0; k < count; ++k) {
      const double r = std::sqrt(lo * lo + rng.uniform_open() * (hi * hi - lo * lo));
      const double beta_k = channel::sample_beta(m.fading, rng);
      if (std::log(beta_k) + channel::log_path_gain(m.pathloss, units::km_to_m(r)) > limit) sir_ok = false;
    }
    return snr_ok && sir_ok ? 1 : 0;
  }

  TrialReport run() const {
    const auto t0 = std::chrono::steady_clock::now();
    const auto hits = parallel_count(plan_.trials, resolve_workers(plan_.workers),
                                     [&](std::uint64_t i) { return trial(i); });
    TrialReport r;
    r.trials = plan_.trials;
    r.events = hits;
    r.estimate = static_cast<double>(hits) / static_cast<double>(plan_.trials);
    r.stderr_ = binomial_stderr(r.estimate, plan_.trials);
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  }

 private:
  CoveragePlan plan_;
  std::vector<metrics::AnnulusContext> contexts_;
  double log_tx_over_noise_ = 0.0;
};

inline TrialReport run_coverage_trials(const CoveragePlan& plan) { return CoverageSimulator(plan).run(); }

struct Verdict {
  bool pass = false;
  double difference = 0.0;
  double abs_bound = 0.0;
  double z_bound = 0.0;
  // Allowed bound minus observed difference; negative on failure.
  double margin = 0.0;
};

inline Verdict compare(double analytic, const TrialReport& report, double abs_tol, double z_mult) {
  Verdict v;
  v.difference = std::abs(analytic - report.estimate);
  v.abs_bound = abs_tol;
  v.z_bound = z_mult * report.stderr_;
  const double bound = std::max(v.abs_bound, v.z_bound);
  v.margin = bound - v.difference;
  v.pass = v.difference <= bound;
  return v;
}

}  // namespace lorawban::montecarlo
