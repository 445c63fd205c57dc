#pragma once

// Closed-form symbol/bit error probabilities under composite fading with one
// dominant co-SF interferer.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <vector>

#include "lorawban/channel.hpp"
#include "lorawban/error.hpp"
#include "lorawban/numerics.hpp"
#include "lorawban/phy.hpp"

namespace lorawban::bep {

struct BepInputs {
  int sf = 7;
  double avg_snr = 1.0;
  double sir = 1.0;
  channel::FadingParams fading{};
  int quad_order = 20;

  void validate() const {
    phy::require_sf(sf);
    if (!(avg_snr > 0.0) || !std::isfinite(avg_snr)) throw DomainError("average SNR must be > 0");
    if (!(sir > 0.0)) throw DomainError("SIR must be > 0");
    if (quad_order < 1) throw DomainError("quadrature order must be >= 1");
  }
};

// Counts probabilities that had to be pulled back into [0, 1].
struct ClampStats {
  std::uint64_t clamped = 0;
};

namespace detail {

inline double clamp_probability(double p, ClampStats* stats) {
  if (p < 0.0 || p > 1.0 || std::isnan(p)) {
    if (stats) ++stats->clamped;
    if (std::isnan(p)) return 0.0;
    return p < 0.0 ? 0.0 : 1.0;
  }
  return p;
}

}  // namespace detail

// Harmonic-number approximation ln(s) + 1/(2s) + 0.57722.
inline double h_constant(double count) {
  if (!(count >= 1.0)) throw DomainError("h_constant: count must be >= 1");
  return std::log(count) + 1.0 / (2.0 * count) + 0.57722;
}

// Linear Q approximation Q(x) ~ 1/2 + b (x - a) between a + 1/(2b) and a - 1/(2b).
struct LinearQParams {
  double a = 0.0;
  double b = 0.0;

  double lower() const { return a + 1.0 / (2.0 * b); }
  double upper() const { return a - 1.0 / (2.0 * b); }
  double eval(double x) const {
    if (x <= lower()) return 1.0;
    if (x >= upper()) return 0.0;
    return 0.5 + b * (x - a);
  }
};

inline LinearQParams linear_q_params(int sf, double avg_snr) {
  phy::require_sf(sf);
  if (!(avg_snr > 0.0)) throw DomainError("linear_q_params: average SNR must be > 0");
  const double h = h_constant(static_cast<double>(phy::chips_per_symbol(sf) - 1));
  const double c = phy::chips_per_symbol(sf) * avg_snr;
  return {h / c, -c / (2.0 * std::sqrt(numerics::kPi * h))};
}

// SEP without interference: the linearised Q integrated against the gamma
// density in closed form.
inline double sep_no_interference(const BepInputs& in, ClampStats* stats = nullptr) {
  in.validate();
  const auto lq = linear_q_params(in.sf, in.avg_snr);
  const auto& f = in.fading;
  const double lo = std::max(lq.lower(), 0.0);
  const double hi = lq.upper();
  const double f_lo = channel::beta_cdf(f, lo);
  const double f_hi = channel::beta_cdf(f, hi);
  // int_0^x t p(t) dt = xi delta P(xi + 1, x / delta)
  auto first_moment = [&](double x) {
    if (x <= 0.0) return 0.0;
    return f.xi * f.delta * numerics::regularized_lower_gamma(f.xi + 1.0, x / f.delta);
  };
  const double p = f_lo + (0.5 - lq.b * lq.a) * (f_hi - f_lo) + lq.b * (first_moment(hi) - first_moment(lo));
  return detail::clamp_probability(p, stats);
}

// Precomputed Gauss-Hermite nodes for the substituted composite-fading
// integral: beta = e^y, log weights include the e^{y^2} kernel compensation
// and the gamma density in log space.
class ConditionalSep {
 public:
  explicit ConditionalSep(const BepInputs& in) {
    in.validate();
    const auto rule = numerics::gauss_hermite(in.quad_order);
    const double c = phy::chips_per_symbol(in.sf) * in.avg_snr;
    const auto& f = in.fading;
    const double log_norm = f.log_norm();
    for (int w = 0; w < rule.order; ++w) {
      const double y = rule.nodes[w];
      const double lw = std::log(rule.weights[w]) + y * y + f.xi * y - std::exp(y) / f.delta - log_norm;
      amp_.push_back(std::sqrt(c * std::exp(y)));
      log_weight_.push_back(lw);
    }
  }

  int order() const { return static_cast<int>(amp_.size()); }
  double amplitude(int w) const { return amp_[w]; }
  double log_weight(int w) const { return log_weight_[w]; }

  double operator()(double u0) const {
    if (!(u0 >= 0.0)) throw DomainError("peak bound must be >= 0");
    double total = 0.0;
    for (int i = 0; i < order(); ++i)
      for (int k = 0; k < order(); ++k)
        total += std::exp(log_weight_[i] + log_weight_[k]) * numerics::q_function(amp_[i] - amp_[k] * u0);
    return total;
  }

 private:
  std::vector<double> amp_;
  std::vector<double> log_weight_;
};

// SEP conditioned on a peak bound u0.
inline double sep_interference_conditional(const BepInputs& in, double u0, ClampStats* stats = nullptr) {
  return detail::clamp_probability(ConditionalSep(in)(u0), stats);
}

// Histogram of the rho-free peak bound v = sqrt(rho) U_0 over all
// (tau, I1) pairs. v always lies in [1/2, 1]. Each bin keeps its count and
// the first two moments about the bin centre.
class PeakBoundTable {
 public:
  static constexpr int kBins = 1 << 16;
  static constexpr double kLow = 0.5;
  static constexpr double kHigh = 1.0;

  explicit PeakBoundTable(int sf) : sf_(sf) {
    const int n = phy::chips_per_symbol(sf);
    count_.assign(kBins, 0);
    sum_.assign(kBins, 0.0);
    sum_sq_.assign(kBins, 0.0);
    for (int tau = 0; tau <= n / 2; ++tau) {
      for (int i1 = 0; i1 <= n / 2; ++i1) {
        // I1 and n - I1 give the same bound.
        const std::uint64_t mult = (i1 == 0 || i1 == n / 2) ? 1 : 2;
        const double v = (phy::detail::dirichlet_ratio(-i1, tau, n) + static_cast<double>(n - tau)) / n;
        const int b = bin_of(v);
        const double d = v - centre(b);
        count_[b] += mult;
        sum_[b] += mult * d;
        sum_sq_[b] += mult * d * d;
      }
    }
    total_ = static_cast<std::uint64_t>(n / 2 + 1) * static_cast<std::uint64_t>(n);
    prefix_.assign(kBins + 1, 0);
    for (int b = 0; b < kBins; ++b) prefix_[b + 1] = prefix_[b] + count_[b];
  }

  static const PeakBoundTable& for_sf(int sf) {
    phy::require_sf(sf);
    static std::array<std::unique_ptr<PeakBoundTable>, phy::kMaxSf + 1> cache;
    static std::once_flag flags[phy::kMaxSf + 1];
    std::call_once(flags[sf], [sf] { cache[sf] = std::make_unique<PeakBoundTable>(sf); });
    return *cache[sf];
  }

  int sf() const { return sf_; }
  std::uint64_t total() const { return total_; }
  static double width() { return (kHigh - kLow) / kBins; }
  static double centre(int b) { return kLow + (b + 0.5) * width(); }
  static int bin_of(double v) {
    const int b = static_cast<int>(std::floor((v - kLow) / width()));
    return std::clamp(b, 0, kBins - 1);
  }

  std::uint64_t count(int b) const { return count_[b]; }
  // Mean of v in bin b (bin must be non-empty).
  double mean(int b) const { return centre(b) + sum_[b] / static_cast<double>(count_[b]); }
  // Sum of squared deviations from the bin mean.
  double scatter(int b) const {
    const double s = sum_sq_[b] - sum_[b] * sum_[b] / static_cast<double>(count_[b]);
    return s > 0.0 ? s : 0.0;
  }
  // Number of entries in bins [b0, b1).
  std::uint64_t range_count(int b0, int b1) const { return prefix_[b1] - prefix_[b0]; }

 private:
  int sf_;
  std::uint64_t total_ = 0;
  std::vector<std::uint64_t> count_;
  std::vector<double> sum_;
  std::vector<double> sum_sq_;
  std::vector<std::uint64_t> prefix_;
};

// SEP averaged over tau in {0..2^(sf-1)} and I1 in {0..2^sf - 1}. For each
// node pair, bins whose Q argument is beyond +-kBand contribute exactly 0 or
// their full count; the rest use a second-order expansion about the bin mean.
inline double sep_interference(const BepInputs& in, ClampStats* stats = nullptr) {
  constexpr double kBand = 10.0;
  constexpr double kNegligible = 1e-30;
  in.validate();
  const ConditionalSep cond(in);
  const auto& table = PeakBoundTable::for_sf(in.sf);
  const double root_rho = std::sqrt(in.sir);
  const double inv_total = 1.0 / static_cast<double>(table.total());
  const int order = cond.order();
  double total = 0.0;
  for (int i = 0; i < order; ++i) {
    for (int k = 0; k < order; ++k) {
      const double weight = std::exp(cond.log_weight(i) + cond.log_weight(k));
      if (weight < kNegligible) continue;
      const double s1 = cond.amplitude(i);
      const double s2 = cond.amplitude(k) / root_rho;  // Q(s1 - s2 v)
      const double v_zero = (s1 - kBand) / s2;          // below: Q ~ 0
      const double v_one = (s1 + kBand) / s2;           // above: Q ~ 1
      const int b_lo = v_zero < PeakBoundTable::kLow ? 0 : PeakBoundTable::bin_of(v_zero);
      const int b_hi = v_one > PeakBoundTable::kHigh ? PeakBoundTable::kBins
                                                     : PeakBoundTable::bin_of(v_one) + 1;
      double acc = static_cast<double>(table.range_count(b_hi, PeakBoundTable::kBins));
      for (int b = b_lo; b < b_hi; ++b) {
        const auto n = table.count(b);
        if (n == 0) continue;
        const double x = s1 - s2 * table.mean(b);
        const double curvature = s2 * s2 * x * std::exp(-0.5 * x * x) / std::sqrt(2.0 * numerics::kPi);
        acc += static_cast<double>(n) * numerics::q_function(x) + 0.5 * curvature * table.scatter(b);
      }
      total += weight * acc * inv_total;
    }
  }
  return detail::clamp_probability(total, stats);
}

struct BepBreakdown {
  double sep_no_interference = 0.0;
  double sep_interference = 0.0;
  double bep = 0.0;
  std::uint64_t clamped = 0;
};

// P_b ~ (P_N + (1 - P_N) P_I) / 2.
inline double combine(double sep_n, double sep_i) { return 0.5 * (sep_n + (1.0 - sep_n) * sep_i); }

inline BepBreakdown bep_breakdown(const BepInputs& in, bool with_interference) {
  ClampStats stats;
  BepBreakdown out;
  out.sep_no_interference = sep_no_interference(in, &stats);
  out.sep_interference = with_interference ? sep_interference(in, &stats) : 0.0;
  out.bep = detail::clamp_probability(combine(out.sep_no_interference, out.sep_interference), &stats);
  out.clamped = stats.clamped;
  return out;
}

inline double bep(const BepInputs& in, bool with_interference) {
  return bep_breakdown(in, with_interference).bep;
}

}  // namespace lorawban::bep
