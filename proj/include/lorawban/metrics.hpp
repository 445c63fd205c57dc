#pragma once

// Network-level analytics over a Poisson field of devices in a disk:
// connection (SNR) probability, dominant-interferer SIR success, coverage,
// energy efficiency, throughput and delay. Distances are km at the API and
// converted to meters only for path gains.

#include <cmath>
#include <algorithm>
#include <functional>
#include <memory>
#include <limits>
#include <vector>

#include "lorawban/channel.hpp"
#include "lorawban/error.hpp"
#include "lorawban/mac.hpp"
#include "lorawban/numerics.hpp"
#include "lorawban/units.hpp"

namespace lorawban::metrics {

inline constexpr double kInfiniteDelay = std::numeric_limits<double>::infinity();

struct NetworkModel {
  double n_bar = 3000.0;
  mac::Protocol protocol = mac::Protocol::kPureAloha;
  mac::SfAllocation alloc = mac::build_allocation(mac::Scheme::kEib, 1.0);
  mac::MacConfig mac{};
  channel::PathLossModel pathloss{};
  channel::FadingParams fading = channel::fading_params(8.0);
  double noise_figure_db = 6.0;
  double sir_threshold_db = 1.0;

  double radius_km() const { return alloc.radius_km; }
  double lambda_km2() const { return n_bar / (numerics::kPi * radius_km() * radius_km()); }
  double theta() const { return units::db_to_linear(sir_threshold_db); }
  double noise_mw() const {
    return units::dbm_to_mw(channel::noise_power_dbm(mac.bandwidth_hz, noise_figure_db));
  }
  double tx_mw() const { return units::dbm_to_mw(mac.tx_power_dbm); }
  mac::ChannelContext channel_context() const { return {pathloss, fading}; }

  void validate() const {
    if (!(n_bar >= 0.0) || !std::isfinite(n_bar)) throw ConfigError("n_bar", "mean device count must be >= 0");
    mac.validate();
    pathloss.validate();
    if (!std::isfinite(sir_threshold_db)) throw ConfigError("sir_threshold_db", "SIR threshold must be finite");
  }
};

inline NetworkModel make_network(mac::Protocol protocol, mac::Scheme scheme, double radius_km, double n_bar,
                                 double sigma_db, const mac::MacConfig& cfg = {},
                                 const channel::PathLossModel& pathloss = {}) {
  NetworkModel m;
  m.n_bar = n_bar;
  m.protocol = protocol;
  m.alloc = mac::build_allocation(scheme, radius_km);
  m.mac = cfg;
  m.pathloss = pathloss;
  m.fading = channel::fading_params(sigma_db);
  m.validate();
  return m;
}

namespace detail {

inline void check_annulus(const NetworkModel& m, int j) {
  if (j < 1 || j > m.alloc.k) throw DomainError("annulus index out of range");
}

inline void check_distance(const NetworkModel& m, double d_km) {
  if (!(d_km > 0.0) || d_km > m.radius_km()) throw DomainError("distance must lie in (0, R]");
}

}  // namespace detail

// P[SNR >= q] at distance d1 under the gamma approximation.
inline double connection_probability(const NetworkModel& m, double d1_km) {
  detail::check_distance(m, d1_km);
  const auto a = mac::sf_for_distance(m.alloc, d1_km);
  const double log_arg = std::log(m.noise_mw()) + std::log(units::db_to_linear(a.snr_threshold_db)) -
                         std::log(m.tx_mw()) - channel::log_path_gain(m.pathloss, units::km_to_m(d1_km)) -
                         std::log(m.fading.delta);
  return 1.0 - numerics::regularized_lower_gamma_log(m.fading.xi, log_arg);
}

// Density of g(d) for d uniform over annulus j; x is a linear path gain.
inline double interferer_gain_pdf(const NetworkModel& m, int j, double x) {
  detail::check_annulus(m, j);
  const double g_hi = channel::path_gain(m.pathloss, std::max(units::km_to_m(m.alloc.inner_km(j)), 1e-300));
  const double g_lo = channel::path_gain(m.pathloss, units::km_to_m(m.alloc.outer_km(j)));
  if (!(x >= g_lo) || x > g_hi) return 0.0;
  const double n = m.pathloss.exponent;
  const double area_m2 = m.alloc.area_km2(j) * 1e6;
  const double d0_sq = m.pathloss.d0_m * m.pathloss.d0_m;
  return 2.0 * numerics::kPi * d0_sq * std::pow(10.0, -2.0 * m.pathloss.pl_d0_db / (10.0 * n)) *
         std::pow(x, -2.0 / n - 1.0) / (n * area_m2);
}

// CDF of X_i = beta g(d_i), d_i uniform over annulus j, argument as log(z).
inline double xi_cdf_log(const NetworkModel& m, int j, double log_z) {
  detail::check_annulus(m, j);
  if (log_z == -std::numeric_limits<double>::infinity()) return 0.0;
  const auto& f = m.fading;
  const double two_over_n = 2.0 / m.pathloss.exponent;
  const double lgamma_xi = std::lgamma(f.xi);
  // pi x^2 [P(xi, a) - a^{-2/n} G(xi + 2/n, a) / Gamma(xi)],  a = z / (delta g(x))
  auto term = [&](double x_km) {
    if (x_km <= 0.0) return 0.0;
    const double x_m = units::km_to_m(x_km);
    const double log_a = log_z - std::log(f.delta) - channel::log_path_gain(m.pathloss, x_m);
    const double p = numerics::regularized_lower_gamma_log(f.xi, log_a);
    const double second =
        std::exp(-two_over_n * log_a + numerics::log_lower_incomplete_gamma(f.xi + two_over_n, log_a) - lgamma_xi);
    return numerics::kPi * x_km * x_km * (p - second);
  };
  const double v = (term(m.alloc.outer_km(j)) - term(m.alloc.inner_km(j))) / m.alloc.area_km2(j);
  return std::clamp(v, 0.0, 1.0);
}

inline double xi_cdf(const NetworkModel& m, int j, double z) {
  if (!(z > 0.0)) return 0.0;
  return xi_cdf_log(m, j, std::log(z));
}

// Per-annulus quantities that do not depend on the device position.
struct AnnulusContext {
  int j = 1;
  int sf = 7;
  double hidden_fraction = 0.0;
  double lambda_u = 0.0;
  double upsilon = 0.0;
  double energy_j = 0.0;
};

inline AnnulusContext annulus_context(const NetworkModel& m, int j) {
  detail::check_annulus(m, j);
  AnnulusContext c;
  c.j = j;
  c.sf = m.alloc.sf_of(j);
  c.hidden_fraction =
      m.protocol == mac::Protocol::kNpCsma ? mac::csma_hidden_fraction(m.alloc, j, m.mac, m.channel_context()) : 0.0;
  c.lambda_u =
      mac::interferer_intensity(m.protocol, m.lambda_km2(), c.sf, m.mac, m.alloc, j, c.hidden_fraction).lambda_u;
  c.upsilon = c.lambda_u * m.alloc.area_km2(j);
  c.energy_j = mac::energy_per_message(m.protocol, c.sf, m.mac, m.alloc, j, m.lambda_km2(), c.hidden_fraction);
  return c;
}

// P_SIR(d1) = e^{-v} int exp(v F_X(z g(d1) / theta)) p_beta(z) dz, integrated in log z.
inline double sir_success_probability(const NetworkModel& m, double d1_km, const AnnulusContext& ctx) {
  detail::check_distance(m, d1_km);
  if (ctx.upsilon == 0.0) return 1.0;
  const auto& f = m.fading;
  const double log_shift = channel::log_path_gain(m.pathloss, units::km_to_m(d1_km)) - std::log(m.theta());
  const double log_norm = f.log_norm();
  // Mass of p_beta below t_lo is about 1e-9, above t_hi far below 1e-8.
  const double t_lo = std::log(f.delta) + (std::log(1e-9) + std::lgamma(f.xi + 1.0)) / f.xi;
  const double t_hi = std::log(f.delta * (40.0 + f.xi));
  auto integrand = [&](double t) {
    const double fx = xi_cdf_log(m, ctx.j, t + log_shift);
    return std::exp(-ctx.upsilon * (1.0 - fx) + f.xi * t - std::exp(t) / f.delta - log_norm);
  };
  const double v = numerics::integrate(integrand, t_lo, t_hi, 1e-7, 1e-12).value;
  return std::clamp(v, 0.0, 1.0);
}

inline double sir_success_probability(const NetworkModel& m, double d1_km) {
  const auto a = mac::sf_for_distance(m.alloc, d1_km);
  return sir_success_probability(m, d1_km, annulus_context(m, a.annulus));
}

inline double joint_success(const NetworkModel& m, double d1_km, const AnnulusContext& ctx) {
  const double snr = connection_probability(m, d1_km);
  if (snr == 0.0) return 0.0;
  return snr * sir_success_probability(m, d1_km, ctx);
}

inline double joint_success(const NetworkModel& m, double d1_km) {
  const auto a = mac::sf_for_distance(m.alloc, d1_km);
  return joint_success(m, d1_km, annulus_context(m, a.annulus));
}

struct AnnulusMetrics {
  int j = 1;
  double p_snr_avg = 0.0;
  double p_sir_avg = 0.0;
  double p_joint_avg = 0.0;
  // (2 / R^2) int_{l_{j-1}}^{l_j} P_joint(x) x dx
  double success_integral = 0.0;
  double throughput = 0.0;
  double delay = 0.0;
  double energy_per_message = 0.0;
  double energy_efficiency = 0.0;
};

// Evaluates all per-annulus quantities once and derives the disk averages.
class NetworkEvaluator {
 public:
  static constexpr double kRelTol = 1e-5;

  explicit NetworkEvaluator(NetworkModel model, bool with_components = false) : m_(std::move(model)) {
    m_.validate();
    const double r2 = m_.radius_km() * m_.radius_km();
    for (int j = 1; j <= m_.alloc.k; ++j) {
      const auto ctx = annulus_context(m_, j);
      contexts_.push_back(ctx);
      const double lo = m_.alloc.inner_km(j);
      const double hi = m_.alloc.outer_km(j);
      const double half_ring = 0.5 * (hi * hi - lo * lo);
      auto ring_integral = [&](auto&& p) {
        auto weighted = [&](double x) { return x <= 0.0 ? 0.0 : p(x) * x; };
        return numerics::integrate(weighted, lo, hi, kRelTol, 1e-14).value;
      };
      AnnulusMetrics a;
      a.j = j;
      const double joint = ring_integral([&](double x) { return joint_success(m_, x, ctx); });
      a.p_joint_avg = joint / half_ring;
      if (with_components) {
        a.p_snr_avg = ring_integral([&](double x) { return connection_probability(m_, x); }) / half_ring;
        a.p_sir_avg = ring_integral([&](double x) { return sir_success_probability(m_, x, ctx); }) / half_ring;
      }
      a.success_integral = 2.0 * joint / r2;
      a.throughput = offered_traffic() * a.success_integral;
      a.delay = a.success_integral > 0.0 ? 1.0 / a.success_integral : kInfiniteDelay;
      a.energy_per_message = ctx.energy_j;
      a.energy_efficiency = 8.0 * m_.mac.payload_bytes / ctx.energy_j * a.success_integral;
      annuli_.push_back(a);
    }
  }

  const NetworkModel& model() const { return m_; }
  const std::vector<AnnulusMetrics>& annuli() const { return annuli_; }
  const std::vector<AnnulusContext>& contexts() const { return contexts_; }

  double offered_traffic() const { return m_.mac.duty_cycle * m_.n_bar; }

  double coverage() const {
    double s = 0.0;
    for (const auto& a : annuli_) s += a.success_integral;
    return std::clamp(s, 0.0, 1.0);
  }

  // Bits per joule averaged over the disk.
  double average_energy_efficiency() const {
    double s = 0.0;
    for (const auto& a : annuli_) s += a.energy_efficiency;
    return s;
  }

  double average_throughput() const {
    double s = 0.0;
    for (const auto& a : annuli_) s += a.throughput;
    return s;
  }

  double average_delay() const {
    double s = 0.0;
    for (const auto& a : annuli_) s += a.delay;
    return s;
  }

  // Per-distance energy efficiency (bits per joule) at d km.
  double energy_efficiency_at(double d_km) const {
    const auto a = mac::sf_for_distance(m_.alloc, d_km);
    const auto& ctx = contexts_.at(a.annulus - 1);
    return joint_success(m_, d_km, ctx) * 8.0 * m_.mac.payload_bytes / ctx.energy_j;
  }

 private:
  NetworkModel m_;
  std::vector<AnnulusContext> contexts_;
  std::vector<AnnulusMetrics> annuli_;
};

inline double coverage_probability(const NetworkModel& m) { return NetworkEvaluator(m).coverage(); }

struct EnergyEfficiency {
  std::function<double(double)> at_distance;
  double average = 0.0;
};

inline EnergyEfficiency energy_efficiency(const NetworkModel& m) {
  auto ev = std::make_shared<NetworkEvaluator>(m);
  return {[ev](double d_km) { return ev->energy_efficiency_at(d_km); }, ev->average_energy_efficiency()};
}

struct PerAnnulus {
  std::vector<double> per_annulus;
  double average = 0.0;
};

inline PerAnnulus throughput(const NetworkModel& m) {
  NetworkEvaluator ev(m);
  PerAnnulus out;
  for (const auto& a : ev.annuli()) out.per_annulus.push_back(a.throughput);
  out.average = ev.average_throughput();
  return out;
}

inline PerAnnulus delay(const NetworkModel& m) {
  NetworkEvaluator ev(m);
  PerAnnulus out;
  for (const auto& a : ev.annuli()) out.per_annulus.push_back(a.delay);
  out.average = ev.average_delay();
  return out;
}

}  // namespace lorawban::metrics
