#pragma once

// Log-distance path loss and Rayleigh-lognormal composite fading. The
// composite power beta = |h|^2 * H, |h|^2 ~ Exp(1), H = exp(N(0, sigma_H^2)),
// is approximated analytically by a gamma law with shape xi and scale delta.

#include <cmath>
#include <limits>

#include "lorawban/error.hpp"
#include "lorawban/numerics.hpp"
#include "lorawban/rng.hpp"
#include "lorawban/units.hpp"

namespace lorawban::channel {

struct PathLossModel {
  double pl_d0_db = 49.6;
  double exponent = 2.8;
  double d0_m = 1.0;

  void validate() const {
    if (!(exponent > 0.0) || !std::isfinite(exponent)) throw DomainError("path loss exponent must be > 0");
    if (!std::isfinite(pl_d0_db)) throw DomainError("reference path loss must be finite");
    if (!(d0_m > 0.0)) throw DomainError("reference distance must be > 0");
  }
};

// Linear power gain g(d) = 10^(-(PL(d0) + 10 n log10(d/d0)) / 10), d in meters.
inline double path_gain(const PathLossModel& model, double d_m) {
  model.validate();
  if (!(d_m > 0.0)) throw DomainError("path_gain: distance must be > 0");
  return std::pow(10.0, -(model.pl_d0_db + 10.0 * model.exponent * std::log10(d_m / model.d0_m)) / 10.0);
}

inline double log_path_gain(const PathLossModel& model, double d_m) {
  if (!(d_m > 0.0)) throw DomainError("log_path_gain: distance must be > 0");
  return -std::log(10.0) / 10.0 * (model.pl_d0_db + 10.0 * model.exponent * std::log10(d_m / model.d0_m));
}

// Distance at which the path gain equals g (inverse of path_gain).
inline double distance_for_gain(const PathLossModel& model, double g) {
  if (!(g > 0.0)) throw DomainError("distance_for_gain: gain must be > 0");
  return model.d0_m * std::pow(10.0, (-10.0 * std::log10(g) - model.pl_d0_db) / (10.0 * model.exponent));
}

struct FadingParams {
  double sigma_db = 0.0;
  double mu_h = 0.0;
  double sigma_h = 0.0;
  // Lognormal-only gamma fit; infinite when sigma_h = 0.
  double psi = std::numeric_limits<double>::infinity();
  double epsilon = 1.0;
  // Composite gamma fit.
  double xi = 1.0;
  double delta = 1.0;

  // log(Gamma(xi) delta^xi), the normalizer of the gamma density.
  double log_norm() const { return std::lgamma(xi) + xi * std::log(delta); }
};

inline FadingParams fading_params(double sigma_db) {
  if (!(sigma_db >= 0.0) || !std::isfinite(sigma_db)) throw DomainError("sigma_dB must be finite and >= 0");
  FadingParams p;
  p.sigma_db = sigma_db;
  p.mu_h = 0.0;
  p.sigma_h = std::log(10.0) / 10.0 * sigma_db;
  const double s2 = p.sigma_h * p.sigma_h;
  const double e = std::exp(s2);
  if (p.sigma_h > 0.0) {
    p.psi = 1.0 / std::expm1(s2);
    p.epsilon = std::exp(p.mu_h) * std::sqrt((p.psi + 1.0) / p.psi);
  }
  p.xi = 1.0 / (2.0 * e - 1.0);
  p.delta = (2.0 * e - 1.0) * std::exp(p.mu_h) * std::sqrt(e);
  return p;
}

inline double beta_log_pdf(const FadingParams& p, double z) {
  if (!(z >= 0.0)) throw DomainError("beta_pdf: z must be >= 0");
  if (z == 0.0) {
    if (p.xi < 1.0) return std::numeric_limits<double>::infinity();
    if (p.xi > 1.0) return -std::numeric_limits<double>::infinity();
    return -p.log_norm();
  }
  return (p.xi - 1.0) * std::log(z) - z / p.delta - p.log_norm();
}

// Gamma approximation to the composite density: z^(xi-1) e^(-z/delta) / (Gamma(xi) delta^xi).
inline double beta_pdf(const FadingParams& p, double z) { return std::exp(beta_log_pdf(p, z)); }

inline double beta_cdf(const FadingParams& p, double z) {
  if (!(z >= 0.0)) throw DomainError("beta_cdf: z must be >= 0");
  if (z == 0.0) return 0.0;
  return numerics::regularized_lower_gamma_log(p.xi, std::log(z) - std::log(p.delta));
}

// CDF with the argument supplied as log(z), for arguments below the double range.
inline double beta_cdf_log(const FadingParams& p, double log_z) {
  return numerics::regularized_lower_gamma_log(p.xi, log_z - std::log(p.delta));
}

// One draw of the exact composite |h|^2 * H (not the gamma approximation).
inline double sample_beta(const FadingParams& p, rng::Stream& rng) {
  const double rayleigh_power = rng.exponential();
  const double shadow = std::exp(p.mu_h + p.sigma_h * rng.normal());
  return rayleigh_power * shadow;
}

// Thermal noise floor -174 dBm/Hz + NF + 10 log10(B).
inline double noise_power_dbm(double bandwidth_hz, double noise_figure_db) {
  if (!(bandwidth_hz > 0.0)) throw DomainError("bandwidth must be > 0");
  return -174.0 + noise_figure_db + 10.0 * std::log10(bandwidth_hz);
}

struct LinkBudget {
  double tx_power_dbm = 14.0;
  double bandwidth_hz = 125e3;
  double noise_figure_db = 6.0;

  double noise_mw() const { return units::dbm_to_mw(noise_power_dbm(bandwidth_hz, noise_figure_db)); }
};

// Average SNR P_tx g(d) / N (linear).
inline double average_snr(const LinkBudget& link, const PathLossModel& pl, double d_m) {
  return units::dbm_to_mw(link.tx_power_dbm) * path_gain(pl, d_m) / link.noise_mw();
}

// Instantaneous SNR P_tx g(d) beta / N (linear).
inline double received_snr(const LinkBudget& link, const PathLossModel& pl, double d_m, double beta) {
  if (!(beta >= 0.0)) throw DomainError("received_snr: channel power must be >= 0");
  return average_snr(link, pl, d_m) * beta;
}

}  // namespace lorawban::channel
