#pragma once

// SF allocation geometry, LoRa time on air, per-protocol interferer
// intensities and per-message energy for pure ALOHA, slotted ALOHA and
// non-persistent CSMA. Geometry is in km; path gains take meters.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "lorawban/channel.hpp"
#include "lorawban/error.hpp"
#include "lorawban/numerics.hpp"
#include "lorawban/phy.hpp"
#include "lorawban/units.hpp"

namespace lorawban::mac {

enum class Scheme { kEib, kEab };
enum class Protocol { kPureAloha, kSlottedAloha, kNpCsma };

inline constexpr int kAnnuli = phy::kMaxSf - phy::kMinSf + 1;

// Demodulation SNR thresholds (dB) for SF7..SF12.
inline constexpr std::array<double, kAnnuli> kSnrThresholdDb = {-6.0, -9.0, -12.0, -15.0, -17.5, -20.0};

inline std::string to_string(Scheme s) { return s == Scheme::kEib ? "EIB" : "EAB"; }

inline std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::kPureAloha: return "P-ALOHA";
    case Protocol::kSlottedAloha: return "S-ALOHA";
    case Protocol::kNpCsma: return "NP-CSMA";
  }
  return "?";
}

inline Scheme parse_scheme(std::string_view s) {
  if (s == "EIB" || s == "eib") return Scheme::kEib;
  if (s == "EAB" || s == "eab") return Scheme::kEab;
  throw DomainError("unknown allocation scheme '" + std::string(s) + "'");
}

inline Protocol parse_protocol(std::string_view s) {
  if (s == "P-ALOHA" || s == "p-aloha" || s == "aloha") return Protocol::kPureAloha;
  if (s == "S-ALOHA" || s == "s-aloha" || s == "slotted") return Protocol::kSlottedAloha;
  if (s == "NP-CSMA" || s == "np-csma" || s == "csma") return Protocol::kNpCsma;
  throw DomainError("unknown protocol '" + std::string(s) + "'");
}

inline constexpr std::array<Protocol, 3> kAllProtocols = {Protocol::kPureAloha, Protocol::kSlottedAloha,
                                                          Protocol::kNpCsma};
inline constexpr std::array<Scheme, 2> kAllSchemes = {Scheme::kEib, Scheme::kEab};

// Annuli are numbered 1..k; annulus j spans [boundaries[j-1], boundaries[j]).
struct SfAllocation {
  Scheme scheme = Scheme::kEib;
  double radius_km = 1.0;
  int k = kAnnuli;
  std::vector<double> boundaries_km;
  std::vector<int> sf;
  std::vector<double> snr_threshold_db;

  double inner_km(int j) const { return boundaries_km.at(j - 1); }
  double outer_km(int j) const { return boundaries_km.at(j); }
  double area_km2(int j) const {
    const double lo = inner_km(j);
    const double hi = outer_km(j);
    return numerics::kPi * (hi * hi - lo * lo);
  }
  int sf_of(int j) const { return sf.at(j - 1); }
  double threshold_db(int j) const { return snr_threshold_db.at(j - 1); }
};

inline SfAllocation build_allocation(Scheme scheme, double radius_km, int k = kAnnuli) {
  if (!(radius_km > 0.0) || !std::isfinite(radius_km)) throw DomainError("radius must be > 0");
  if (k != kAnnuli) throw ConfigError("annuli", "annulus count must equal the number of SFs (6)");
  SfAllocation a;
  a.scheme = scheme;
  a.radius_km = radius_km;
  a.k = k;
  a.boundaries_km.resize(k + 1);
  for (int j = 0; j <= k; ++j) {
    const double frac = static_cast<double>(j) / k;
    a.boundaries_km[j] = scheme == Scheme::kEib ? radius_km * frac : radius_km * std::sqrt(frac);
  }
  a.boundaries_km[k] = radius_km;
  for (int j = 1; j <= k; ++j) {
    a.sf.push_back(phy::kMinSf + j - 1);
    a.snr_threshold_db.push_back(kSnrThresholdDb[j - 1]);
  }
  return a;
}

struct SfAssignment {
  int sf;
  int annulus;
  double snr_threshold_db;
};

// Half-open annuli; d = R belongs to the outermost one.
inline SfAssignment sf_for_distance(const SfAllocation& alloc, double d_km) {
  if (!(d_km >= 0.0) || d_km > alloc.radius_km) throw DomainError("distance outside the network disk");
  int j = alloc.k;
  for (int i = 1; i <= alloc.k; ++i) {
    if (d_km < alloc.boundaries_km[i]) {
      j = i;
      break;
    }
  }
  return {alloc.sf_of(j), j, alloc.threshold_db(j)};
}

struct MacConfig {
  double bandwidth_hz = 125e3;
  double duty_cycle = 0.0033;
  int payload_bytes = 10;
  int preamble_symbols = 8;
  int crc_bits = 16;
  int header_bits = 20;
  int coding_rate = 4;
  double guard_s = 10.24e-3;
  double sync_interval_s = 128.0;
  double beacon_s = 0.152576;
  int cad_symbols = 2;
  double detection_threshold_dbm = -150.0;
  double csma_p = 0.01;
  // Negative selects 1% of the time on air of the SF in question.
  double sigma_te_s = -1.0;
  double tx_power_dbm = 14.0;
  double rx_power_mw = 15.18;

  void validate() const {
    if (!(bandwidth_hz > 0.0)) throw ConfigError("bandwidth_hz", "bandwidth must be > 0");
    if (!(duty_cycle > 0.0 && duty_cycle <= 1.0)) throw ConfigError("duty_cycle", "duty cycle must lie in (0, 1]");
    if (payload_bytes < 0) throw ConfigError("payload_bytes", "payload must be >= 0 bytes");
    if (preamble_symbols < 0) throw ConfigError("preamble_symbols", "preamble must be >= 0 symbols");
    if (crc_bits != 0 && crc_bits != 16) throw ConfigError("crc", "CRC length must be 0 or 16 bits");
    if (header_bits != 0 && header_bits != 20) throw ConfigError("header", "header length must be 0 or 20 bits");
    if (coding_rate < 1 || coding_rate > 4) throw ConfigError("coding_rate", "coding rate index must be 1..4");
    if (!(guard_s >= 0.0)) throw ConfigError("guard_ms", "guard interval must be >= 0");
    if (!(sync_interval_s > 0.0)) throw ConfigError("sync_interval_s", "sync interval must be > 0");
    if (!(beacon_s >= 0.0)) throw ConfigError("beacon_preamble", "beacon duration must be >= 0");
    if (cad_symbols < 0) throw ConfigError("cad_symbols", "CAD duration must be >= 0 symbols");
    if (!(csma_p > duty_cycle && csma_p <= 1.0))
      throw ConfigError("csma_p", "CSMA access probability must exceed the duty cycle and be <= 1");
    if (!(rx_power_mw >= 0.0)) throw ConfigError("rx_power_mw", "receive power must be >= 0");
    if (std::isnan(sigma_te_s)) throw ConfigError("sigma_te_s", "packet-length deviation must be a number");
  }
};

inline double symbol_time(int sf, double bandwidth_hz) {
  phy::require_sf(sf);
  return phy::chips_per_symbol(sf) / bandwidth_hz;
}

// Number of payload symbols of the frame (header and CRC included).
inline int payload_symbols(int sf, const MacConfig& cfg) {
  const int num = 8 * cfg.payload_bytes + cfg.crc_bits - 4 * sf + 8 + cfg.header_bits;
  const int den = 4 * (sf - 2);
  const int blocks = num <= 0 ? 0 : (num + den - 1) / den;
  return blocks * (cfg.coding_rate + 4);
}

// Frame airtime T_s (N_sp + 4.25 + 8 + payload symbols).
inline double time_on_air(int sf, const MacConfig& cfg, double bandwidth_hz) {
  phy::require_sf(sf);
  if (!(bandwidth_hz > 0.0)) throw DomainError("bandwidth must be > 0");
  const double ts = symbol_time(sf, bandwidth_hz);
  return ts * (cfg.preamble_symbols + 4.25 + 8.0 + payload_symbols(sf, cfg));
}

inline double time_on_air(int sf, const MacConfig& cfg) { return time_on_air(sf, cfg, cfg.bandwidth_hz); }

inline double preamble_time(int sf, const MacConfig& cfg) {
  return (cfg.preamble_symbols + 4.25) * symbol_time(sf, cfg.bandwidth_hz);
}

inline double sigma_te(int sf, const MacConfig& cfg) {
  return cfg.sigma_te_s >= 0.0 ? cfg.sigma_te_s : 0.01 * time_on_air(sf, cfg);
}

// (1 - e^-x) / x with its limit 1 at x = 0.
inline double poisson_idle_ratio(double x) {
  if (x == 0.0) return 1.0;
  return -std::expm1(-x) / x;
}

// Two-point distance density for points uniform in a disk of radius r.
inline double disk_distance_pdf(double x, double r) {
  if (!(r > 0.0)) throw DomainError("disk radius must be > 0");
  if (x < 0.0 || x > 2.0 * r) return 0.0;
  const double h = x / (2.0 * r);
  return 4.0 * x / (numerics::kPi * r * r) * (std::acos(h) - h * std::sqrt(std::max(0.0, 1.0 - h * h)));
}

struct ChannelContext {
  channel::PathLossModel pathloss{};
  channel::FadingParams fading{};
};

// Fraction of annulus-j contenders whose signal clears the detection
// threshold: int_0^{2 l_j} [1 - F_beta(P0 / (P_tx g(x)))] f(x) dx.
inline double csma_hidden_fraction(const SfAllocation& alloc, int j, const MacConfig& cfg,
                                   const ChannelContext& ch) {
  if (j < 1 || j > alloc.k) throw DomainError("annulus index out of range");
  const double r_m = units::km_to_m(alloc.outer_km(j));
  const double log_ratio0 = std::log(units::dbm_to_mw(cfg.detection_threshold_dbm)) -
                            std::log(units::dbm_to_mw(cfg.tx_power_dbm));
  if (log_ratio0 == -std::numeric_limits<double>::infinity()) return 1.0;
  auto integrand = [&](double x) {
    if (x <= 0.0) return 0.0;
    const double detected = 1.0 - channel::beta_cdf_log(ch.fading, log_ratio0 - channel::log_path_gain(ch.pathloss, x));
    return detected * disk_distance_pdf(x, r_m);
  };
  // Split where the detection probability changes fastest (log-spaced).
  double total = 0.0;
  double lo = 0.0;
  for (double edge = 1.0; lo < 2.0 * r_m; edge *= 10.0) {
    const double hi = std::min(edge, 2.0 * r_m);
    total += numerics::integrate(integrand, lo, hi, 1e-8, 1e-14).value;
    lo = hi;
  }
  return std::clamp(total, 0.0, 1.0);
}

// Expected number of active contenders sensed in annulus j.
inline double expected_active_neighbours(double lambda_km2, const SfAllocation& alloc, int j, const MacConfig& cfg,
                                         double hidden_fraction) {
  return lambda_km2 * cfg.csma_p * alloc.area_km2(j) * hidden_fraction;
}

struct ProtocolIntensity {
  Protocol protocol;
  double lambda_u;
};

// Collision probability term of slotted ALOHA, 1 + two Q tails.
inline double slotted_collision_factor(int sf, const MacConfig& cfg) {
  const double ts = symbol_time(sf, cfg.bandwidth_hz);
  const double tp = preamble_time(sf, cfg);
  const double s = std::sqrt(2.0) * sigma_te(sf, cfg);
  auto tail = [s](double x) {
    if (s == 0.0) return x > 0.0 ? 0.0 : (x < 0.0 ? 1.0 : 0.5);
    return numerics::q_function(x / s);
  };
  return 1.0 + tail(cfg.guard_s + tp - 5.0 * ts) + tail(cfg.guard_s);
}

// Interferer intensity with the CSMA detection fraction supplied by the caller.
inline ProtocolIntensity interferer_intensity(Protocol protocol, double lambda_km2, int sf, const MacConfig& cfg,
                                              const SfAllocation& alloc, int j, double hidden_fraction) {
  if (!(lambda_km2 >= 0.0)) throw DomainError("intensity must be >= 0");
  const double to = time_on_air(sf, cfg);
  switch (protocol) {
    case Protocol::kPureAloha:
      return {protocol, 2.0 * cfg.duty_cycle * lambda_km2};
    case Protocol::kSlottedAloha:
      return {protocol, (1.0 + cfg.guard_s / to) * slotted_collision_factor(sf, cfg) * cfg.duty_cycle * lambda_km2};
    case Protocol::kNpCsma: {
      const double ts = symbol_time(sf, cfg.bandwidth_hz);
      const double reduction = (preamble_time(sf, cfg) - 5.0 * ts) / to;
      const double e_na = expected_active_neighbours(lambda_km2, alloc, j, cfg, hidden_fraction);
      return {protocol, (2.0 - reduction) * (1.0 - hidden_fraction) * poisson_idle_ratio(e_na) * cfg.csma_p *
                            lambda_km2};
    }
  }
  throw DomainError("unknown protocol");
}

inline ProtocolIntensity interferer_intensity(Protocol protocol, double lambda_km2, int sf, const MacConfig& cfg,
                                              const SfAllocation& alloc, int j, const ChannelContext& ch) {
  const double xi = protocol == Protocol::kNpCsma ? csma_hidden_fraction(alloc, j, cfg, ch) : 0.0;
  return interferer_intensity(protocol, lambda_km2, sf, cfg, alloc, j, xi);
}

// Energy (J) spent per message by a device in annulus j.
inline double energy_per_message(Protocol protocol, int sf, const MacConfig& cfg, const SfAllocation& alloc, int j,
                                 double lambda_km2, double hidden_fraction) {
  const double to = time_on_air(sf, cfg);
  const double ptx = units::dbm_to_watts(cfg.tx_power_dbm);
  const double prx = units::mw_to_watts(cfg.rx_power_mw);
  switch (protocol) {
    case Protocol::kPureAloha:
      return ptx * to;
    case Protocol::kSlottedAloha:
      return ptx * to + prx * cfg.beacon_s * (to / (cfg.duty_cycle * cfg.sync_interval_s));
    case Protocol::kNpCsma: {
      const double t_cad = cfg.cad_symbols * symbol_time(sf, cfg.bandwidth_hz);
      const double e_na = expected_active_neighbours(lambda_km2, alloc, j, cfg, hidden_fraction);
      return ptx * to + prx * t_cad / poisson_idle_ratio(e_na);
    }
  }
  throw DomainError("unknown protocol");
}

inline double energy_per_message(Protocol protocol, int sf, const MacConfig& cfg, const SfAllocation& alloc, int j,
                                 double lambda_km2, const ChannelContext& ch) {
  const double xi = protocol == Protocol::kNpCsma ? csma_hidden_fraction(alloc, j, cfg, ch) : 0.0;
  return energy_per_message(protocol, sf, cfg, alloc, j, lambda_km2, xi);
}

}  // namespace lorawban::mac
