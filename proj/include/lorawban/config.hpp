#pragma once

// Experiment configuration: a flat "key = value" file split into [sections].
// Unknown sections or keys are errors. '#' and ';' start comments.
//
//   [bep]
//   sf = 7, 9, 11
//
//   [channel]
//   sigma_db = 8
//
// Every key has a default, so an empty file is a valid configuration.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lorawban/channel.hpp"
#include "lorawban/error.hpp"
#include "lorawban/mac.hpp"
#include "lorawban/metrics.hpp"
#include "lorawban/phy.hpp"

namespace lorawban::config {

struct ExperimentConfig {
  // [bep]
  std::vector<int> sfs = {7, 9, 11};
  double snr_db = 5.0;
  double sir_db = 6.0;
  int quad_order = 20;

  // [channel]
  double sigma_db = 8.0;
  channel::PathLossModel pathloss{};
  double noise_figure_db = 6.0;

  // [mac]
  mac::MacConfig mac{};

  // [network]
  std::vector<mac::Scheme> schemes = {mac::Scheme::kEib, mac::Scheme::kEab};
  std::vector<mac::Protocol> protocols = {mac::Protocol::kPureAloha, mac::Protocol::kSlottedAloha,
                                          mac::Protocol::kNpCsma};
  double radius_km = 1.0;
  double n_bar = 3000.0;
  double sir_threshold_db = 1.0;

  // [montecarlo]
  std::uint64_t seed = 1;
  std::uint64_t trials = 20000;

  // [validate]
  std::uint64_t bep_trials = 100000;
  std::uint64_t coverage_trials = 100000;
  std::uint64_t ks_samples = 1000000;
  double sim_abs_tol = -1.0;  // negative keeps each criterion's own tolerance
  double z_mult = 4.0;

  metrics::NetworkModel network(mac::Protocol protocol, mac::Scheme scheme) const {
    auto m = metrics::make_network(protocol, scheme, radius_km, n_bar, sigma_db, mac, pathloss);
    m.noise_figure_db = noise_figure_db;
    m.sir_threshold_db = sir_threshold_db;
    return m;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(out))
    throw ConfigError(key, "invalid number '" + v + "' for key '" + key + "'");
  return out;
}

inline std::int64_t parse_int(const std::string& key, const std::string& v) {
  std::int64_t out = 0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end)
    throw ConfigError(key, "invalid integer '" + v + "' for key '" + key + "'");
  return out;
}

inline std::uint64_t parse_count(const std::string& key, const std::string& v) {
  const auto n = parse_int(key, v);
  if (n < 1) throw ConfigError(key, "key '" + key + "' must be a positive integer");
  return static_cast<std::uint64_t>(n);
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "yes" || v == "1") return true;
  if (v == "off" || v == "false" || v == "no" || v == "0") return false;
  throw ConfigError(key, "invalid switch '" + v + "' for key '" + key + "' (use on/off)");
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string& value)>;

inline const std::map<std::string, Setter>& setters() {
  using C = ExperimentConfig;
  using S = const std::string&;
  static const std::map<std::string, Setter> table = {
      {"bep.sf",
       [](C& c, S k, S v) {
         c.sfs.clear();
         for (const auto& item : split_list(v)) {
           const auto sf = parse_int(k, item);
           if (!phy::valid_sf(static_cast<int>(sf))) throw ConfigError(k, "spreading factor out of range in '" + k + "'");
           c.sfs.push_back(static_cast<int>(sf));
         }
         if (c.sfs.empty()) throw ConfigError(k, "key '" + k + "' needs at least one spreading factor");
       }},
      {"bep.snr_db", [](C& c, S k, S v) { c.snr_db = parse_double(k, v); }},
      {"bep.sir_db", [](C& c, S k, S v) { c.sir_db = parse_double(k, v); }},
      {"bep.quad_order",
       [](C& c, S k, S v) {
         const auto n = parse_int(k, v);
         if (n < 1 || n > 200) throw ConfigError(k, "key '" + k + "' must lie in 1..200");
         c.quad_order = static_cast<int>(n);
       }},
      {"channel.sigma_db",
       [](C& c, S k, S v) {
         c.sigma_db = parse_double(k, v);
         if (c.sigma_db < 0.0) throw ConfigError(k, "key '" + k + "' must be >= 0");
       }},
      {"channel.pathloss_db", [](C& c, S k, S v) { c.pathloss.pl_d0_db = parse_double(k, v); }},
      {"channel.pathloss_exponent",
       [](C& c, S k, S v) {
         c.pathloss.exponent = parse_double(k, v);
         if (!(c.pathloss.exponent > 0.0)) throw ConfigError(k, "key '" + k + "' must be > 0");
       }},
      {"channel.noise_figure_db", [](C& c, S k, S v) { c.noise_figure_db = parse_double(k, v); }},
      {"channel.bandwidth_hz", [](C& c, S k, S v) { c.mac.bandwidth_hz = parse_double(k, v); }},
      {"mac.scheme",
       [](C& c, S k, S v) {
         c.schemes.clear();
         for (const auto& item : split_list(v)) {
           try {
             c.schemes.push_back(mac::parse_scheme(item));
           } catch (const DomainError&) {
             throw ConfigError(k, "unknown scheme '" + item + "' in '" + k + "'");
           }
         }
         if (c.schemes.empty()) throw ConfigError(k, "key '" + k + "' needs at least one scheme");
       }},
      {"mac.protocol",
       [](C& c, S k, S v) {
         c.protocols.clear();
         for (const auto& item : split_list(v)) {
           try {
             c.protocols.push_back(mac::parse_protocol(item));
           } catch (const DomainError&) {
             throw ConfigError(k, "unknown protocol '" + item + "' in '" + k + "'");
           }
         }
         if (c.protocols.empty()) throw ConfigError(k, "key '" + k + "' needs at least one protocol");
       }},
      {"mac.radius_km",
       [](C& c, S k, S v) {
         c.radius_km = parse_double(k, v);
         if (!(c.radius_km > 0.0)) throw ConfigError(k, "key '" + k + "' must be > 0");
       }},
      {"mac.duty_cycle", [](C& c, S k, S v) { c.mac.duty_cycle = parse_double(k, v); }},
      {"mac.payload_bytes", [](C& c, S k, S v) { c.mac.payload_bytes = static_cast<int>(parse_int(k, v)); }},
      {"mac.preamble_symbols", [](C& c, S k, S v) { c.mac.preamble_symbols = static_cast<int>(parse_int(k, v)); }},
      {"mac.crc", [](C& c, S k, S v) { c.mac.crc_bits = parse_bool(k, v) ? 16 : 0; }},
      {"mac.header", [](C& c, S k, S v) { c.mac.header_bits = parse_bool(k, v) ? 20 : 0; }},
      {"mac.coding_rate", [](C& c, S k, S v) { c.mac.coding_rate = static_cast<int>(parse_int(k, v)); }},
      {"mac.guard_ms", [](C& c, S k, S v) { c.mac.guard_s = parse_double(k, v) * 1e-3; }},
      {"mac.sync_interval_s", [](C& c, S k, S v) { c.mac.sync_interval_s = parse_double(k, v); }},
      {"mac.beacon_preamble", [](C& c, S k, S v) { c.mac.beacon_s = parse_double(k, v); }},
      {"mac.cad_symbols", [](C& c, S k, S v) { c.mac.cad_symbols = static_cast<int>(parse_int(k, v)); }},
      {"mac.detection_threshold_db", [](C& c, S k, S v) { c.mac.detection_threshold_dbm = parse_double(k, v); }},
      {"mac.csma_p", [](C& c, S k, S v) { c.mac.csma_p = parse_double(k, v); }},
      {"mac.sigma_te_s",
       [](C& c, S k, S v) {
         c.mac.sigma_te_s = parse_double(k, v);
         if (c.mac.sigma_te_s < 0.0) throw ConfigError(k, "key '" + k + "' must be >= 0");
       }},
      {"mac.tx_power_dbm", [](C& c, S k, S v) { c.mac.tx_power_dbm = parse_double(k, v); }},
      {"mac.rx_power_mw", [](C& c, S k, S v) { c.mac.rx_power_mw = parse_double(k, v); }},
      {"network.n_bar",
       [](C& c, S k, S v) {
         c.n_bar = parse_double(k, v);
         if (c.n_bar < 0.0) throw ConfigError(k, "key '" + k + "' must be >= 0");
       }},
      {"network.sir_threshold_db", [](C& c, S k, S v) { c.sir_threshold_db = parse_double(k, v); }},
      {"montecarlo.seed",
       [](C& c, S k, S v) {
         std::uint64_t out = 0;
         const auto* end = v.data() + v.size();
         const auto res = std::from_chars(v.data(), end, out);
         if (res.ec != std::errc() || res.ptr != end) throw ConfigError(k, "invalid seed '" + v + "'");
         c.seed = out;
       }},
      {"montecarlo.trials", [](C& c, S k, S v) { c.trials = parse_count(k, v); }},
      {"validate.bep_trials", [](C& c, S k, S v) { c.bep_trials = parse_count(k, v); }},
      {"validate.coverage_trials", [](C& c, S k, S v) { c.coverage_trials = parse_count(k, v); }},
      {"validate.ks_samples", [](C& c, S k, S v) { c.ks_samples = parse_count(k, v); }},
      {"validate.sim_abs_tol",
       [](C& c, S k, S v) {
         c.sim_abs_tol = parse_double(k, v);
         if (c.sim_abs_tol < 0.0) throw ConfigError(k, "key '" + k + "' must be >= 0");
       }},
      {"validate.z_mult",
       [](C& c, S k, S v) {
         c.z_mult = parse_double(k, v);
         if (c.z_mult < 0.0) throw ConfigError(k, "key '" + k + "' must be >= 0");
       }},
  };
  return table;
}

}  // namespace detail

// Names of every accepted "section.key".
inline std::vector<std::string> known_keys() {
  std::vector<std::string> out;
  for (const auto& [k, _] : detail::setters()) out.push_back(k);
  return out;
}

inline void apply(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  const auto& table = detail::setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError(key, "unknown configuration key '" + key + "'");
  it->second(cfg, key, value);
}

inline void check(const ExperimentConfig& cfg) {
  cfg.mac.validate();
  cfg.pathloss.validate();
}

inline ExperimentConfig parse(std::istream& in) {
  ExperimentConfig cfg;
  std::string section;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line, "malformed section header on line " + std::to_string(lineno));
      section = detail::trim(line.substr(1, line.size() - 2));
      bool known = false;
      for (const auto& k : known_keys())
        if (k.rfind(section + ".", 0) == 0) known = true;
      if (!known) throw ConfigError(section, "unknown configuration section '" + section + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value' on line " + std::to_string(lineno));
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(key, "key '" + key + "' appears before any [section]");
    apply(cfg, section + "." + key, value);
  }
  check(cfg);
  return cfg;
}

inline ExperimentConfig parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

inline ExperimentConfig load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open configuration file '" + path + "'");
  return parse(in);
}

}  // namespace lorawban::config
