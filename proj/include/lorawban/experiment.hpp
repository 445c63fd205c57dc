#pragma once

// Sweeps and plot-ready tables for the command-line runner.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "lorawban/bep.hpp"
#include "lorawban/channel.hpp"
#include "lorawban/config.hpp"
#include "lorawban/error.hpp"
#include "lorawban/mac.hpp"
#include "lorawban/metrics.hpp"
#include "lorawban/montecarlo.hpp"
#include "lorawban/units.hpp"

namespace lorawban::experiment {

using Cell = std::variant<double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw ShapeError("table row width does not match the header");
    rows.push_back(std::move(row));
  }
};

// Nine significant digits; unbounded values print as "inf".
inline std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

inline std::string format_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  return std::get<std::string>(c);
}

inline std::string to_csv(const Table& t) {
  std::ostringstream out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_cell(row[i]);
    out << '\n';
  }
  return out.str();
}

// Numbers carry the same nine-digit rounding as the CSV form.
inline nlohmann::json to_json(const Table& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      const auto text = format_cell(row[i]);
      if (const auto* d = std::get_if<double>(&row[i]); d && std::isfinite(*d))
        obj[t.columns[i]] = std::stod(text);
      else
        obj[t.columns[i]] = text;
    }
    rows.push_back(std::move(obj));
  }
  return {{"columns", t.columns}, {"rows", rows}};
}

enum class Format { kCsv, kJson };

inline std::string render(const Table& t, Format f) {
  return f == Format::kCsv ? to_csv(t) : to_json(t).dump(2) + "\n";
}

struct Sweep {
  std::string var;
  double start = 0.0;
  double stop = 0.0;
  int points = 2;
  bool log = false;

  std::vector<double> values() const {
    std::vector<double> v(points);
    for (int i = 0; i < points; ++i) {
      const double f = static_cast<double>(i) / (points - 1);
      v[i] = log ? start * std::pow(stop / start, f) : start + (stop - start) * f;
    }
    v.back() = stop;
    return v;
  }
};

inline const std::vector<std::string>& sweep_variables() {
  static const std::vector<std::string> vars = {"snr_db", "n_bar", "radius_km", "sigma_db", "sir_db"};
  return vars;
}

// VAR:START:STOP:POINTS[:log]
inline Sweep parse_sweep(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() < 4 || parts.size() > 5)
    throw ConfigError("sweep", "sweep must look like VAR:START:STOP:POINTS[:log], got '" + text + "'");
  Sweep s;
  s.var = parts[0];
  bool known = false;
  for (const auto& v : sweep_variables()) known = known || v == s.var;
  if (!known) throw ConfigError("sweep", "unknown sweep variable '" + s.var + "'");
  s.start = config::detail::parse_double("sweep", parts[1]);
  s.stop = config::detail::parse_double("sweep", parts[2]);
  const auto pts = config::detail::parse_int("sweep", parts[3]);
  if (pts < 2) throw ConfigError("sweep", "a sweep needs at least 2 points");
  if (pts > 100000) throw ConfigError("sweep", "sweep point count is unreasonably large");
  s.points = static_cast<int>(pts);
  if (parts.size() == 5) {
    if (parts[4] != "log" && parts[4] != "lin") throw ConfigError("sweep", "sweep spacing must be 'log' or 'lin'");
    s.log = parts[4] == "log";
    if (s.log && !(s.start > 0.0 && s.stop > 0.0))
      throw ConfigError("sweep", "log-spaced sweeps need positive endpoints");
  }
  return s;
}

// Distinct reproducible seed per table row.
inline std::uint64_t row_seed(std::uint64_t seed, std::uint64_t row) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (row + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct RunOptions {
  std::uint64_t seed = 1;
  std::uint64_t trials = 20000;
  bool validate = false;
  unsigned workers = 0;
};

inline void require_var(const Sweep& s, std::initializer_list<const char*> allowed, const std::string& command) {
  for (const char* a : allowed)
    if (s.var == a) return;
  throw ConfigError("sweep", "command '" + command + "' cannot sweep '" + s.var + "'");
}

inline Sweep default_bep_sweep() { return {"snr_db", -15.0, 10.0, 11, false}; }
inline Sweep default_network_sweep() { return {"radius_km", 0.5, 8.0, 16, false}; }

// Rows (sf, sweep value, analytic BEP without / with interference, simulated BEP, stderr).
inline Table run_bep_curve(const config::ExperimentConfig& cfg, const Sweep& sweep, const RunOptions& opt) {
  require_var(sweep, {"snr_db", "sigma_db", "sir_db"}, "bep-curve");
  Table t;
  t.columns = {"sf", sweep.var, "bep_analytic_no_interf", "bep_analytic_interf", "bep_sim", "sim_stderr"};
  std::uint64_t row = 0;
  for (int sf : cfg.sfs) {
    for (double x : sweep.values()) {
      double snr_db = cfg.snr_db;
      double sigma_db = cfg.sigma_db;
      double sir_db = cfg.sir_db;
      if (sweep.var == "snr_db") snr_db = x;
      if (sweep.var == "sigma_db") sigma_db = x;
      if (sweep.var == "sir_db") sir_db = x;
      if (sigma_db < 0.0) throw ConfigError("sweep", "sigma_db must stay >= 0 across the sweep");
      bep::BepInputs in{sf, units::db_to_linear(snr_db), units::db_to_linear(sir_db), channel::fading_params(sigma_db),
                        cfg.quad_order};
      const double no_int = bep::bep(in, false);
      const double with_int = bep::bep(in, true);
      montecarlo::BepPlan plan;
      plan.seed = row_seed(opt.seed, row++);
      plan.trials = opt.trials;
      plan.sf = sf;
      plan.avg_snr = in.avg_snr;
      plan.sir = in.sir;
      plan.fading = in.fading;
      plan.with_interference = true;
      plan.workers = opt.workers;
      const auto rep = montecarlo::run_bep_trials(plan);
      t.add_row({static_cast<double>(sf), x, no_int, with_int, rep.estimate, rep.stderr_});
    }
  }
  return t;
}

enum class NetworkCommand { kCoverage, kEnergy, kThroughput, kDelay };

inline std::string per_annulus_prefix(NetworkCommand c) {
  switch (c) {
    case NetworkCommand::kCoverage: return "p_joint_";
    case NetworkCommand::kEnergy: return "energy_msg_";
    case NetworkCommand::kThroughput: return "ct_";
    case NetworkCommand::kDelay: return "delay_";
  }
  return "x_";
}

// Rows keyed by (protocol, scheme, sweep value): disk averages, six
// per-annulus values for the command, and simulated coverage on request.
inline Table run_network_sweep(const config::ExperimentConfig& cfg, NetworkCommand command, const Sweep& sweep,
                               const RunOptions& opt) {
  require_var(sweep, {"n_bar", "radius_km", "sigma_db"}, "network sweep");
  Table t;
  t.columns = {"protocol", "scheme", sweep.var, "coverage", "avg_ee", "avg_throughput", "avg_delay"};
  for (int j = 1; j <= mac::kAnnuli; ++j) t.columns.push_back(per_annulus_prefix(command) + std::to_string(j));
  if (opt.validate) {
    t.columns.push_back("coverage_sim");
    t.columns.push_back("coverage_sim_stderr");
  }
  std::uint64_t row = 0;
  for (auto protocol : cfg.protocols) {
    for (auto scheme : cfg.schemes) {
      for (double x : sweep.values()) {
        auto c = cfg;
        if (sweep.var == "n_bar") c.n_bar = x;
        if (sweep.var == "radius_km") c.radius_km = x;
        if (sweep.var == "sigma_db") c.sigma_db = x;
        if (c.n_bar < 0.0 || !(c.radius_km > 0.0) || c.sigma_db < 0.0)
          throw ConfigError("sweep", "sweep leaves the valid range of '" + sweep.var + "'");
        const auto model = c.network(protocol, scheme);
        const metrics::NetworkEvaluator ev(model);
        std::vector<Cell> cells = {mac::to_string(protocol), mac::to_string(scheme), x, ev.coverage(),
                                   ev.average_energy_efficiency(), ev.average_throughput(), ev.average_delay()};
        for (const auto& a : ev.annuli()) {
          switch (command) {
            case NetworkCommand::kCoverage: cells.emplace_back(a.p_joint_avg); break;
            case NetworkCommand::kEnergy: cells.emplace_back(a.energy_per_message); break;
            case NetworkCommand::kThroughput: cells.emplace_back(a.throughput); break;
            case NetworkCommand::kDelay: cells.emplace_back(a.delay); break;
          }
        }
        if (opt.validate) {
          montecarlo::CoveragePlan plan;
          plan.seed = row_seed(opt.seed, row);
          plan.trials = opt.trials;
          plan.model = model;
          plan.workers = opt.workers;
          const auto rep = montecarlo::run_coverage_trials(plan);
          cells.emplace_back(rep.estimate);
          cells.emplace_back(rep.stderr_);
        }
        ++row;
        t.add_row(std::move(cells));
      }
    }
  }
  return t;
}

}  // namespace lorawban::experiment
