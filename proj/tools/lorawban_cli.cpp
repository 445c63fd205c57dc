// lorawban: experiment runner emitting plot-ready CSV/JSON tables.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lorawban/lorawban.hpp"

namespace {

using namespace lorawban;

constexpr int kExitOk = 0;
constexpr int kExitCriterion = 1;
constexpr int kExitConfig = 2;

struct Args {
  std::string config_path;
  std::string sweep;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::string out;
  std::string format = "csv";
  bool validate = false;
  std::vector<int> criteria;
};

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  const std::filesystem::path path(out);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("out", "cannot write output file '" + out + "'");
  f << text;
}

experiment::Format parse_format(const std::string& s) {
  if (s == "csv") return experiment::Format::kCsv;
  if (s == "json") return experiment::Format::kJson;
  throw ConfigError("format", "format must be csv or json, got '" + s + "'");
}

config::ExperimentConfig load_config(const Args& a) {
  auto cfg = a.config_path.empty() ? config::ExperimentConfig{} : config::load(a.config_path);
  if (a.seed) cfg.seed = *a.seed;
  if (a.trials) {
    if (*a.trials < 1) throw ConfigError("trials", "trials must be >= 1");
    cfg.trials = *a.trials;
  }
  return cfg;
}

experiment::RunOptions run_options(const config::ExperimentConfig& cfg, const Args& a) {
  experiment::RunOptions opt;
  opt.seed = cfg.seed;
  opt.trials = cfg.trials;
  opt.validate = a.validate;
  return opt;
}

int run_bep(const Args& a) {
  const auto cfg = load_config(a);
  const auto fmt = parse_format(a.format);
  const auto sweep = a.sweep.empty() ? experiment::default_bep_sweep() : experiment::parse_sweep(a.sweep);
  emit(experiment::render(experiment::run_bep_curve(cfg, sweep, run_options(cfg, a)), fmt), a.out);
  return kExitOk;
}

int run_network(const Args& a, experiment::NetworkCommand command) {
  const auto cfg = load_config(a);
  const auto fmt = parse_format(a.format);
  const auto sweep = a.sweep.empty() ? experiment::default_network_sweep() : experiment::parse_sweep(a.sweep);
  emit(experiment::render(experiment::run_network_sweep(cfg, command, sweep, run_options(cfg, a)), fmt), a.out);
  return kExitOk;
}

int run_validate(const Args& a) {
  const auto cfg = load_config(a);
  const auto fmt = parse_format(a.format);
  auto opt = acceptance::Options::from_config(cfg);
  if (a.trials) {
    opt.bep_trials = *a.trials;
    opt.coverage_trials = *a.trials;
  }
  std::vector<int> ids = a.criteria;
  if (ids.empty())
    for (int i = 1; i <= acceptance::kCriteria; ++i) ids.push_back(i);
  std::vector<acceptance::CriterionResult> results;
  bool all = true;
  for (int id : ids) {
    if (id < 1 || id > acceptance::kCriteria) throw ConfigError("criteria", "no criterion " + std::to_string(id));
    results.push_back(acceptance::run(id, opt));
    const auto& r = results.back();
    std::cerr << "C" << r.id << " " << r.name << ": " << (r.pass ? "PASS" : "FAIL") << "\n";
    all = all && r.pass;
  }
  emit(experiment::render(acceptance::report_table(results), fmt), a.out);
  return all ? kExitOk : kExitCriterion;
}

void add_common(CLI::App* cmd, Args& a, bool sweep) {
  cmd->add_option("--config", a.config_path, "Configuration file (INI-style sections)");
  if (sweep) cmd->add_option("--sweep", a.sweep, "VAR:START:STOP:POINTS[:log]");
  cmd->add_option("--seed", a.seed, "Base RNG seed");
  cmd->add_option("--trials", a.trials, "Monte-Carlo trials per point");
  cmd->add_option("--out", a.out, "Output file (stdout when omitted)");
  cmd->add_option("--format", a.format, "csv or json");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LoRa WBAN link and network performance model"};
  app.require_subcommand(1);
  Args args;

  auto* bep_cmd = app.add_subcommand("bep-curve", "Analytic and simulated BEP curves");
  add_common(bep_cmd, args, true);
  std::vector<std::pair<CLI::App*, experiment::NetworkCommand>> network_cmds = {
      {app.add_subcommand("coverage", "Coverage probability"), experiment::NetworkCommand::kCoverage},
      {app.add_subcommand("energy", "Energy efficiency"), experiment::NetworkCommand::kEnergy},
      {app.add_subcommand("throughput", "Throughput"), experiment::NetworkCommand::kThroughput},
      {app.add_subcommand("delay", "Average delay"), experiment::NetworkCommand::kDelay},
  };
  for (auto& [cmd, _] : network_cmds) {
    add_common(cmd, args, true);
    cmd->add_flag("--validate", args.validate, "Add simulated coverage columns");
  }
  auto* validate_cmd = app.add_subcommand("validate", "Run the acceptance criteria");
  add_common(validate_cmd, args, false);
  validate_cmd->add_option("--criteria", args.criteria, "Subset of criterion numbers")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (bep_cmd->parsed()) return run_bep(args);
    for (auto& [cmd, kind] : network_cmds)
      if (cmd->parsed()) return run_network(args, kind);
    if (validate_cmd->parsed()) return run_validate(args);
  } catch (const ConfigError& e) {
    std::cerr << "config error [" << e.key() << "]: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
