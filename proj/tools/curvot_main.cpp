// Batch driver: loads scenario files, runs the verification suites, writes
// CSV reports and a summary table.

#include "curvot/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace curvot;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitScenarioInvalid = 3;

void write_atomic(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    f << content;
  }
  fs::rename(tmp, path);
}

struct CommonFlags {
  std::string out_dir = "out";
  double tol_override = 0.0;
  bool has_tol = false;
  int grid = 0;
  int particles = 0;
  bool csv = true;
  bool summary = true;
};

Overrides to_overrides(const CommonFlags& fl) {
  Overrides ov;
  if (fl.grid > 0) ov.grid = fl.grid;
  if (fl.particles > 0) ov.particles = fl.particles;
  if (fl.has_tol) ov.tol = fl.tol_override;
  return ov;
}

int run_command(const std::vector<std::string>& configs, const CommonFlags& fl) {
  int exit_code = kExitOk;
  for (const std::string& cfg_path : configs) {
    if (!fs::exists(cfg_path)) {
      std::cerr << "error: file not found: " << cfg_path << "\n";
      return kExitConfigError;
    }
    try {
      RawConfig raw = parse_config_file(cfg_path);
      ScenarioSpec spec = build_scenario(raw);
      RunOutcome out = run_scenario(spec, to_overrides(fl));
      if (fl.summary) std::cout << out.summary;
      if (fl.csv)
        write_atomic(fs::path(fl.out_dir) / (out.id + ".csv"), reports_csv(out.reports));
      if (!out.ok) exit_code = std::max(exit_code, kExitCheckFailed);
    } catch (const ConfigError& e) {
      std::cerr << "config error in " << cfg_path;
      if (e.line > 0) std::cerr << " (line " << e.line << ")";
      std::cerr << ": " << e.what() << "\n";
      return kExitConfigError;
    } catch (const PreconditionError& e) {
      std::cerr << "precondition failure in " << cfg_path << ": " << e.what() << "\n";
      exit_code = std::max(exit_code, kExitScenarioInvalid);
    } catch (const ScenarioInvalidError& e) {
      std::cerr << "invalid scenario in " << cfg_path << ": " << e.what() << "\n";
      exit_code = std::max(exit_code, kExitScenarioInvalid);
    } catch (const Error& e) {
      std::cerr << "error in " << cfg_path << ": " << e.what() << "\n";
      exit_code = std::max(exit_code, kExitScenarioInvalid);
    }
  }
  return exit_code;
}

int sweep_command(const std::string& cfg_path, const std::string& param,
                  const std::vector<double>& values, const CommonFlags& fl) {
  if (!fs::exists(cfg_path)) {
    std::cerr << "error: file not found: " << cfg_path << "\n";
    return kExitConfigError;
  }
  try {
    RawConfig raw = parse_config_file(cfg_path);
    ScenarioSpec spec = build_scenario(raw);

    std::string csv;
    bool all_ok = true;
    bool first = true;
    for (double v : values) {
      Overrides ov = to_overrides(fl);
      if (param == "particles")
        ov.particles = static_cast<int>(v);
      else if (param == "grid")
        ov.grid = static_cast<int>(v);
      else if (param == "times")
        ov.times = static_cast<int>(v);
      else if (param == "K")
        ov.K = v;
      else if (param == "pprime")
        ov.pprime = v;
      else if (param == "tol")
        ov.tol = v;
      else {
        std::cerr << "error: unknown sweep parameter '" << param << "'\n";
        return kExitConfigError;
      }
      RunOutcome out = run_scenario(spec, ov);
      if (fl.summary) {
        std::cout << "--- " << param << " = " << v << "\n";
        std::cout << out.summary;
      }
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.12g", v);
      std::string block = reports_csv(out.reports, param, buf);
      if (!first) block = block.substr(block.find('\n') + 1);  // drop repeated header
      csv += block;
      first = false;
      if (!out.ok) all_ok = false;
    }
    if (fl.csv)
      write_atomic(fs::path(fl.out_dir) / (spec.id + "_sweep_" + param + ".csv"), csv);
    return all_ok ? kExitOk : kExitCheckFailed;
  } catch (const ConfigError& e) {
    std::cerr << "config error in " << cfg_path << ": " << e.what() << "\n";
    return kExitConfigError;
  } catch (const Error& e) {
    std::cerr << "error in " << cfg_path << ": " << e.what() << "\n";
    return kExitScenarioInvalid;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curvature-bound verification via optimal-transport interpolation"};
  app.require_subcommand(1);

  CommonFlags fl;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", fl.out_dir, "output directory for CSV reports");
    cmd->add_option("--tol-override", fl.tol_override, "override all check tolerances")
        ->each([&](const std::string&) { fl.has_tol = true; });
    cmd->add_option("--grid", fl.grid, "override sample-grid size");
    cmd->add_option("--particles", fl.particles, "override particle count per branch");
    cmd->add_flag("--csv,!--no-csv", fl.csv, "write CSV reports");
    cmd->add_flag("--summary,!--no-summary", fl.summary, "print the summary table");
  };

  std::vector<std::string> configs;
  CLI::App* run = app.add_subcommand("run", "run the checks of one or more scenario files");
  run->add_option("configs", configs, "scenario config files")->required();
  add_common(run);

  std::string sweep_cfg, sweep_param;
  std::vector<double> sweep_values;
  CLI::App* sweep = app.add_subcommand("sweep", "re-run one scenario over a parameter range");
  sweep->add_option("config", sweep_cfg, "scenario config file")->required();
  sweep->add_option("--param", sweep_param, "parameter to sweep (particles|grid|times|K|pprime|tol)")
      ->required();
  sweep->add_option("--values", sweep_values, "comma-separated values")
      ->required()
      ->delimiter(',');
  add_common(sweep);

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return run_command(configs, fl);
  return sweep_command(sweep_cfg, sweep_param, sweep_values, fl);
}
