// Scenario description files: a versioned nested key-value text format
// naming the manifold, the support parametrization(s), the driving
// potential(s), discretization sizes, and the inequality checks to run;
// plus the batch drivers behind the command-line tool.

#pragma once

#include "curvot/verify.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace curvot {

struct RawSection {
  std::string name;
  std::vector<std::pair<std::string, std::string>> entries;
  int line = 0;
};

struct RawConfig {
  int version = 1;
  std::string id;
  std::vector<std::pair<std::string, std::string>> top;  // top-level keys besides version/id
  std::vector<RawSection> sections;
};

RawConfig parse_config_text(const std::string& text);
RawConfig parse_config_file(const std::string& path);
std::string serialize_config(const RawConfig& cfg);

struct CheckSpec {
  std::string kind;  // lower-renyi | lower-entropy | upper | brunn-minkowski | sectional-form
  double K = 0.0;
  int p = 1;
  double pprime = 1.0;
  double t0 = 0.25, t1 = 0.75;  // upper checks only
  int times = 11;
  double tol = 1e-6;
  bool expect_fail = false;
  bool force_kappa_zero = false;
};

struct QualitySpec {
  double riccati_tol = 1e-5;
  double ode_tol = 1e-7;
  double selfadjoint_tol = 1e-6;
  double optimality_tol = 1e-5;
  double mm_min_ratio = 1e-6;
  bool certify = true;  // run the exact-assignment certification
};

struct ScenarioSpec {
  std::string id;
  unsigned seed = 20240817;
  std::shared_ptr<ChartManifold> manifold;
  PotentialScenario scenario;  // scenario.M points at *manifold
  QualitySpec quality;
  std::vector<CheckSpec> checks;
};

ScenarioSpec build_scenario(const RawConfig& cfg);

struct Overrides {
  std::optional<int> particles;
  std::optional<int> grid;
  std::optional<int> times;
  std::optional<double> tol;
  std::optional<double> K;
  std::optional<double> pprime;
};

struct RunOutcome {
  std::string id;
  bool ok = true;
  std::vector<InequalityReport> reports;  // checks plus quality diagnostics
  std::string summary;
};

RunOutcome run_scenario(const ScenarioSpec& spec, const Overrides& ov = {});

std::string reports_csv(const std::vector<InequalityReport>& reports);
std::string reports_csv(const std::vector<InequalityReport>& reports,
                        const std::string& extra_col, const std::string& extra_val);

// Uniform report times j/(times-1); validated against the sample grid later.
std::vector<double> uniform_times(int times);

}  // namespace curvot
