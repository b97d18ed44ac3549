#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "optrate/config.hpp"
#include "optrate/result_table.hpp"

namespace optrate {

struct Check {
  std::string name;
  double nominal = 0.0;
  double observed = 0.0;
  bool pass = false;
  int trials = 0;  // coverage checks: number of trials behind `observed`
};

struct ScenarioResult {
  std::string scenario;
  ResultTable table;
  std::vector<Check> checks;
  double runtime_seconds = 0.0;

  bool all_pass() const;
  const Check* find_check(const std::string& name) const;
};

// Scenario ids as used on the command line.
const std::vector<std::string>& scenario_names();
Schema scenario_schema(const std::string& scenario);

ScenarioResult run_scenario(const ResolvedConfig& cfg);

ScenarioResult run_flatness(const ResolvedConfig& cfg);
ScenarioResult run_double_descent(const ResolvedConfig& cfg);
ScenarioResult run_ols_moments(const ResolvedConfig& cfg);
ScenarioResult run_lasso_suite(const ResolvedConfig& cfg);
ScenarioResult run_near_erm_gap(const ResolvedConfig& cfg);
ScenarioResult run_local_gw(const ResolvedConfig& cfg);

// Convenience: defaults plus `key=value` overrides.
ResolvedConfig default_config(const std::string& scenario,
                              const std::vector<std::string>& overrides = {});

// <out>/<scenario>.csv, <scenario>_summary.json, <scenario>_manifest.json
void write_outputs(const ScenarioResult& result, const ResolvedConfig& cfg,
                   const std::string& out_dir);
std::string summary_json(const ScenarioResult& result);
std::string manifest_json(const ScenarioResult& result, const ResolvedConfig& cfg);

// Coverage discipline: failures allowed before a rate-`p` claim is rejected at
// one-sided significance 1e-3.
int allowed_failures(int trials, double p);
Check coverage_check(const std::string& name, int failures, int trials, double p);

std::uint64_t trial_seed(std::uint64_t base, const std::string& scenario, std::uint64_t trial);

}  // namespace optrate
