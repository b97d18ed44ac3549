#include "optrate/experiments.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "optrate/rng.hpp"
#include "optrate/stats.hpp"

namespace optrate {

bool ScenarioResult::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

const Check* ScenarioResult::find_check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"flatness", "double-descent", "ols-moments",
                                                 "lasso",    "near-erm",       "local-gw"};
  return names;
}

namespace {

Schema common_keys() {
  return {{"seed", ValueType::integer, "0", "base seed"},
          {"delta", ValueType::real, "0.05", "confidence level"}};
}

Schema with_common(Schema extra) {
  Schema s = common_keys();
  s.insert(s.end(), extra.begin(), extra.end());
  return s;
}

}  // namespace

Schema scenario_schema(const std::string& scenario) {
  using T = ValueType;
  if (scenario == "flatness") {
    return with_common({
        {"n", T::integer, "200", "sample size"},
        {"ratio", T::real, "20", "aspect ratio d/n"},
        {"spike", T::real, "1", "variance of the first coordinate"},
        {"alpha", T::real, "0.05", "tail standard deviation"},
        {"sigma2", T::real, "0.5", "noise variance"},
        {"wstar_norm", T::real, "1", "w* = wstar_norm * e_1"},
        {"trials", T::integer, "200", "independent datasets"},
        {"log10_lambda_min", T::real, "-8", "left end of the ridge grid"},
        {"log10_lambda_max", T::real, "2", "right end of the ridge grid"},
        {"lambda_points", T::integer, "41", "grid size"},
        {"split_rank", T::integer, "1", "rank of Sigma_1"},
        {"width_samples", T::integer, "2000", "Monte Carlo samples for W_{Sigma_2}"},
        {"paper_scale", T::boolean, "false", "use n = 600"},
    });
  }
  if (scenario == "double-descent") {
    return with_common({
        {"n", T::integer, "1024", "sample size"},
        {"ratios", T::real_list, "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1,1.1,1.25,1.5,2,3,4,6,8",
         "aspect ratios d/n"},
        {"trials", T::integer, "30", "datasets per ratio"},
        {"wstar_norm", T::real, "2", "w* = wstar_norm * e_1"},
        {"sigma2", T::real, "0.5", "noise variance"},
        {"paper_scale", T::boolean, "false", "use n = 4096"},
    });
  }
  if (scenario == "ols-moments") {
    return with_common({
        {"cells", T::text_list, "60x10,1000x500,10000x10", "(n)x(d) cells"},
        {"sigma2", T::real, "1", "noise variance"},
        {"wstar_norm", T::real, "1", "w* = wstar_norm * e_1"},
        {"trials", T::integer, "2000", "datasets per cell"},
        {"highprob_K", T::real, "20", "constant of the summarised deviation"},
    });
  }
  if (scenario == "lasso") {
    return with_common({
        {"d", T::integer, "200", "dimension"},
        {"k", T::integer, "5", "sparsity"},
        {"amplitude", T::real, "1", "nonzero magnitude (alternating signs)"},
        {"n_high", T::integer, "500", "noiseless size above the transition"},
        {"n_low", T::integer, "0", "noiseless size below the transition (0: half of d psi(k/d))"},
        {"recovery_trials", T::integer, "50", "noiseless datasets per size"},
        {"noisy_n", T::integer, "4000", "noisy sample size"},
        {"noisy_sigma2", T::real, "1", "noise variance of the noisy runs"},
        {"noisy_trials", T::integer, "200", "noisy datasets"},
        {"cone_samples", T::integer, "4000", "Monte Carlo samples for the descent cone"},
    });
  }
  if (scenario == "near-erm") {
    return with_common({
        {"gamma", T::real, "0.5", "d/n"},
        {"c", T::real, "1", "near-ERM constant"},
        {"sigma2", T::real, "1", "noise variance"},
        {"wstar_norm", T::real, "1", "w* = wstar_norm * e_1"},
        {"n_list", T::int_list, "512,1024,2048,4096,8192,16384", "sample sizes"},
        {"trials_base", T::integer, "16", "trials at the smallest n, scaled by n_min/n"},
    });
  }
  if (scenario == "local-gw") {
    return with_common({
        {"n", T::integer, "2048", "sample size"},
        {"gamma", T::real, "0.5", "d/n"},
        {"sigma2", T::real, "0.5", "noise variance"},
        {"wstar_norm", T::real, "1", "w* = wstar_norm * e_1"},
        {"trials", T::integer, "200", "datasets"},
        {"set", T::text, "full_space", "full_space or l2_ball"},
        {"ball_radius", T::real, "2", "radius of the l2 ball"},
        {"mu_offset", T::real, "0.01", "mu = mu* + mu_offset"},
        {"width_samples", T::integer, "4000", "Monte Carlo samples for the ball width"},
        {"C", T::real, "1.4142135623730951", "constant in the summary functionals"},
    });
  }
  std::string valid;
  for (const auto& s : scenario_names()) valid += (valid.empty() ? "" : ", ") + s;
  throw ConfigError("unknown scenario '" + scenario + "' (valid: " + valid + ")");
}

namespace {

ScenarioResult dispatch(const ResolvedConfig& cfg) {
  const std::string& s = cfg.scenario();
  if (s == "flatness") return run_flatness(cfg);
  if (s == "double-descent") return run_double_descent(cfg);
  if (s == "ols-moments") return run_ols_moments(cfg);
  if (s == "lasso") return run_lasso_suite(cfg);
  if (s == "near-erm") return run_near_erm_gap(cfg);
  if (s == "local-gw") return run_local_gw(cfg);
  throw ConfigError("unknown scenario '" + s + "'");
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

ScenarioResult run_scenario(const ResolvedConfig& cfg) {
  ScenarioResult r = dispatch(cfg);
  ResultTable stamped(r.table.scenario());
  stamped.add_metadata("config_hash", hex64(cfg.hash()));
  stamped.add_metadata("seed", cfg.get_text("seed"));
  stamped.add_metadata("delta", cfg.get_text("delta"));
  stamped.add_metadata("version", OPTRATE_VERSION);
  stamped.append(r.table);
  r.table = std::move(stamped);
  return r;
}

ResolvedConfig default_config(const std::string& scenario, const std::vector<std::string>& overrides) {
  std::vector<Override> ov;
  for (const auto& o : overrides) ov.push_back(parse_override(o));
  return resolve_config(scenario, scenario_schema(scenario), RawConfig{}, ov);
}

int allowed_failures(int trials, double p) { return binomial_upper_critical(trials, p, 1e-3); }

Check coverage_check(const std::string& name, int failures, int trials, double p) {
  Check c;
  c.name = name;
  c.nominal = p;
  c.observed = trials > 0 ? static_cast<double>(failures) / trials : 0.0;
  c.pass = trials > 0 && failures <= allowed_failures(trials, p);
  c.trials = trials;
  return c;
}

std::uint64_t trial_seed(std::uint64_t base, const std::string& scenario, std::uint64_t trial) {
  return child_seed(child_seed(base, fnv1a64(scenario)), trial);
}

std::string summary_json(const ScenarioResult& result) {
  nlohmann::ordered_json j;
  j["scenario"] = result.scenario;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : result.checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["nominal"] = c.nominal;
    e["observed"] = c.observed;
    e["pass"] = c.pass;
    if (c.trials > 0) e["trials"] = c.trials;
    j["checks"].push_back(e);
  }
  return j.dump(2) + "\n";
}

std::string manifest_json(const ScenarioResult& result, const ResolvedConfig& cfg) {
  nlohmann::ordered_json j;
  j["scenario"] = result.scenario;
  j["version"] = OPTRATE_VERSION;
  j["config_hash"] = hex64(cfg.hash());
  nlohmann::ordered_json c;
  for (const auto& [k, v] : cfg.entries()) c[k] = v;
  j["config"] = c;
  j["rows"] = result.table.rows().size();
  j["runtime_seconds"] = result.runtime_seconds;
  j["all_pass"] = result.all_pass();
  return j.dump(2) + "\n";
}

void write_outputs(const ScenarioResult& result, const ResolvedConfig& cfg,
                   const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  result.table.write_csv((dir / (result.scenario + ".csv")).string());
  auto write_text = [](const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << text;
  };
  write_text(dir / (result.scenario + "_summary.json"), summary_json(result));
  write_text(dir / (result.scenario + "_manifest.json"), manifest_json(result, cfg));
}

}  // namespace optrate
