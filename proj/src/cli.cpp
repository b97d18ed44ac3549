#include "optrate/cli.hpp"

#include <algorithm>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "optrate/experiments.hpp"

namespace optrate {

namespace {

struct Invocation {
  std::string config_path;
  std::vector<std::string> overrides;
  long long seed = 0;
  bool seed_given = false;
  std::string out_dir = "results";
};

std::string joined_scenarios() {
  std::string s;
  for (const auto& name : scenario_names()) s += (s.empty() ? "" : ", ") + name;
  return s + ", verify-all";
}

bool is_scenario(const std::string& s) {
  const auto& names = scenario_names();
  return std::find(names.begin(), names.end(), s) != names.end();
}

bool schema_has(const Schema& schema, const std::string& key) {
  return std::any_of(schema.begin(), schema.end(), [&](const KeySpec& k) { return k.name == key; });
}

// Sections and scoped overrides must name a scenario; global keys and unscoped
// overrides must be known to at least one of `targets`.
void validate_against(const RawConfig& raw, const std::vector<Override>& overrides,
                      const std::vector<std::string>& targets) {
  for (const auto& [section, entries] : raw.sections) {
    if (section == "global") {
      for (const auto& [key, entry] : entries) {
        bool known = std::any_of(targets.begin(), targets.end(), [&](const std::string& s) {
          return schema_has(scenario_schema(s), key);
        });
        if (!known) throw ConfigError("config error: " + entry.source + ": unknown key '" + key + "'");
      }
    } else if (!is_scenario(section)) {
      throw ConfigError("config error: unknown section [" + section + "] (valid: " +
                        joined_scenarios() + ")");
    }
  }
  for (const auto& o : overrides) {
    if (!o.scenario.empty()) {
      if (!is_scenario(o.scenario))
        throw ConfigError("config error: override names unknown scenario '" + o.scenario + "'");
      continue;
    }
    bool known = std::any_of(targets.begin(), targets.end(), [&](const std::string& s) {
      return schema_has(scenario_schema(s), o.key);
    });
    if (!known) {
      std::string valid;
      if (targets.size() == 1)
        for (const auto& k : scenario_schema(targets[0])) valid += (valid.empty() ? "" : ", ") + k.name;
      throw ConfigError("config error: override: unknown key '" + o.key + "'" +
                        (valid.empty() ? "" : " (valid: " + valid + ")"));
    }
  }
}

ResolvedConfig build_config(const std::string& scenario, const RawConfig& raw,
                            std::vector<Override> overrides, const Invocation& inv) {
  const Schema schema = scenario_schema(scenario);
  overrides.erase(std::remove_if(overrides.begin(), overrides.end(),
                                 [&](const Override& o) {
                                   return o.scenario.empty() && !schema_has(schema, o.key);
                                 }),
                  overrides.end());
  if (inv.seed_given) overrides.push_back({scenario, "seed", std::to_string(inv.seed)});
  return resolve_config(scenario, schema, raw, overrides);
}

void report(const ScenarioResult& r, std::ostream& out) {
  out << "[" << r.scenario << "] " << r.table.rows().size() << " rows, " << std::fixed
      << std::setprecision(1) << r.runtime_seconds << " s\n";
  out << std::defaultfloat << std::setprecision(6);
  for (const auto& c : r.checks)
    out << "  " << (c.pass ? "PASS" : "FAIL") << " " << c.name << " observed=" << c.observed
        << " nominal=" << c.nominal << "\n";
}

int run(const std::string& command, const Invocation& inv, std::ostream& out) {
  RawConfig raw;
  if (!inv.config_path.empty()) raw = load_config_file(inv.config_path);
  std::vector<Override> overrides;
  for (const auto& o : inv.overrides) overrides.push_back(parse_override(o));

  const std::vector<std::string> targets =
      command == "verify-all" ? scenario_names() : std::vector<std::string>{command};
  validate_against(raw, overrides, targets);

  std::vector<ResolvedConfig> configs;
  for (const auto& s : targets) configs.push_back(build_config(s, raw, overrides, inv));

  bool all_pass = true;
  for (const auto& cfg : configs) {
    ScenarioResult r = run_scenario(cfg);
    write_outputs(r, cfg, inv.out_dir);
    report(r, out);
    all_pass = all_pass && r.all_pass();
  }
  if (command == "verify-all") {
    out << (all_pass ? "verify-all: all checks passed\n" : "verify-all: some checks failed\n");
    return all_pass ? 0 : 2;
  }
  return 0;
}

}  // namespace

int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimistic-rate bound experiments", "optrate"};
  app.require_subcommand(1);
  Invocation inv;
  std::vector<CLI::App*> subs;
  auto add = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", inv.config_path, "key = value config with [scenario] sections")
        ->check(CLI::ExistingFile);
    sub->add_option("--override", inv.overrides, "key=value or scenario.key=value (repeatable)");
    sub->add_option("--seed", inv.seed, "base seed")->each([&](const std::string&) { inv.seed_given = true; });
    sub->add_option("--out", inv.out_dir, "output directory")->capture_default_str();
    subs.push_back(sub);
  };
  add("flatness", "ridge path under a spiked covariance");
  add("double-descent", "OLS / min-norm interpolation across d/n");
  add("ols-moments", "mean, variance and deviation of the OLS loss");
  add("lasso", "LASSO recovery, bounds and descent cone");
  add("near-erm", "training vs population gap rates of near-ERMs");
  add("local-gw", "summary functionals and localization");
  add("verify-all", "run every scenario and its checks");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    if (!args.empty() && args[0].rfind("-", 0) != 0) {
      const bool known = std::any_of(subs.begin(), subs.end(),
                                     [&](const CLI::App* s) { return s->get_name() == args[0]; });
      if (!known) {
        err << "unknown subcommand '" << args[0] << "' (valid: " << joined_scenarios() << ")\n";
        return 1;
      }
    }
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    if (dynamic_cast<const CLI::RequiredError*>(&e) && app.get_subcommands().empty())
      err << "valid subcommands: " << joined_scenarios() << "\n";
    err << app.help();
    return 1;
  }
  std::string command;
  for (const auto* s : subs)
    if (s->parsed()) command = s->get_name();
  try {
    return run(command, inv, out);
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return 1;
  }
}

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return parse_and_dispatch(args, out, err);
}

}  // namespace optrate
