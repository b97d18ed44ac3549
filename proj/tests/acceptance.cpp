// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any FAIL.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "optrate/covariance.hpp"
#include "optrate/estimators.hpp"
#include "optrate/experiments.hpp"
#include "optrate/model.hpp"
#include "optrate/rng.hpp"
#include "optrate/summary_functional.hpp"
#include "optrate/widths.hpp"
#include "oracles.hpp"

using namespace optrate;

namespace {

struct Line {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::map<std::string, ScenarioResult> cache;

const ScenarioResult& run(const std::string& key, const std::string& scenario,
                          const std::vector<std::string>& overrides = {}) {
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::fprintf(stderr, "running %s ...\n", key.c_str());
  return cache.emplace(key, run_scenario(default_config(scenario, overrides))).first->second;
}

void require_check(Line& line, const ScenarioResult& r, const std::string& name, int min_trials = 0) {
  const Check* c = r.find_check(name);
  if (c == nullptr) {
    line.require(false, r.scenario + ":" + name + " missing");
    return;
  }
  std::string what = name + " obs=" + num(c->observed) + " nom=" + num(c->nominal);
  bool ok = c->pass;
  if (min_trials > 0) {
    what += " trials=" + std::to_string(c->trials);
    ok = ok && c->trials >= min_trials;
  }
  line.require(ok, what);
}

Line ols_proportional_risk() {
  Line line;
  const auto t0 = std::chrono::steady_clock::now();
  const ScenarioResult& r =
      run("ols-2048", "ols-moments", {"cells=2048x1024", "sigma2=0.5", "trials=200"});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  require_check(line, r, "mean_near_proportional_limit_2048x1024");
  require_check(line, r, "mean_within_4se_2048x1024");
  line.require(secs < 60.0, "runtime=" + num(secs) + "s");
  return line;
}

Line ols_dispersion() {
  Line line;
  require_check(line, run("ols", "ols-moments"), "proportional_dispersion_1000x500");
  return line;
}

Line minnorm_interpolation() {
  Line line;
  const ScenarioResult& r = run("dd", "double-descent");
  require_check(line, r, "interp_loss_gamma_2");
  require_check(line, r, "interp_norm_gamma_2");
  return line;
}

Line bound_coverage() {
  Line line;
  require_check(line, run("flat", "flatness"), "cov_split_bound_coverage", 200);
  const ScenarioResult& ols = run("ols", "ols-moments");
  require_check(line, ols, "ols_interval_coverage", 200);
  require_check(line, ols, "low_complexity_coverage", 200);
  for (const char* tag : {"60x10", "1000x500", "10000x10"})
    require_check(line, ols, std::string("highprob_coverage_") + tag, 200);
  require_check(line, run("dd", "double-descent"), "isotropic_interp_interval_coverage", 200);
  require_check(line, run("lasso", "lasso"), "lasso_compat_coverage", 200);
  require_check(line, run("local", "local-gw"), "psi_sublevel_containment", 200);
  return line;
}

Line flatness() {
  Line line;
  const ScenarioResult& r = run("flat", "flatness");
  require_check(line, r, "flat_segment_spread");
  require_check(line, r, "bound_dominates_path");
  return line;
}

Line lasso_transition() {
  Line line;
  const ScenarioResult& r = run("lasso", "lasso");
  require_check(line, r, "recovery_above_transition");
  require_check(line, r, "failure_below_transition");
  return line;
}

Line near_erm() {
  Line line;
  const ScenarioResult& r = run("near", "near-erm");
  require_check(line, r, "pop_gap_slope");
  require_check(line, r, "train_gap_slope");
  return line;
}

Line local_width() {
  Line line;
  const ScenarioResult& r = run("local", "local-gw");
  require_check(line, r, "r_star_location");
  require_check(line, r, "erm_train_below_mu_star");
  return line;
}

Line oracle_suites() {
  Line line;

  Rng rng(11);
  double worst = 0.0;
  for (int d = 1; d <= 4; ++d) {
    for (int rep = 0; rep < 500; ++rep) {
      Eigen::VectorXd v(d);
      fill_normal(v, rng);
      const double B = 0.05 + 1.5 * std::abs(v(0));
      worst = std::max(worst, (project_l1_ball(v, B) - oracle::l1_projection_brute(v, B)).norm());
    }
  }
  line.require(worst <= 1e-8, "l1_projection err=" + num(worst));

  Eigen::MatrixXd S3(3, 3);
  S3 << 1.0, 0.3, -0.2, 0.3, 1.5, 0.4, -0.2, 0.4, 0.8;
  Eigen::MatrixXd S2(2, 2);
  S2 << 1.0, -0.6, -0.6, 2.0;
  worst = 0.0;
  for (const std::vector<int>& S : {std::vector<int>{0}, std::vector<int>{1}, std::vector<int>{0, 2}}) {
    worst = std::max(worst, std::abs(compatibility_constant(CovarianceSpec::dense(S3), S) -
                                     oracle::compatibility_grid(S3, S, 400)));
  }
  worst = std::max(worst, std::abs(compatibility_constant(CovarianceSpec::dense(S2), {1}) -
                                   oracle::compatibility_grid(S2, {1}, 2000)));
  line.require(worst <= 1e-3, "compatibility err=" + num(worst));

  const ScenarioResult& ols = run("ols", "ols-moments");
  for (const char* tag : {"60x10", "1000x500", "10000x10"})
    require_check(line, ols, std::string("train_chi2_mean_") + tag);

  SummaryFunctional fm;
  fm.sign = SummaryFunctional::Sign::minus;
  fm.sigma = std::sqrt(0.5);
  fm.n = 2048;
  fm.beta1 = beta1_cap(2048, 0.05);
  const CovarianceSpec iso = CovarianceSpec::isotropic(1024);
  fm.width = [iso](double r) { return localized_width_full_space(iso, r, 0, 0); };
  auto ball_width = std::make_shared<IsotropicBallLocalWidth>(200, 2000, 5);
  SummaryFunctional fb = fm;
  fb.n = 400;
  fb.width = [ball_width](double r) { return (*ball_width)(2.0, r, 1.0); };
  bool convex = true;
  for (const SummaryFunctional& f : {fm, fb}) {
    std::vector<double> v;
    for (int i = 0; i < 50; ++i) v.push_back(psi_eval(f, 3.0 * i / 49.0));
    for (int i = 1; i + 1 < 50; ++i) convex = convex && v[i] <= 0.5 * (v[i - 1] + v[i + 1]) + 1e-9;
  }
  line.require(convex, "psi_minus_midpoint_convexity");

  auto cov = CovarianceSpec::isotropic(40);
  const WidthEstimate w1 = width_ball(cov, ConstraintSet::l2_ball(1.0), 20000, 5);
  const WidthEstimate w3 = width_ball(cov, ConstraintSet::l2_ball(3.0), 20000, 5);
  line.require(std::abs(w3.value - 3.0 * w1.value) <= 1e-12, "width_homogeneity");
  line.require(std::abs(w1.value - chi_mean(40)) <= 4.0 * w1.std_error, "width_mc_vs_chi_mean");

  IsotropicBallLocalWidth lw(20, 2000, 7);
  bool nested = true;
  double prev = 0.0;
  for (double r : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0}) {
    const double v = lw(2.0, r, 1.0).value;
    nested = nested && v >= prev - 1e-12;
    nested = nested && v <= localized_width_full_space(CovarianceSpec::isotropic(20), r, 0, 0).value + 1e-12;
    prev = v;
  }
  line.require(nested, "local_width_nesting");
  return line;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Line()>>> criteria = {
      {"ols_proportional_risk", ols_proportional_risk},
      {"ols_dispersion", ols_dispersion},
      {"minnorm_interpolation", minnorm_interpolation},
      {"bound_coverage", bound_coverage},
      {"flatness", flatness},
      {"lasso_phase_transition", lasso_transition},
      {"near_erm_rate_separation", near_erm},
      {"local_gaussian_width", local_width},
      {"oracle_suites", oracle_suites},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Line line;
    try {
      line = fn();
    } catch (const std::exception& e) {
      line.require(false, std::string("exception: ") + e.what());
    }
    if (!line.pass) ++failed;
    std::printf("%s %s: %s\n", line.pass ? "PASS" : "FAIL", name.c_str(), line.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
