#include <algorithm>
#include <cmath>

#include "optrate/estimators.hpp"
#include "optrate/experiments.hpp"
#include "optrate/model.hpp"
#include "optrate/summary_functional.hpp"
#include "optrate/widths.hpp"
#include "scenario_util.hpp"

namespace optrate {

ScenarioResult run_local_gw(const ResolvedConfig& cfg) {
  detail::Stopwatch clock;
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("seed"));
  const double delta = cfg.get_real("delta");
  const int n = static_cast<int>(cfg.get_int("n"));
  const double gamma = cfg.get_real("gamma");
  const double sigma2 = cfg.get_real("sigma2");
  const double wnorm = cfg.get_real("wstar_norm");
  const int trials = static_cast<int>(cfg.get_int("trials"));
  const std::string set_name = cfg.get_text("set");
  const double ball_radius = cfg.get_real("ball_radius");
  const double mu_offset = cfg.get_real("mu_offset");
  const int width_samples = static_cast<int>(cfg.get_int("width_samples"));
  detail::require_positive(n, "n");
  detail::require_positive(trials, "trials");
  const int d = static_cast<int>(std::lround(gamma * n));
  if (d < 1) throw ConfigError("config error: local-gw needs gamma * n >= 1");
  if (set_name != "full_space" && set_name != "l2_ball")
    throw ConfigError("config error: key 'set' expects full_space or l2_ball, got '" + set_name + "'");
  const bool full = set_name == "full_space";
  if (full && d >= n) throw ConfigError("config error: local-gw over R^d needs gamma < 1");
  if (!full && !(ball_radius >= wnorm))
    throw ConfigError("config error: local-gw needs ball_radius >= wstar_norm");

  const double sigma = std::sqrt(sigma2);
  auto problem = std::make_shared<const RegressionProblem>(sigma, detail::scaled_e1(d, wnorm),
                                                           CovarianceSpec::isotropic(d));
  std::function<WidthEstimate(double)> width;
  if (full) {
    const CovarianceSpec& cov = problem->cov;
    width = [&cov](double r) { return localized_width_full_space(cov, r, 0, 0); };
  } else {
    auto oracle = std::make_shared<IsotropicBallLocalWidth>(d, width_samples,
                                                            trial_seed(seed, "local-gw/width", 0));
    width = [oracle, ball_radius, wnorm](double r) { return (*oracle)(ball_radius, r, wnorm); };
  }
  const double r_max = full ? 10.0 * (sigma + wnorm + 1.0) : 10.0 * (sigma + ball_radius);

  SummaryFunctional f;
  f.sign = SummaryFunctional::Sign::plus;
  f.delta = delta;
  f.sigma = sigma;
  f.n = n;
  f.width = width;
  f.C = cfg.get_real("C");
  f.beta1 = beta1_cap(n, delta);
  const PsiMinimum upper = psi_minimize(f, r_max);

  // Limiting functional (no confidence terms) for the location of r*.
  SummaryFunctional lim = f;
  lim.beta1 = 0.0;
  lim.C = 0.0;
  const PsiMinimum limit = psi_minimize(lim, r_max);

  const double mu = upper.mu_star + mu_offset;
  const double tau = local_tau(delta, mu, upper.mu_star, upper.r_star);
  const SummaryFunctional fm = f.with_sign(SummaryFunctional::Sign::minus);
  const Sublevel level = psi_sublevel(fm, mu, tau, r_max);
  const double tol = 1e-6 * std::max(1.0, r_max);

  std::vector<int> below(trials, 0), contained(trials, 0);
  ScenarioResult res{"local-gw", ResultTable("local-gw"), {}, 0.0};
  detail::run_trials(trials, res.table, [&](int t, ResultTable& tab) {
    Dataset data = sample_dataset(problem, n, trial_seed(seed, "local-gw", t));
    const Predictor p = full ? least_squares_minnorm(data) : l2_constrained_erm(data, ball_radius);
    const double train_root = std::sqrt(empirical_loss(p.w, data));
    const double err = std::sqrt(excess_risk(p.w, *problem));
    below[t] = train_root <= upper.mu_star ? 1 : 0;
    // The interval only constrains predictors with sqrt(train) <= mu.
    const bool in_level = train_root <= mu;
    contained[t] = !in_level || (!level.empty && err >= level.r_minus - tol &&
                                 err <= level.r_plus + tol);
    const double x = n;
    tab.add(t, "n", x, "train_root", train_root);
    tab.add(t, "n", x, "error", err);
    tab.add(t, "n", x, "below_mu_star", below[t]);
    tab.add(t, "n", x, "contained", contained[t]);
    const double mu_obs = std::max(train_root, 0.0);
    const double tau_obs = local_tau(delta, std::max(mu_obs, upper.mu_star), upper.mu_star, upper.r_star);
    const Sublevel obs = psi_sublevel(fm, mu_obs, tau_obs, r_max);
    if (!obs.empty) {
      tab.add(t, "n", x, "r_minus_obs", obs.r_minus);
      tab.add(t, "n", x, "r_plus_obs", obs.r_plus);
    }
  });
  res.table.sort_rows();
  const double x = n;
  const double target = std::sqrt(sigma2 * gamma / (1.0 - gamma));
  res.table.add(-1, "n", x, "r_star", upper.r_star);
  res.table.add(-1, "n", x, "mu_star", upper.mu_star);
  res.table.add(-1, "n", x, "r_star_limit", limit.r_star);
  res.table.add(-1, "n", x, "mu_star_limit", limit.mu_star);
  if (full) res.table.add(-1, "n", x, "r_star_target", target);
  res.table.add(-1, "n", x, "mu", mu);
  res.table.add(-1, "n", x, "tau", tau);
  if (!level.empty) {
    res.table.add(-1, "n", x, "r_minus", level.r_minus);
    res.table.add(-1, "n", x, "r_plus", level.r_plus);
  }
  res.table.add_metadata("set", set_name);
  res.table.add_metadata("d", std::to_string(d));
  res.table.add_metadata("beta1", format_double(f.beta1));

  if (full)
    res.checks.push_back(detail::make_check("r_star_location", target, limit.r_star,
                                            detail::within_rel(limit.r_star, target, 0.02)));
  int nb = 0, nc = 0;
  for (int t = 0; t < trials; ++t) {
    nb += below[t];
    nc += contained[t];
  }
  const double frac_below = static_cast<double>(nb) / trials;
  res.checks.push_back(detail::make_check("erm_train_below_mu_star", 0.95, frac_below, frac_below >= 0.95));
  res.checks.push_back(coverage_check("psi_sublevel_containment", trials - nc, trials, 4.0 * delta));
  res.runtime_seconds = clock.seconds();
  return res;
}

}  // namespace optrate
