#include <algorithm>
#include <cmath>
#include <numeric>

#include "optrate/bounds.hpp"
#include "optrate/estimators.hpp"
#include "optrate/experiments.hpp"
#include "optrate/model.hpp"
#include "optrate/rng.hpp"
#include "optrate/widths.hpp"
#include "scenario_util.hpp"

namespace optrate {

namespace {

constexpr double kRecoveryTol = 1e-6;
constexpr int kExactCompatibilityMaxDim = 30;

Eigen::VectorXd sparse_wstar(int d, int k, double amplitude) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < k; ++i) w(i) = (i % 2 == 0) ? amplitude : -amplitude;
  return w;
}

}  // namespace

ScenarioResult run_lasso_suite(const ResolvedConfig& cfg) {
  detail::Stopwatch clock;
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("seed"));
  const double delta = cfg.get_real("delta");
  const int d = static_cast<int>(cfg.get_int("d"));
  const int k = static_cast<int>(cfg.get_int("k"));
  const double amplitude = cfg.get_real("amplitude");
  const int n_high = static_cast<int>(cfg.get_int("n_high"));
  const int rec_trials = static_cast<int>(cfg.get_int("recovery_trials"));
  const int noisy_n = static_cast<int>(cfg.get_int("noisy_n"));
  const double noisy_sigma2 = cfg.get_real("noisy_sigma2");
  const int noisy_trials = static_cast<int>(cfg.get_int("noisy_trials"));
  const int cone_samples = static_cast<int>(cfg.get_int("cone_samples"));
  detail::require_positive(d, "d");
  detail::require_positive(n_high, "n_high");
  detail::require_positive(rec_trials, "recovery_trials");
  detail::require_positive(noisy_n, "noisy_n");
  detail::require_positive(noisy_trials, "noisy_trials");
  if (k < 1 || k > d) throw ConfigError("config error: lasso needs 1 <= k <= d");
  if (!(amplitude > 0.0)) throw ConfigError("config error: key 'amplitude' must be > 0");

  const Eigen::VectorXd wstar = sparse_wstar(d, k, amplitude);
  const double B = wstar.lpNorm<1>();
  const double rho = static_cast<double>(k) / d;
  const double psi_ref = d * statistical_dimension_psi(rho);
  int n_low = static_cast<int>(cfg.get_int("n_low"));
  if (n_low <= 0) n_low = std::max(1, static_cast<int>(std::floor(0.5 * psi_ref)));

  const CovarianceSpec cov = CovarianceSpec::isotropic(d);
  std::vector<int> support(k);
  std::iota(support.begin(), support.end(), 0);
  const double phi2 = d <= kExactCompatibilityMaxDim && k <= 12
                          ? compatibility_constant(cov, support)
                          : compatibility_lower_bound(cov);
  const double max_diag = cov.max_diagonal();

  ScenarioResult res{"lasso", ResultTable("lasso"), {}, 0.0};
  res.table.add_metadata("n_low", std::to_string(n_low));
  res.table.add_metadata("phi2", format_double(phi2));

  // Noiseless recovery on both sides of the phase transition.
  auto noiseless = std::make_shared<const RegressionProblem>(0.0, wstar, cov);
  L1SolverOptions exact_opts;
  exact_opts.tolerance = 1e-12;
  exact_opts.max_iterations = 200000;
  auto recovery_run = [&](int n, const std::string& tag) {
    std::vector<int> recovered(rec_trials, 0);
    ResultTable part("lasso");
    detail::run_trials(rec_trials, part, [&](int t, ResultTable& tab) {
      Dataset data = sample_dataset(noiseless, n, child_seed(trial_seed(seed, "lasso/" + tag, t), n));
      const Predictor p = l1_constrained_erm(data, B, exact_opts);
      const double err = (p.w - wstar).norm();
      recovered[t] = err <= kRecoveryTol ? 1 : 0;
      tab.add(t, "n", n, "recovery_error", err);
      tab.add(t, "n", n, "recovered", recovered[t]);
    });
    res.table.append(part);
    return std::accumulate(recovered.begin(), recovered.end(), 0);
  };
  const int rec_high = recovery_run(n_high, "high");
  const int rec_low = recovery_run(n_low, "low");

  // Noisy runs: excess risk against the compatibility and fast-rate bounds.
  const double sigma = std::sqrt(noisy_sigma2);
  auto noisy = std::make_shared<const RegressionProblem>(sigma, wstar, cov);
  const double beta1 = beta1_cap(noisy_n, delta);
  const BoundReport compat =
      lasso_compat_bound(sigma, beta1, beta1, phi2, k, d, noisy_n, delta, max_diag);
  const double p_fast = lasso_fast_rate_p(k, d, delta, max_diag, phi2);
  std::optional<BoundReport> fast;
  if (p_fast / noisy_n <= 0.999) fast = low_complexity_bound(p_fast, noisy_n, noisy_sigma2, delta);
  const DescentConeEstimate cone =
      l1_descent_cone_dimension(wstar, cone_samples, trial_seed(seed, "lasso/cone", 0));
  const double gamma_cone = cone.stat_dim.value / noisy_n;

  std::vector<double> excess(noisy_trials);
  ResultTable part("lasso");
  detail::run_trials(noisy_trials, part, [&](int t, ResultTable& tab) {
    Dataset data = sample_dataset(noisy, noisy_n, trial_seed(seed, "lasso/noisy", t));
    const Predictor p = l1_constrained_erm(data, B);
    const double train = empirical_loss(p.w, data);
    excess[t] = excess_risk(p.w, *noisy);
    const BoundReport iso = lasso_isotropic_interval(train, gamma_cone, noisy_n, delta, noisy_sigma2);
    const double x = noisy_n;
    tab.add(t, "n", x, "train", train);
    tab.add(t, "n", x, "excess", excess[t]);
    tab.add(t, "n", x, "compat_bound", compat.value);
    if (fast) tab.add(t, "n", x, "fast_rate_bound", fast->value);
    if (std::isfinite(iso.value)) {
      tab.add(t, "n", x, "iso_excess_lower", std::pow(*iso.lower, 2));
      tab.add(t, "n", x, "iso_excess_upper", iso.value * iso.value);
    }
  });
  res.table.append(part);
  res.table.add(-1, "n", noisy_n, "psi_reference", psi_ref);
  res.table.add(-1, "n", noisy_n, "stat_dim", cone.stat_dim.value);
  res.table.add(-1, "n", noisy_n, "stat_dim_std_error", cone.stat_dim.std_error);
  res.table.add(-1, "n", noisy_n, "iso_asymptotic_excess",
                gamma_cone < 1.0 ? noisy_sigma2 * gamma_cone / (1.0 - gamma_cone) : 0.0);
  res.table.sort_rows();

  res.checks.push_back(detail::make_check("recovery_above_transition", rec_trials, rec_high,
                                          rec_high == rec_trials));
  const double fail_low = 1.0 - static_cast<double>(rec_low) / rec_trials;
  res.checks.push_back(detail::make_check("failure_below_transition", 0.8, fail_low, fail_low >= 0.8));
  int compat_fail = 0, fast_fail = 0;
  for (double e : excess) {
    compat_fail += e > compat.value ? 1 : 0;
    if (fast) fast_fail += e > fast->value ? 1 : 0;
  }
  res.checks.push_back(coverage_check("lasso_compat_coverage", compat_fail, noisy_trials, delta));
  if (fast && fast->applicable)
    res.checks.push_back(coverage_check("lasso_fast_rate_coverage", fast_fail, noisy_trials, delta));
  // Statistical dimension: within 3 standard errors of d psi(k/d), or inside the
  // known bracket [d psi - 2 sqrt(d/k), d psi] up to the same Monte Carlo error.
  const double se = cone.stat_dim.std_error;
  const double sd = cone.stat_dim.value;
  const bool close = std::abs(sd - psi_ref) <= 3.0 * se;
  const bool bracket = sd <= psi_ref + 3.0 * se && sd >= psi_ref - 2.0 * std::sqrt(double(d) / k) - 3.0 * se;
  res.checks.push_back(detail::make_check("descent_cone_vs_psi", psi_ref, sd, close || bracket));
  res.runtime_seconds = clock.seconds();
  return res;
}

}  // namespace optrate
