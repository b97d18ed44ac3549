#include <algorithm>
#include <cmath>
#include <limits>

#include "optrate/bounds.hpp"
#include "optrate/estimators.hpp"
#include "optrate/experiments.hpp"
#include "optrate/model.hpp"
#include "optrate/widths.hpp"
#include "scenario_util.hpp"

namespace optrate {

ScenarioResult run_flatness(const ResolvedConfig& cfg) {
  detail::Stopwatch clock;
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("seed"));
  const double delta = cfg.get_real("delta");
  const int n = cfg.get_bool("paper_scale") ? 600 : static_cast<int>(cfg.get_int("n"));
  const int d = static_cast<int>(std::lround(cfg.get_real("ratio") * n));
  const int trials = static_cast<int>(cfg.get_int("trials"));
  const int points = static_cast<int>(cfg.get_int("lambda_points"));
  const double lmin = cfg.get_real("log10_lambda_min");
  const double lmax = cfg.get_real("log10_lambda_max");
  const double sigma2 = cfg.get_real("sigma2");
  const double wnorm = cfg.get_real("wstar_norm");
  const int split_rank = static_cast<int>(cfg.get_int("split_rank"));
  detail::require_positive(trials, "trials");
  detail::require_positive(points, "lambda_points");
  detail::require_positive(n, "n");
  if (d <= n) throw ConfigError("config error: flatness needs ratio > 1");
  if (!(lmax >= lmin)) throw ConfigError("config error: log10_lambda_max < log10_lambda_min");

  std::vector<double> log_lambdas(points);
  for (int i = 0; i < points; ++i)
    log_lambdas[i] = points == 1 ? lmin : lmin + (lmax - lmin) * i / (points - 1);
  const double probe_log_lambda = lmax + 2.0;

  auto cov = CovarianceSpec::spiked(Eigen::VectorXd::Constant(1, cfg.get_real("spike")), cfg.get_real("alpha"), d - 1);
  auto problem = std::make_shared<const RegressionProblem>(std::sqrt(sigma2),
                                                           detail::scaled_e1(d, wnorm), cov);
  const CovSplit split = split_covariance(cov, split_rank);
  const ConstraintSet unit = ConstraintSet::l2_ball(1.0);
  const WidthEstimate unit_width = width_ball(split.sigma2, unit,
                                              static_cast<int>(cfg.get_int("width_samples")),
                                              trial_seed(seed, "flatness/width", 0));
  const double null_loss = population_loss(Eigen::VectorXd::Zero(d), *problem);
  const double bayes = sigma2;
  const double trace = cov.trace();
  const double sigma = std::sqrt(sigma2);
  const ConfidenceConstants cc = confidence_constants(n, delta, split.rank1);

  struct TrialStats {
    double spread = 0.0;
    bool segment_empty = true;
    bool dominated = true;
    bool flat_ok = true;
    double probe_loss = 0.0;
  };
  std::vector<TrialStats> stats(trials);

  ScenarioResult res{"flatness", ResultTable("flatness"), {}, 0.0};
  detail::run_trials(trials, res.table, [&](int t, ResultTable& tab) {
    Dataset data = sample_dataset(problem, n, trial_seed(seed, "flatness", t));
    RidgeFactor factor(data.X, data.Y);
    const Eigen::VectorXd minnorm = factor.minnorm();
    const double c_minnorm = C_functional(minnorm.norm(), unit, split, problem->w_star, n, delta,
                                          unit_width);
    const double c_star = C_functional(wnorm, unit, split, problem->w_star, n, delta, unit_width);
    const double train_star = empirical_loss(problem->w_star, data);
    double eps = std::max({c_star, (c_minnorm - sigma) / (1.0 + sigma), 0.0});
    if (sigma > 0.0) eps = std::max(eps, std::sqrt(train_star) / sigma - 1.0);
    const double flat_bound = flatness_bound(sigma, eps, cc.beta2);

    TrialStats& st = stats[t];
    double seg_min = std::numeric_limits<double>::infinity();
    double seg_max = 0.0;
    for (double ll : log_lambdas) {
      const Eigen::VectorXd w = factor.solve(std::pow(10.0, ll));
      const double norm = w.norm();
      const double train = empirical_loss(w, data);
      const double loss = population_loss(w, *problem);
      const BoundReport b =
          cov_split_bound(train, unit, split, problem->w_star, n, delta, norm, unit_width);
      const bool above = norm > wnorm;
      tab.add(t, "log10_lambda", ll, "train", train);
      tab.add(t, "log10_lambda", ll, "loss", loss);
      tab.add(t, "log10_lambda", ll, "norm", norm);
      tab.add(t, "log10_lambda", ll, "bound", b.value);
      tab.add(t, "log10_lambda", ll, "bound_leading", b.value / b.multiplier);
      tab.add(t, "log10_lambda", ll, "capacity", norm * norm * trace / n);
      tab.add(t, "log10_lambda", ll, "capacity_star", wnorm * wnorm * trace / n);
      tab.add(t, "log10_lambda", ll, "above_threshold", above ? 1.0 : 0.0);
      tab.add(t, "log10_lambda", ll, "null", null_loss);
      tab.add(t, "log10_lambda", ll, "bayes", bayes);
      if (loss > b.value) st.dominated = false;
      if (above) {
        st.segment_empty = false;
        seg_min = std::min(seg_min, loss);
        seg_max = std::max(seg_max, loss);
      }
      if (norm >= wnorm && loss > flat_bound) st.flat_ok = false;
    }
    st.spread = st.segment_empty ? 0.0 : (seg_max - seg_min) / seg_min;
    tab.add(t, "minnorm", 0.0, "C_minnorm", c_minnorm);
    tab.add(t, "minnorm", 0.0, "flatness_eps", eps);
    st.probe_loss = population_loss(factor.solve(std::pow(10.0, probe_log_lambda)), *problem);
  });
  res.table.sort_rows();
  res.table.add_metadata("n", std::to_string(n));
  res.table.add_metadata("d", std::to_string(d));
  res.table.add_metadata("beta2", format_double(cc.beta2));
  res.table.add_metadata("bound_applicable", cc.beta2_applicable ? "true" : "false");
  res.table.add_metadata("threshold_norm", format_double(wnorm));

  double worst_spread = 0.0;
  int empty = 0, undominated = 0, flat_fail = 0;
  double probe_mean = 0.0;
  for (const auto& st : stats) {
    worst_spread = std::max(worst_spread, st.spread);
    empty += st.segment_empty ? 1 : 0;
    undominated += st.dominated ? 0 : 1;
    flat_fail += st.flat_ok ? 0 : 1;
    probe_mean += st.probe_loss / trials;
  }
  res.checks.push_back(detail::make_check("flat_segment_spread", 0.10, worst_spread,
                                          empty == 0 && worst_spread <= 0.10));
  res.checks.push_back(detail::make_check("bound_dominates_path", 0.0,
                                          static_cast<double>(undominated), undominated == 0));
  res.checks.push_back(coverage_check("cov_split_bound_coverage", undominated, trials, delta));
  const double null_dev = std::abs(probe_mean - null_loss) / null_loss;
  res.checks.push_back(detail::make_check("large_lambda_null_limit", 0.01, null_dev, null_dev <= 0.01));
  res.checks.push_back(coverage_check("flatness_bound_coverage", flat_fail, trials, 2.0 * delta));
  res.runtime_seconds = clock.seconds();
  return res;
}

}  // namespace optrate
