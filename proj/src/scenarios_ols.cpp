#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "optrate/bounds.hpp"
#include "optrate/estimators.hpp"
#include "optrate/experiments.hpp"
#include "optrate/model.hpp"
#include "optrate/rng.hpp"
#include "optrate/stats.hpp"
#include "scenario_util.hpp"

namespace optrate {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::shared_ptr<const RegressionProblem> isotropic_problem(int d, double sigma2, double wnorm) {
  return std::make_shared<const RegressionProblem>(std::sqrt(sigma2), detail::scaled_e1(d, wnorm),
                                                   CovarianceSpec::isotropic(d));
}

std::pair<int, int> parse_cell(const std::string& text) {
  const auto x = text.find('x');
  int n = 0, d = 0;
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    std::size_t p1 = 0, p2 = 0;
    n = std::stoi(text.substr(0, x), &p1);
    d = std::stoi(text.substr(x + 1), &p2);
    if (p1 != x || p2 != text.size() - x - 1) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw ConfigError("config error: key 'cells' expects entries like 1000x500, got '" + text + "'");
  }
  if (n < 1 || d < 0) throw ConfigError("config error: bad cell '" + text + "'");
  return {n, d};
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? kNaN : s / static_cast<double>(v.size());
}

}  // namespace

ScenarioResult run_double_descent(const ResolvedConfig& cfg) {
  detail::Stopwatch clock;
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("seed"));
  const double delta = cfg.get_real("delta");
  const int n = cfg.get_bool("paper_scale") ? 4096 : static_cast<int>(cfg.get_int("n"));
  const int trials = static_cast<int>(cfg.get_int("trials"));
  const double sigma2 = cfg.get_real("sigma2");
  const double wnorm = cfg.get_real("wstar_norm");
  const std::vector<double> ratios = cfg.get_real_list("ratios");
  detail::require_positive(trials, "trials");
  detail::require_positive(n, "n");
  if (ratios.empty()) throw ConfigError("config error: key 'ratios' must be nonempty");

  std::vector<int> dims;
  for (double r : ratios) {
    const int d = static_cast<int>(std::lround(r * n));
    if (d < 1) throw ConfigError("config error: ratio " + format_double(r) + " gives d < 1");
    dims.push_back(d);
  }
  const double null_loss = sigma2 + wnorm * wnorm;
  const double eps_interp = std::sqrt(std::log(18.0 / delta) / n);
  const std::size_t cells = dims.size();

  struct Cell {
    double loss = 0, norm_sq = 0, bd2 = 0;
    int ols_fail = 0, ols_count = 0, interp_fail = 0, interp_count = 0;
  };
  std::vector<Cell> cell_stats(cells * trials);
  std::vector<ResultTable> parts(cells * trials, ResultTable("double-descent"));

  parallel_for(cells * trials, [&](std::size_t idx) {
    const std::size_t g = idx / trials;
    const int t = static_cast<int>(idx % trials);
    const int d = dims[g];
    const double gamma = static_cast<double>(d) / n;
    auto problem = isotropic_problem(d, sigma2, wnorm);
    Dataset data = sample_dataset(problem, n, child_seed(trial_seed(seed, "double-descent", t), d));
    const Predictor p = least_squares_minnorm(data);
    const double train = empirical_loss(p.w, data);
    const double loss = population_loss(p.w, *problem);
    const double norm_sq = p.w.squaredNorm();
    const double bd1 = std::pow(std::sqrt(train) + std::sqrt(norm_sq * gamma), 2);
    double bd2 = kNaN, bd2_eps = kNaN;
    bool applicable = false;
    Cell& c = cell_stats[idx];
    if (d < n) {
      const BoundReport fig = ols_interval_eps(train, gamma, sigma2, 0.0, delta);
      const BoundReport thm = ols_interval(train, gamma, n, delta, sigma2);
      bd2 = sigma2 + fig.value * fig.value;
      applicable = thm.applicable;
      if (applicable) {
        bd2_eps = sigma2 + thm.value * thm.value;
        const double excess_root = std::sqrt(std::max(loss - sigma2, 0.0));
        c.ols_count = 1;
        c.ols_fail = (excess_root > thm.value || excess_root < *thm.lower) ? 1 : 0;
      }
    } else if (d > n) {
      const BoundReport fig = isotropic_interp_interval(norm_sq, wnorm * wnorm, sigma2, gamma, 0.0);
      const BoundReport thm =
          isotropic_interp_interval(norm_sq, wnorm * wnorm, sigma2, gamma, eps_interp);
      bd2 = fig.value;
      bd2_eps = thm.value;
      applicable = thm.applicable;
      c.interp_count = 1;
      c.interp_fail = (loss > thm.value || loss < *thm.lower) ? 1 : 0;
    }
    c.loss = loss;
    c.norm_sq = norm_sq;
    c.bd2 = bd2;
    ResultTable& tab = parts[idx];
    tab.add(t, "gamma", gamma, "train", train);
    tab.add(t, "gamma", gamma, "loss", loss);
    tab.add(t, "gamma", gamma, "norm_sq", norm_sq);
    tab.add(t, "gamma", gamma, "bd1", bd1);
    tab.add(t, "gamma", gamma, "bd2", bd2);
    tab.add(t, "gamma", gamma, "bd2_eps", bd2_eps);
    tab.add(t, "gamma", gamma, "bd2_applicable", applicable ? 1.0 : 0.0);
    tab.add(t, "gamma", gamma, "null", null_loss);
    tab.add(t, "gamma", gamma, "bayes", sigma2);
  });

  ScenarioResult res{"double-descent", ResultTable("double-descent"), {}, 0.0};
  for (const auto& p : parts) res.table.append(p);
  res.table.sort_rows();
  res.table.add_metadata("n", std::to_string(n));
  res.table.add_metadata("interp_eps", format_double(eps_interp));

  int ols_fail = 0, ols_count = 0, interp_fail = 0, interp_count = 0;
  for (const auto& c : cell_stats) {
    ols_fail += c.ols_fail;
    ols_count += c.ols_count;
    interp_fail += c.interp_fail;
    interp_count += c.interp_count;
  }
  auto cell_mean = [&](std::size_t g, double Cell::*field) {
    double s = 0.0;
    for (int t = 0; t < trials; ++t) s += cell_stats[g * trials + t].*field;
    return s / trials;
  };
  auto find_gamma = [&](double target) -> std::optional<std::size_t> {
    for (std::size_t g = 0; g < cells; ++g)
      if (std::abs(static_cast<double>(dims[g]) / n - target) < 1e-12) return g;
    return std::nullopt;
  };
  if (auto g = find_gamma(0.5)) {
    const double target = sigma2 / 0.5;
    const double m = cell_mean(*g, &Cell::loss);
    res.checks.push_back(detail::make_check("ols_branch_gamma_0.5", target, m,
                                            detail::within_rel(m, target, 0.05)));
  }
  if (auto g = find_gamma(2.0)) {
    const double ws = wnorm * wnorm;
    const double loss_target = 0.5 * ws + sigma2 * 2.0;
    const double norm_target = ws / 2.0 + sigma2;
    const double m = cell_mean(*g, &Cell::loss);
    const double ns = cell_mean(*g, &Cell::norm_sq);
    res.checks.push_back(detail::make_check("interp_loss_gamma_2", loss_target, m,
                                            detail::within_rel(m, loss_target, 0.05)));
    res.checks.push_back(detail::make_check("interp_norm_gamma_2", norm_target, ns,
                                            detail::within_rel(ns, norm_target, 0.05)));
  }
  if (auto g = find_gamma(8.0)) {
    const double m = cell_mean(*g, &Cell::loss);
    const double b = cell_mean(*g, &Cell::bd2);
    res.checks.push_back(detail::make_check("interp_below_null_gamma_8", null_loss, m, m < null_loss));
    res.checks.push_back(detail::make_check("bd2_tracks_loss_gamma_8", m, b,
                                            detail::within_rel(b, m, 0.10)));
  }
  if (ols_count > 0)
    res.checks.push_back(coverage_check("ols_interval_coverage", ols_fail, ols_count, delta));
  if (interp_count > 0)
    res.checks.push_back(
        coverage_check("isotropic_interp_interval_coverage", interp_fail, interp_count, delta));
  res.runtime_seconds = clock.seconds();
  return res;
}

ScenarioResult run_ols_moments(const ResolvedConfig& cfg) {
  detail::Stopwatch clock;
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("seed"));
  const double delta = cfg.get_real("delta");
  const int trials = static_cast<int>(cfg.get_int("trials"));
  const double sigma2 = cfg.get_real("sigma2");
  const double wnorm = cfg.get_real("wstar_norm");
  const double K = cfg.get_real("highprob_K");
  const auto cell_text = cfg.get_text_list("cells");
  detail::require_positive(trials, "trials");
  if (cell_text.empty()) throw ConfigError("config error: key 'cells' must be nonempty");

  ScenarioResult res{"ols-moments", ResultTable("ols-moments"), {}, 0.0};
  int lc_fail = 0, lc_count = 0, oi_fail = 0, oi_count = 0;
  for (std::size_t ci = 0; ci < cell_text.size(); ++ci) {
    const auto [n, d] = parse_cell(cell_text[ci]);
    const double x = static_cast<double>(ci);
    res.table.add_metadata("cell_" + std::to_string(ci), cell_text[ci]);
    if (d < 1 || d > n - 4) {
      res.table.add_metadata("cell_" + std::to_string(ci) + "_excluded", "true");
      continue;
    }
    const double gamma = static_cast<double>(d) / n;
    auto problem = isotropic_problem(d, sigma2, wnorm);
    std::vector<double> loss(trials), train(trials);
    ResultTable cell_tab("ols-moments");
    detail::run_trials(trials, cell_tab, [&](int t, ResultTable& tab) {
      Dataset data = sample_dataset(problem, n,
                                    child_seed(trial_seed(seed, "ols-moments", t),
                                               fnv1a64(cell_text[ci])));
      const Predictor p = least_squares_minnorm(data);
      loss[t] = population_loss(p.w, *problem);
      train[t] = empirical_loss(p.w, data);
      tab.add(t, "cell", x, "loss", loss[t]);
      tab.add(t, "cell", x, "train", train[t]);
    });
    res.table.append(cell_tab);

    const SampleSummary s = summarize(loss);
    const Moments exact = ols_exact_moments(n, d, sigma2);
    const BoundReport hp = ols_highprob_deviation(std::min(gamma, 0.999), n, delta, sigma2, K);
    int hp_fail = 0;
    for (double l : loss) hp_fail += (l - sigma2 > hp.value) ? 1 : 0;
    const double p_fast = ols_fast_rate_p(d, delta);
    bool lc_used = false;
    double lc_value = kNaN;
    if (p_fast / n <= 0.999) {
      const BoundReport lc = low_complexity_bound(p_fast, n, sigma2, delta);
      if (lc.applicable) {
        lc_used = true;
        lc_value = lc.value;
        for (double l : loss) lc_fail += (l - sigma2 > lc.value) ? 1 : 0;
        lc_count += trials;
      }
    }
    const BoundReport oi_probe = ols_interval(0.0, gamma, n, delta, sigma2);
    if (oi_probe.applicable) {
      for (int t = 0; t < trials; ++t) {
        const BoundReport oi = ols_interval(train[t], gamma, n, delta, sigma2);
        const double root = std::sqrt(std::max(loss[t] - sigma2, 0.0));
        oi_fail += (root > oi.value || root < *oi.lower) ? 1 : 0;
      }
      oi_count += trials;
    }
    std::vector<double> chi(trials);
    for (int t = 0; t < trials; ++t) chi[t] = n * train[t] / sigma2;
    const SampleSummary sc = summarize(chi);

    res.table.add(-1, "cell", x, "sample_mean", s.mean);
    res.table.add(-1, "cell", x, "sample_var", s.variance);
    res.table.add(-1, "cell", x, "exact_mean", exact.mean);
    res.table.add(-1, "cell", x, "exact_var", exact.variance);
    res.table.add(-1, "cell", x, "highprob_bound", sigma2 + hp.value);
    res.table.add(-1, "cell", x, "highprob_summarized", sigma2 + hp.extra("summarized"));
    res.table.add(-1, "cell", x, "highprob_coverage", 1.0 - static_cast<double>(hp_fail) / trials);
    if (lc_used) res.table.add(-1, "cell", x, "fast_rate_bound", sigma2 + lc_value);
    res.table.add(-1, "cell", x, "n", n);
    res.table.add(-1, "cell", x, "d", d);

    const std::string tag = std::to_string(n) + "x" + std::to_string(d);
    res.checks.push_back(detail::make_check("mean_within_4se_" + tag, exact.mean, s.mean,
                                            std::abs(s.mean - exact.mean) <= 4.0 * s.std_error));
    const double limit = sigma2 / (1.0 - gamma);
    res.checks.push_back(detail::make_check("mean_near_proportional_limit_" + tag, limit, s.mean,
                                            detail::within_rel(s.mean, limit, 0.02)));
    res.checks.push_back(detail::make_check(
        "variance_within_4se_" + tag, exact.variance, s.variance,
        std::abs(s.variance - exact.variance) <= 4.0 * s.var_std_error));
    res.checks.push_back(detail::make_check("train_chi2_mean_" + tag, n - d, sc.mean,
                                            std::abs(sc.mean - (n - d)) <= 3.0 * sc.std_error));
    res.checks.push_back(coverage_check("highprob_coverage_" + tag, hp_fail, trials, delta));
    if (n == 1000 && d == 500) {
      const double target = 2.0 * gamma / std::pow(1.0 - gamma, 3);
      const double scaled = n * s.variance / (sigma2 * sigma2);
      res.checks.push_back(detail::make_check("proportional_dispersion_1000x500", target, scaled,
                                              detail::within_rel(scaled, target, 0.25)));
    }
  }
  if (oi_count > 0)
    res.checks.push_back(coverage_check("ols_interval_coverage", oi_fail, oi_count, delta));
  if (lc_count > 0)
    res.checks.push_back(coverage_check("low_complexity_coverage", lc_fail, lc_count, delta));
  res.table.sort_rows();
  res.runtime_seconds = clock.seconds();
  return res;
}

ScenarioResult run_near_erm_gap(const ResolvedConfig& cfg) {
  detail::Stopwatch clock;
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("seed"));
  const double gamma = cfg.get_real("gamma");
  const double c = cfg.get_real("c");
  const double sigma2 = cfg.get_real("sigma2");
  const double wnorm = cfg.get_real("wstar_norm");
  const auto n_list = cfg.get_int_list("n_list");
  const long long base = cfg.get_int("trials_base");
  detail::require_positive(base, "trials_base");
  if (n_list.empty()) throw ConfigError("config error: key 'n_list' must be nonempty");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("config error: near-erm needs 0 < gamma < 1");
  const long long n_min = *std::min_element(n_list.begin(), n_list.end());
  if (n_min < 2) throw ConfigError("config error: n_list entries must be >= 2");

  ScenarioResult res{"near-erm", ResultTable("near-erm"), {}, 0.0};
  std::vector<double> ns, train_means, pop_means;
  for (long long nl : n_list) {
    const int n = static_cast<int>(nl);
    const int d = std::max(1, static_cast<int>(std::lround(gamma * n)));
    if (d >= n) throw ConfigError("config error: near-erm needs d < n");
    const int trials = static_cast<int>(std::max<long long>(1, base * n_min / nl));
    auto problem = isotropic_problem(d, sigma2, wnorm);
    std::vector<double> tg(trials), pg(trials);
    ResultTable part("near-erm");
    detail::run_trials(trials, part, [&](int t, ResultTable& tab) {
      Dataset data = sample_dataset(problem, n, child_seed(trial_seed(seed, "near-erm", t), n));
      const NearErmResult r = near_erm_family(data, *problem, c);
      tg[t] = r.train_gap;
      pg[t] = r.pop_gap;
      tab.add(t, "n", n, "train_gap", r.train_gap);
      tab.add(t, "n", n, "pop_gap", r.pop_gap);
      tab.add(t, "n", n, "alpha", r.alpha);
    });
    res.table.append(part);
    ns.push_back(n);
    train_means.push_back(mean_of(tg));
    pop_means.push_back(mean_of(pg));
    res.table.add(-1, "n", n, "mean_train_gap", train_means.back());
    res.table.add(-1, "n", n, "mean_pop_gap", pop_means.back());
    res.table.add(-1, "n", n, "trials", trials);
  }
  res.table.sort_rows();

  const bool positive = std::all_of(train_means.begin(), train_means.end(), [](double v) { return v > 0; }) &&
                        std::all_of(pop_means.begin(), pop_means.end(), [](double v) { return v > 0; });
  if (c == 0.0) {
    double worst = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i)
      worst = std::max({worst, std::abs(train_means[i]), std::abs(pop_means[i])});
    res.checks.push_back(detail::make_check("zero_gap_at_c_0", 0.0, worst, worst <= 1e-12));
  } else if (ns.size() >= 2 && positive) {
    const double ps = loglog_fit(ns, pop_means).slope;
    const double ts = loglog_fit(ns, train_means).slope;
    res.table.add_metadata("pop_gap_slope", format_double(ps));
    res.table.add_metadata("train_gap_slope", format_double(ts));
    res.checks.push_back(detail::make_check("pop_gap_slope", -0.25, ps, ps >= -0.35 && ps <= -0.15));
    res.checks.push_back(detail::make_check("train_gap_slope", -0.5, ts, ts >= -0.6 && ts <= -0.4));
  } else {
    res.checks.push_back(detail::make_check("gap_slopes_defined", 1.0, 0.0, false));
  }
  res.runtime_seconds = clock.seconds();
  return res;
}

}  // namespace optrate
