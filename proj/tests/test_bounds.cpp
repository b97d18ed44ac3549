#include <gtest/gtest.h>

#include <cmath>

#include "optrate/bounds.hpp"
#include "optrate/model.hpp"
#include "optrate/stats.hpp"
#include "oracles.hpp"

using namespace optrate;

TEST(Bounds, OptimisticBoundTerms) {
  BoundReport b = optimistic_bound(0.25, 3.0, 10000, 0.05);
  const double beta1 = 14.0 * std::sqrt(std::log(240.0) / 1e4);
  EXPECT_NEAR(b.value, (1 + beta1) * std::pow(0.5 + 0.03, 2), 1e-12);
  EXPECT_NEAR(b.value, b.recombine(), 1e-15);
  EXPECT_TRUE(b.applicable);
}

TEST(Bounds, CovSplitBoundIsotropicTail) {
  auto cov = CovarianceSpec::spiked(Eigen::VectorXd::Constant(1, 1.0), 0.1, 99);
  CovSplit split = split_covariance(cov, 1);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(100);
  w(0) = 1.0;
  WidthEstimate W{0.1 * chi_mean(99), 0.0, WidthMethod::closed_form, 0};
  BoundReport b = cov_split_bound(0.2, ConstraintSet::l2_ball(1.0), split, w, 1e5, 0.05, 2.0, W);
  const double conf = std::sqrt(2 * std::log(32 / 0.05) / 1e5);
  const double inner = std::sqrt(0.2) + 2.0 * W.value / std::sqrt(1e5) + 2.0 * 0.1 * conf;
  EXPECT_NEAR(b.term("signal_confidence"), 0.0, 1e-15);
  EXPECT_NEAR(b.value, (1 + b.extra("beta2")) * inner * inner, 1e-12);
  EXPECT_NEAR(C_functional(2.0, ConstraintSet::l2_ball(1.0), split, w, 1e5, 0.05, W),
              inner - std::sqrt(0.2), 1e-12);
  EXPECT_THROW(cov_split_bound(0.2, ConstraintSet::full_space(), split, w, 1e5, 0.05, 1.0, W),
               std::invalid_argument);
}

TEST(Bounds, FlatnessBound) {
  EXPECT_NEAR(flatness_bound(0.5, 0.1, 0.2), std::pow(0.5 + 5 * 0.3, 2), 1e-12);
  EXPECT_NEAR(flatness_bound(2.0, 0.0, 0.0), 4.0, 1e-12);
}

TEST(Bounds, LassoCompatBound) {
  BoundReport zero = lasso_compat_bound(0.0, 0.1, 0.2, 1.0, 5, 200, 4000, 0.05, 1.0);
  EXPECT_EQ(zero.value, 0.0);
  BoundReport a = lasso_compat_bound(1.0, 0.1, 0.2, 1.0, 5, 200, 4000, 0.05, 1.0);
  BoundReport b = lasso_compat_bound(1.0, 0.1, 0.2, 1.0, 10, 200, 4000, 0.05, 1.0);
  EXPECT_NEAR(b.term("complexity"), 2.0 * a.term("complexity"), 1e-12);
  EXPECT_NEAR(a.term("confidence"), 8 * 0.3, 1e-12);
  EXPECT_NEAR(a.term("complexity"), 512 * 1.1 * 5 * std::log(32 * 200 / 0.05) / 4000, 1e-12);
  EXPECT_TRUE(a.applicable);
  EXPECT_FALSE(lasso_compat_bound(1.0, 0.1, 0.2, 1.0, 5, 200, 1000, 0.05, 1.0).applicable);
}

TEST(Bounds, OlsIntervalLimits) {
  // At the typical training error the simplified interval collapses onto the limit.
  const double gamma = 0.5, s2 = 0.5;
  BoundReport b = ols_interval_eps(s2 * (1 - gamma), gamma, s2, 0.0);
  EXPECT_NEAR(b.value, std::sqrt(s2 * gamma / (1 - gamma)), 1e-12);
  EXPECT_NEAR(*b.lower, b.value, 1e-12);
  // gamma = 0: centre 0.
  BoundReport g0 = ols_interval_eps(1.0, 0.0, 1.0, 0.0);
  EXPECT_NEAR(g0.term("center"), 0.0, 1e-15);
  // Explicit form: brackets the limit and closes at rate sqrt(eps), inapplicable for small n.
  const double limit = std::sqrt(s2 * gamma / (1 - gamma));
  for (double n : {1e8, 1e12, 1e18}) {
    BoundReport big = ols_interval(s2 * (1 - gamma), gamma, n, 0.05, s2);
    ASSERT_TRUE(big.applicable);
    EXPECT_LE(*big.lower, limit);
    EXPECT_GE(big.value, limit);
    EXPECT_LE(big.value - *big.lower, 20.0 * std::sqrt(big.extra("eps")));
  }
  EXPECT_NEAR(ols_interval(s2 * (1 - gamma), gamma, 1e18, 0.05, s2).value, limit, 1e-3);
  EXPECT_FALSE(ols_interval(0.25, 0.5, 1024, 0.05, s2).applicable);
}

TEST(Bounds, IsotropicInterpolationLimit) {
  const double gamma = 2.0, s2 = 0.5, ws = 4.0;
  const double norm_sq = ws / gamma + s2 / (gamma - 1);
  EXPECT_NEAR(norm_sq, 2.5, 1e-15);
  BoundReport b = isotropic_interp_interval(norm_sq, ws, s2, gamma, 0.0);
  EXPECT_NEAR(b.value, 3.0, 1e-12);
  EXPECT_NEAR(*b.lower, 3.0, 1e-12);
  BoundReport b8 = isotropic_interp_interval(ws / 8 + s2 / 7, ws, s2, 8.0, 0.0);
  EXPECT_NEAR(b8.value, 3.5 + 0.5 * 8 / 7, 1e-12);
  EXPECT_NEAR(isotropic_minnorm_norm_bound(gamma, s2, ws, 0.0), 2.5, 1e-15);
  BoundReport neg = isotropic_interp_interval(0.1, ws, s2, gamma, 0.0);
  EXPECT_FALSE(neg.applicable);
  EXPECT_TRUE(neg.has_flag("negative_radicand"));
}

TEST(Bounds, LowComplexity) {
  EXPECT_EQ(low_complexity_bound(0.0, 1000, 1.0, 0.05).value, 0.0);
  EXPECT_THROW(low_complexity_bound(1000, 1000, 1.0, 0.05), std::invalid_argument);
  for (double n : {1e5, 1e7, 1e9}) {
    BoundReport b = low_complexity_bound(0.01 * n, n, 1.0, 0.05);
    EXPECT_LE(b.extra("tau"), 2.0);
    EXPECT_GE(b.extra("tau"), 0.0);
  }
  EXPECT_LT(low_complexity_bound(1e3, 1e12, 1.0, 0.05).extra("tau"), 1e-3);
  EXPECT_NEAR(ols_fast_rate_p(10, 0.05), std::pow(std::sqrt(10.0) + 2 * std::sqrt(std::log(720.0)), 2),
              1e-12);
  EXPECT_NEAR(lasso_fast_rate_p(5, 200, 0.05, 1.0, 1.0), 40 * std::log(64000.0), 1e-10);
}

TEST(Bounds, OlsExactMoments) {
  Moments m = ols_exact_moments(100, 10, 1.0);
  EXPECT_NEAR(m.mean, 99.0 / 89.0, 1e-15);
  EXPECT_NEAR(m.variance, 2.0 * 10 * 99 / (89.0 * 89.0 * 87.0), 1e-15);
  EXPECT_NEAR(m.mean, oracle::ols_mean_via_inverse_wishart(100, 10, 1.0), 1e-12);
  Moments z = ols_exact_moments(10, 0, 2.0);
  EXPECT_NEAR(z.mean, 2.0, 1e-15);
  EXPECT_EQ(z.variance, 0.0);
  EXPECT_THROW(ols_exact_moments(10, 7, 1.0), std::invalid_argument);
  for (double n : {1e3, 1e4, 1e5}) {
    Moments p = ols_exact_moments(static_cast<int>(n), static_cast<int>(n / 2), 1.0);
    EXPECT_NEAR(n * p.variance, 8.0, 8.0 * 20.0 / n);
  }
}

TEST(Bounds, OlsHighProb) {
  BoundReport b = ols_highprob_deviation(0.5, 4096, 0.05, 1.0);
  EXPECT_TRUE(b.applicable);
  EXPECT_GT(b.value, 1.0);
  EXPECT_NEAR(b.term("limit"), 1.0, 1e-15);
  BoundReport huge = ols_highprob_deviation(0.5, 1e14, 0.05, 1.0);
  EXPECT_NEAR(huge.value, 1.0, 1e-5);
  EXPECT_FALSE(ols_highprob_deviation(0.9, 200, 0.05, 1.0).applicable);
  EXPECT_THROW(ols_highprob_deviation(0.9995, 1e4, 0.05, 1.0), std::invalid_argument);
}

TEST(Stats, BinomialCriticalMatchesDirectSum) {
  for (int n : {50, 200, 2000}) {
    const int c = binomial_upper_critical(n, 0.05, 1e-3);
    EXPECT_LE(oracle::binomial_tail_sum(n, 0.05, c), 1e-3);
    EXPECT_GT(oracle::binomial_tail_sum(n, 0.05, c - 1), 1e-3);
    EXPECT_NEAR(binomial_upper_tail(n, 0.05, c), oracle::binomial_tail_sum(n, 0.05, c), 1e-12);
  }
}

TEST(Stats, SummaryAndFits) {
  SampleSummary s = summarize({1.0, 2.0, 3.0, 4.0});
  EXPECT_NEAR(s.mean, 2.5, 1e-15);
  EXPECT_NEAR(s.variance, 5.0 / 3.0, 1e-15);
  EXPECT_NEAR(s.std_error, std::sqrt(5.0 / 12.0), 1e-15);
  LinearFit f = loglog_fit({1, 2, 4, 8}, {3, 3 / std::sqrt(2.0), 1.5, 1.5 / std::sqrt(2.0)});
  EXPECT_NEAR(f.slope, -0.5, 1e-12);
  EXPECT_NEAR(normal_cdf(0.0), 0.5, 1e-15);
  EXPECT_NEAR(normal_tail(1.959963984540054), 0.025, 1e-12);
}
