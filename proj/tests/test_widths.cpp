#include <gtest/gtest.h>

#include <cmath>

#include "optrate/rng.hpp"
#include "optrate/widths.hpp"
#include "oracles.hpp"

using namespace optrate;

TEST(Widths, ChiMeanMatchesQuadrature) {
  for (int k : {1, 2, 5, 30, 1000}) EXPECT_NEAR(chi_mean(k), oracle::chi_mean_quadrature(k), 1e-8);
}

TEST(Widths, BallWidthClosedFormAndHomogeneity) {
  auto cov = CovarianceSpec::isotropic(50);
  WidthEstimate w1 = width_ball(cov, ConstraintSet::l2_ball(1.0), 20000, 3);
  WidthEstimate w3 = width_ball(cov, ConstraintSet::l2_ball(3.0), 20000, 3);
  EXPECT_NEAR(w3.value, 3.0 * w1.value, 1e-12);
  EXPECT_NEAR(w1.value, chi_mean(50), 4.0 * w1.std_error + 1e-12);
  WidthEstimate full = width_ball(cov, ConstraintSet::full_space(), 100, 3);
  EXPECT_TRUE(std::isinf(full.value));
  EXPECT_EQ(full.method, WidthMethod::unbounded);
}

TEST(Widths, L1BallWidthIsExpectedMaxAbs) {
  auto cov = CovarianceSpec::isotropic(2);
  WidthEstimate w = width_ball(cov, ConstraintSet::l1_ball(1.0), 40000, 5);
  // E max(|g1|, |g2|) = 2 / sqrt(pi)
  EXPECT_NEAR(w.value, 2.0 / std::sqrt(M_PI), 4.0 * w.std_error);
}

TEST(Widths, SpikedNormBracket) {
  auto cov = CovarianceSpec::spiked(Eigen::VectorXd::Constant(1, 1.0), 0.05, 999);
  WidthEstimate w = width_ball(cov, ConstraintSet::l2_ball(1.0), 4000, 6);
  auto [lo, hi] = l2_norm_mean_bracket(cov);
  EXPECT_GE(w.value + 4.0 * w.std_error, lo);
  EXPECT_LE(w.value - 4.0 * w.std_error, hi);
}

TEST(Widths, LocalWidthNestingAndLimits) {
  IsotropicBallLocalWidth lw(20, 2000, 7);
  const double B = 2.0, c = 1.0;
  double prev = 0.0;
  for (double r : {0.0, 0.2, 0.5, 1.0, 2.0, 3.0}) {
    const double v = lw(B, r, c).value;
    EXPECT_GE(v, prev - 1e-12);  // K_r grows with r
    prev = v;
  }
  EXPECT_NEAR(lw(B, 0.0, c).value, 0.0, 1e-12);
  EXPECT_TRUE(std::isinf(lw(0.5, 0.1, c).value));  // empty intersection
  // r >= B + ||w*||: K_r is the whole ball, width B E||g|| - <g, w*> averages to B E||g||.
  const WidthEstimate whole = lw(B, B + c + 1.0, c);
  EXPECT_NEAR(whole.value, B * chi_mean(20), 4.0 * whole.std_error + 0.02);
  // Subset of R^d localisation.
  auto cov = CovarianceSpec::isotropic(20);
  EXPECT_LE(lw(B, 0.7, c).value, localized_width_full_space(cov, 0.7, 0, 0).value + 1e-12);
}

TEST(Widths, SampleSupBruteForce) {
  Rng rng(8);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int rep = 0; rep < 200; ++rep) {
    const double a = u(rng), b = std::abs(u(rng)), B = 1.5, r = 0.3 + std::abs(u(rng)), c = 1.0;
    double best = -1e300;
    const int m = 600;
    for (int i = 0; i <= m; ++i) {
      for (int j = 0; j <= m; ++j) {
        const double x = -B + 2.0 * B * i / m, y = B * j / m;
        if (x * x + y * y > B * B || (x - c) * (x - c) + y * y > r * r) continue;
        best = std::max(best, a * (x - c) + b * y);
      }
    }
    if (best < -1e299) continue;
    const double got = IsotropicBallLocalWidth::sample_sup(a, b, B, r, c);
    EXPECT_GE(got, best - 1e-12);
    EXPECT_LE(got, best + 0.02 * (std::abs(a) + b));
  }
}

TEST(Widths, CompatibilityMatchesGrid) {
  Eigen::MatrixXd S2(2, 2);
  S2 << 1.0, 0.5, 0.5, 1.0;
  EXPECT_NEAR(compatibility_constant(CovarianceSpec::dense(S2), {0}), 0.75, 1e-6);
  EXPECT_NEAR(compatibility_constant(CovarianceSpec::dense(S2), {0}),
              oracle::compatibility_grid(S2, {0}, 2000), 1e-3);
  Eigen::MatrixXd S3(3, 3);
  S3 << 1.0, 0.3, -0.2, 0.3, 1.5, 0.4, -0.2, 0.4, 0.8;
  for (const std::vector<int>& S : {std::vector<int>{0}, std::vector<int>{2}, std::vector<int>{0, 1}}) {
    EXPECT_NEAR(compatibility_constant(CovarianceSpec::dense(S3), S),
                oracle::compatibility_grid(S3, S, 400), 1e-3);
  }
  EXPECT_NEAR(compatibility_constant(CovarianceSpec::isotropic(3), {1}), 1.0, 1e-6);
  EXPECT_NEAR(compatibility_constant(CovarianceSpec::isotropic(4, 2.5), {0, 3}), 2.5, 1e-6);
  EXPECT_THROW(compatibility_constant(CovarianceSpec::isotropic(20), std::vector<int>(13, 0)),
               std::invalid_argument);
}

TEST(Widths, PsiMatchesQuadratureAndKnownValues) {
  EXPECT_NEAR(statistical_dimension_psi(0.025), 0.1231240, 1e-6);
  EXPECT_NEAR(statistical_dimension_psi(0.05), 0.2038999, 1e-6);
  EXPECT_NEAR(statistical_dimension_psi(0.5), 0.8312999, 1e-6);
  for (double rho : {0.01, 0.1, 0.3, 0.7, 0.95})
    EXPECT_NEAR(statistical_dimension_psi(rho), oracle::psi_quadrature(rho), 1e-7);
  EXPECT_EQ(statistical_dimension_psi(0.0), 0.0);
  EXPECT_EQ(statistical_dimension_psi(1.0), 1.0);
}

TEST(Widths, PsiMidpointConcavity) {
  std::vector<double> v;
  for (int i = 0; i < 50; ++i) v.push_back(statistical_dimension_psi(i / 49.0));
  for (int i = 1; i + 1 < 50; ++i) EXPECT_GE(v[i], 0.5 * (v[i - 1] + v[i + 1]) - 1e-9);
}

TEST(Widths, DescentConeDimension) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(200);
  for (int i = 0; i < 10; ++i) w(i) = (i % 2) ? -1.0 : 1.0;
  DescentConeEstimate e = l1_descent_cone_dimension(w, 4000, 9);
  const double ref = 200 * statistical_dimension_psi(0.05);
  EXPECT_LE(e.stat_dim.value, ref + 3.0 * e.stat_dim.std_error);
  EXPECT_GE(e.stat_dim.value, ref - 2.0 * std::sqrt(20.0) - 3.0 * e.stat_dim.std_error);
  DescentConeEstimate e2 = l1_descent_cone_dimension(2.0 * w, 4000, 9);
  EXPECT_EQ(e.stat_dim.value, e2.stat_dim.value);
  EXPECT_NEAR(e.omega, std::sqrt(e.stat_dim.value), 1e-12);
}

TEST(Widths, DescentConeDistanceMatchesLambdaScan) {
  Rng rng(10);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(8);
  w(0) = 2.0;
  w(3) = -1.0;
  for (int rep = 0; rep < 50; ++rep) {
    Eigen::VectorXd g(8);
    fill_normal(g, rng);
    double best = 1e300;
    for (int i = 0; i <= 40000; ++i) {
      const double lam = 8.0 * i / 40000;
      double s = 0.0;
      for (int j = 0; j < 8; ++j) {
        if (w(j) != 0.0) s += std::pow(g(j) - lam * (w(j) > 0 ? 1.0 : -1.0), 2);
        else s += std::pow(std::max(std::abs(g(j)) - lam, 0.0), 2);
      }
      best = std::min(best, s);
    }
    EXPECT_NEAR(descent_cone_distance_sq(g, w), best, 1e-6);
  }
}
