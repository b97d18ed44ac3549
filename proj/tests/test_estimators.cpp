#include <gtest/gtest.h>

#include <cmath>

#include "optrate/estimators.hpp"
#include "optrate/rng.hpp"
#include "oracles.hpp"

using namespace optrate;

namespace {

Dataset make_data(int n, int d, double sigma, std::uint64_t seed) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  w(0) = 1.0;
  auto p = std::make_shared<const RegressionProblem>(sigma, w, CovarianceSpec::isotropic(d));
  return sample_dataset(p, n, seed);
}

Eigen::VectorXd pinv_solution(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y) {
  return X.completeOrthogonalDecomposition().pseudoInverse() * Y;
}

}  // namespace

TEST(Estimators, MinNormMatchesPseudoinverseBothRegimes) {
  for (auto [n, d] : {std::pair{40, 10}, std::pair{10, 40}}) {
    Dataset data = make_data(n, d, 0.5, 3);
    Predictor p = least_squares_minnorm(data);
    EXPECT_LT((p.w - pinv_solution(data.X, data.Y)).norm(), 1e-9);
    EXPECT_LT(p.diagnostics.kkt_residual, 1e-10);
  }
}

TEST(Estimators, MinNormRankDeficient) {
  Dataset data = make_data(30, 6, 0.3, 4);
  data.X.col(5) = data.X.col(4);
  Predictor p = least_squares_minnorm(data);
  EXPECT_LT((p.w - pinv_solution(data.X, data.Y)).norm(), 1e-8);
  EXPECT_NEAR(p.w(4), p.w(5), 1e-8);
}

TEST(Estimators, RidgeFactorMatchesDirectSolve) {
  for (auto [n, d] : {std::pair{50, 20}, std::pair{20, 50}}) {
    Dataset data = make_data(n, d, 0.5, 5);
    RidgeFactor f(data.X, data.Y);
    for (double lambda : {1e-6, 1e-2, 1.0, 100.0}) {
      Eigen::MatrixXd A = data.X.transpose() * data.X +
                          n * lambda * Eigen::MatrixXd::Identity(d, d);
      Eigen::VectorXd direct = A.ldlt().solve(data.X.transpose() * data.Y);
      EXPECT_LT((f.solve(lambda) - direct).norm(), 1e-8 * (1.0 + direct.norm()));
      EXPECT_NEAR(f.norm_sq(lambda), direct.squaredNorm(), 1e-8 * (1.0 + direct.squaredNorm()));
    }
    EXPECT_LT((f.minnorm() - pinv_solution(data.X, data.Y)).norm(), 1e-8);
  }
}

TEST(Estimators, L2ConstrainedErm) {
  Dataset data = make_data(30, 60, 0.5, 6);
  Predictor free = least_squares_minnorm(data);
  Predictor loose = l2_constrained_erm(data, 2.0 * free.w.norm());
  EXPECT_LT((loose.w - free.w).norm(), 1e-10);
  const double R = 0.3 * free.w.norm();
  Predictor tight = l2_constrained_erm(data, R);
  EXPECT_NEAR(tight.w.norm(), R, 1e-8 * R);
  // Any feasible point does no better.
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    Eigen::VectorXd u(60);
    fill_normal(u, rng);
    u *= R / u.norm();
    EXPECT_LE(empirical_loss(tight.w, data), empirical_loss(u, data) + 1e-12);
  }
}

TEST(Estimators, L1ProjectionMatchesBruteForce) {
  Rng rng(2);
  for (int d = 1; d <= 4; ++d) {
    for (int rep = 0; rep < 200; ++rep) {
      Eigen::VectorXd v(d);
      fill_normal(v, rng);
      const double B = 0.1 + 2.0 * std::abs(v(0));
      Eigen::VectorXd got = project_l1_ball(v, B);
      Eigen::VectorXd want = oracle::l1_projection_brute(v, B);
      EXPECT_LE((got - want).norm(), 1e-8);
    }
  }
}

TEST(Estimators, L1ErmNoiselessRecovery) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(40);
  w(0) = 1.0;
  w(1) = -1.0;
  auto p = std::make_shared<const RegressionProblem>(0.0, w, CovarianceSpec::isotropic(40));
  Dataset data = sample_dataset(p, 80, 8);
  L1SolverOptions opts;
  opts.tolerance = 1e-12;
  Predictor est = l1_constrained_erm(data, 2.0, opts);
  EXPECT_TRUE(est.diagnostics.converged);
  EXPECT_LT((est.w - w).norm(), 1e-6);
}

TEST(Estimators, PowerIterationMatchesEigen) {
  Dataset data = make_data(30, 12, 1.0, 9);
  Eigen::MatrixXd G = data.X.transpose() * data.X;
  const double want = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G).eigenvalues().maxCoeff();
  EXPECT_NEAR(power_iteration_norm(G), want, 1e-8 * want);
}

TEST(Estimators, NearErmFamily) {
  Dataset data = make_data(400, 200, 1.0, 10);
  RegressionProblem p = *data.problem;
  NearErmResult r = near_erm_family(data, p, 1.0);
  EXPECT_NEAR(r.alpha, 1.0 + std::sqrt(1.0 / 2.0) * std::pow(400.0, -0.25), 1e-12);
  EXPECT_GT(r.train_gap, 0.0);
  EXPECT_GT(r.pop_gap, 0.0);
  NearErmResult zero = near_erm_family(data, p, 0.0);
  EXPECT_NEAR(zero.train_gap, 0.0, 1e-14);
  EXPECT_NEAR(zero.pop_gap, 0.0, 1e-14);
  Dataset wide = make_data(10, 20, 1.0, 11);
  EXPECT_THROW(near_erm_family(wide, *wide.problem, 1.0), std::invalid_argument);
}
