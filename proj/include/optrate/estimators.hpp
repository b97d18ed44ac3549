#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "optrate/model.hpp"

namespace optrate {

struct Diagnostics {
  double objective = 0.0;
  int iterations = 0;
  double kkt_residual = 0.0;
  bool converged = true;
};

struct Predictor {
  Eigen::VectorXd w;
  std::string estimator_id;
  std::optional<double> hyperparam;
  Diagnostics diagnostics;
};

// Minimum-norm least squares X^+ Y.
Predictor least_squares_minnorm(const Dataset& data);
Predictor least_squares_minnorm(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y);

// One eigendecomposition of the smaller Gram matrix serves every ridge
// parameter: w(lambda) = (X^T X + n lambda I)^{-1} X^T Y.
class RidgeFactor {
 public:
  RidgeFactor(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y);

  Eigen::VectorXd solve(double lambda) const;
  double norm_sq(double lambda) const;
  // lambda -> 0+ limit (pseudoinverse on the numerically nonzero spectrum).
  Eigen::VectorXd minnorm() const;
  double minnorm_norm_sq() const;
  // Gram eigenvalues of X^T X (or X X^T), ascending.
  const Eigen::VectorXd& gram_eigenvalues() const { return evals_; }
  int n() const { return n_; }
  int d() const { return d_; }

 private:
  int n_, d_;
  bool primal_;  // d <= n: factor X^T X
  Eigen::MatrixXd vecs_;  // V (primal) or X^T U (dual)
  Eigen::VectorXd evals_;
  Eigen::VectorXd proj_;  // V^T X^T Y (primal) or U^T Y (dual)
  double cutoff_;
};

std::vector<Predictor> ridge_path(const Dataset& data, const std::vector<double>& lambdas);

// argmin over ||w||_2 <= R of the empirical loss, minimum norm among minimizers.
Predictor l2_constrained_erm(const Dataset& data, double R);

// Euclidean projection onto {||u||_1 <= B}.
Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double B);

struct L1SolverOptions {
  double tolerance = 1e-8;
  int max_iterations = 50000;
};

// argmin over ||w||_1 <= B of the empirical loss, by projected gradient.
Predictor l1_constrained_erm(const Dataset& data, double B, const L1SolverOptions& opts = {});

struct NearErmResult {
  Predictor predictor;
  Predictor ols;
  double alpha = 1.0;
  double train_gap = 0.0;  // empirical loss of w_alpha minus that of OLS
  double pop_gap = 0.0;    // population loss of w_alpha minus that of OLS
};

// w_alpha = w* + alpha (w_OLS - w*), alpha = 1 + sqrt(c / (4 gamma)) n^{-1/4}.
NearErmResult near_erm_family(const Dataset& data, const RegressionProblem& problem, double c);

// Largest eigenvalue of a symmetric PSD matrix by power iteration.
double power_iteration_norm(const Eigen::MatrixXd& G, double tol = 1e-12, int max_iter = 10000);

}  // namespace optrate
