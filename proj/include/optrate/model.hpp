#pragma once

#include <cstdint>
#include <memory>

#include <Eigen/Dense>

#include "optrate/covariance.hpp"

namespace optrate {

struct RegressionProblem {
  double sigma = 0.0;  // noise standard deviation
  Eigen::VectorXd w_star;
  CovarianceSpec cov;

  RegressionProblem() = default;
  RegressionProblem(double sigma_, Eigen::VectorXd w_star_, CovarianceSpec cov_);

  int dim() const { return cov.dim(); }
  double noise_variance() const { return sigma * sigma; }
  void validate() const;
};

struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd Y;
  std::uint64_t seed = 0;
  std::shared_ptr<const RegressionProblem> problem;

  int n() const { return static_cast<int>(X.rows()); }
  int d() const { return static_cast<int>(X.cols()); }
};

// Rows of X are N(0, Sigma); Y = X w* + xi with xi ~ N(0, sigma^2).
Dataset sample_dataset(const RegressionProblem& problem, int n, std::uint64_t seed);
Dataset sample_dataset(std::shared_ptr<const RegressionProblem> problem, int n,
                       std::uint64_t seed);

double empirical_loss(const Eigen::VectorXd& w, const Dataset& data);
double empirical_loss(const Eigen::VectorXd& w, const Eigen::MatrixXd& X,
                      const Eigen::VectorXd& Y);
double population_loss(const Eigen::VectorXd& w, const RegressionProblem& problem);
// ||w - w*||_Sigma^2
double excess_risk(const Eigen::VectorXd& w, const RegressionProblem& problem);

struct ConfidenceConstants {
  double beta1 = 0.0;
  double beta2 = 0.0;
  double eps = 0.0;
  bool beta1_applicable = true;  // n >= 196 log(12/delta)
  bool beta2_applicable = true;  // beta2 <= 1
};

ConfidenceConstants confidence_constants(double n, double delta, int rank1);

double beta1_cap(double n, double delta);
double beta2_cap(double n, double delta, int rank1);

}  // namespace optrate
