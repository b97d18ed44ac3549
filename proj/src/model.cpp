#include "optrate/model.hpp"

#include <cmath>
#include <stdexcept>

#include "optrate/rng.hpp"

namespace optrate {

RegressionProblem::RegressionProblem(double sigma_, Eigen::VectorXd w_star_, CovarianceSpec cov_)
    : sigma(sigma_), w_star(std::move(w_star_)), cov(std::move(cov_)) {
  validate();
}

void RegressionProblem::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("noise level sigma must be finite and nonnegative");
  if (w_star.size() != cov.dim())
    throw std::invalid_argument("w_star has length " + std::to_string(w_star.size()) +
                                " but the covariance has dimension " + std::to_string(cov.dim()));
  if (!w_star.allFinite()) throw std::invalid_argument("w_star has non-finite entries");
}

Dataset sample_dataset(std::shared_ptr<const RegressionProblem> problem, int n,
                       std::uint64_t seed) {
  if (!problem) throw std::invalid_argument("sample_dataset: null problem");
  problem->validate();
  if (n < 1) throw std::invalid_argument("sample_dataset: need n >= 1");
  Rng rng(splitmix64(seed));
  Eigen::MatrixXd Z(n, problem->dim());
  fill_normal(Z, rng);
  Eigen::VectorXd xi(n);
  fill_normal(xi, rng);
  Dataset data;
  data.X = problem->cov.transform_rows(Z);
  data.Y.noalias() = data.X * problem->w_star;
  data.Y += problem->sigma * xi;
  data.seed = seed;
  data.problem = std::move(problem);
  return data;
}

Dataset sample_dataset(const RegressionProblem& problem, int n, std::uint64_t seed) {
  return sample_dataset(std::make_shared<const RegressionProblem>(problem), n, seed);
}

double empirical_loss(const Eigen::VectorXd& w, const Eigen::MatrixXd& X,
                      const Eigen::VectorXd& Y) {
  if (w.size() != X.cols()) throw std::invalid_argument("empirical_loss: dimension mismatch");
  if (X.rows() == 0) throw std::invalid_argument("empirical_loss: empty dataset");
  return (Y - X * w).squaredNorm() / static_cast<double>(X.rows());
}

double empirical_loss(const Eigen::VectorXd& w, const Dataset& data) {
  return empirical_loss(w, data.X, data.Y);
}

double excess_risk(const Eigen::VectorXd& w, const RegressionProblem& problem) {
  if (w.size() != problem.dim()) throw std::invalid_argument("population_loss: dimension mismatch");
  return problem.cov.quad_form(w - problem.w_star);
}

double population_loss(const Eigen::VectorXd& w, const RegressionProblem& problem) {
  return problem.noise_variance() + excess_risk(w, problem);
}

double beta1_cap(double n, double delta) { return 14.0 * std::sqrt(std::log(12.0 / delta) / n); }

double beta2_cap(double n, double delta, int rank1) {
  return 32.0 * (std::sqrt(std::log(1.0 / delta) / n) + std::sqrt(rank1 / n));
}

ConfidenceConstants confidence_constants(double n, double delta, int rank1) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (!(n >= 1.0)) throw std::invalid_argument("confidence_constants: need n >= 1");
  if (rank1 < 0) throw std::invalid_argument("confidence_constants: rank1 must be >= 0");
  ConfidenceConstants c;
  c.beta1 = beta1_cap(n, delta);
  c.beta2 = beta2_cap(n, delta, rank1);
  c.eps = std::sqrt(std::log(36.0 / delta) / n);
  c.beta1_applicable = n >= 196.0 * std::log(12.0 / delta);
  c.beta2_applicable = c.beta2 <= 1.0;
  return c;
}

}  // namespace optrate
