#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "optrate/covariance.hpp"
#include "optrate/rng.hpp"

namespace optrate {

struct ConstraintSet {
  enum class Kind { full_space, l2_ball, l1_ball };
  Kind kind = Kind::full_space;
  double radius = 0.0;

  static ConstraintSet full_space() { return {Kind::full_space, 0.0}; }
  static ConstraintSet l2_ball(double B);
  static ConstraintSet l1_ball(double B);
  bool bounded() const { return kind != Kind::full_space; }
  // norm defining the ball (inf for full space)
  double norm_of(const Eigen::VectorXd& w) const;
  std::string name() const;
};

enum class WidthMethod { closed_form, monte_carlo, unbounded };
std::string to_string(WidthMethod m);

struct WidthEstimate {
  double value = 0.0;
  double std_error = 0.0;
  WidthMethod method = WidthMethod::closed_form;
  int mc_samples = 0;
};

// Samples per independently seeded Monte Carlo block.
constexpr int kMcBlock = 256;

// Mean and standard error of draw(rng) over `samples` draws, in seeded
// blocks gathered in index order.
WidthEstimate monte_carlo_mean(int samples, std::uint64_t seed,
                               const std::function<double(Rng&)>& draw);

// W_Sigma(K) = B E||x||_* for a centred norm ball, x ~ N(0, Sigma).
WidthEstimate width_ball(const CovarianceSpec& cov, const ConstraintSet& set, int mc_samples,
                         std::uint64_t seed);

// Deterministic bracket [sqrt(Tr) - sqrt(||Sigma||), sqrt(Tr)] for E||x||_2.
std::pair<double, double> l2_norm_mean_bracket(const CovarianceSpec& cov);

// sup over u in K of ||u||_Sigma.
double radius_under_cov(const CovarianceSpec& cov, const ConstraintSet& set);

// sqrt(2) Gamma((k+1)/2) / Gamma(k/2)
double chi_mean(int k);

// Width of K_r = {||w||_2 <= B, ||w - w*||_2 <= r} under Sigma = I_d. The
// Gaussian is reduced to (a, b) = (component along w*, norm of the rest) and
// each per-sample supremum is a linear maximisation over two discs. Samples
// are drawn once so every (B, r, ||w*||) query shares them.
class IsotropicBallLocalWidth {
 public:
  IsotropicBallLocalWidth(int d, int mc_samples, std::uint64_t seed);
  // -inf when K_r is empty.
  WidthEstimate operator()(double B, double r, double wstar_norm) const;
  int dim() const { return d_; }
  int samples() const { return static_cast<int>(a_.size()); }

  static double sample_sup(double a, double b, double B, double r, double c);

 private:
  int d_;
  std::vector<double> a_;
  std::vector<double> b_;
};

WidthEstimate localized_width_l2_isotropic(double B, double r, double wstar_norm, int d,
                                           int mc_samples, std::uint64_t seed);

// K = R^d: W_Sigma(K_r) = r E||P H||_2 with P the projector onto span(Sigma).
// Closed form when mc_samples == 0.
WidthEstimate localized_width_full_space(const CovarianceSpec& cov, double r, int mc_samples,
                                         std::uint64_t seed);

struct CompatibilityOptions {
  double tolerance = 1e-10;
  int max_iterations = 20000;
};

// phi^2(Sigma, S) = min over the cone ||u_{S^c}||_1 <= ||u_S||_1 of |S| u^T Sigma u / ||u_S||_1^2.
double compatibility_constant(const CovarianceSpec& cov, const std::vector<int>& S,
                              const CompatibilityOptions& opts = {});
// lambda_min(Sigma) <= phi^2(Sigma, S); usable at any scale.
double compatibility_lower_bound(const CovarianceSpec& cov);

Eigen::VectorXd project_simplex(const Eigen::VectorXd& v, double total = 1.0);

struct DescentConeEstimate {
  WidthEstimate stat_dim;  // E min_lambda dist^2(g, lambda * subdifferential)
  double omega = 0.0;      // sqrt of the statistical dimension
};

double descent_cone_distance_sq(const Eigen::VectorXd& g, const Eigen::VectorXd& wstar);
DescentConeEstimate l1_descent_cone_dimension(const Eigen::VectorXd& wstar, int mc_samples,
                                              std::uint64_t seed);

struct PsiValue {
  double value = 0.0;
  double tau = 0.0;
};

// inf over tau >= 0 of rho (1 + tau^2) + (1 - rho) 2[(1 + tau^2) Q(tau) - tau phi(tau)]
PsiValue statistical_dimension_psi_detail(double rho);
double statistical_dimension_psi(double rho);

}  // namespace optrate
