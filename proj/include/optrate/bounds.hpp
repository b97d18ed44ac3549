#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "optrate/covariance.hpp"
#include "optrate/widths.hpp"

namespace optrate {

struct BoundTerm {
  std::string name;
  double value = 0.0;
};

// value = multiplier * (sum of terms), squared when `squared` is set.
struct BoundReport {
  double value = 0.0;
  std::optional<double> lower;
  double multiplier = 1.0;
  bool squared = false;
  std::vector<BoundTerm> terms;
  std::vector<BoundTerm> extras;  // reference quantities, not part of value
  double delta = 0.05;
  bool applicable = true;
  std::vector<std::string> flags;

  double recombine() const;
  double term(const std::string& name) const;
  double extra(const std::string& name) const;
  bool has_flag(const std::string& flag) const;
};

// (1 + beta1)(sqrt(emp_loss) + F / sqrt(n))^2
BoundReport optimistic_bound(double emp_loss, double F_value, double n, double delta);

// (1 + beta2)(sqrt(emp) + alpha W/sqrt(n) + [||w*||_{Sigma2} + alpha rad] sqrt(2 log(32/delta)/n))^2
// `width_sigma2` is W_{Sigma2}(K) for the set K itself.
BoundReport cov_split_bound(double emp_loss, const ConstraintSet& set, const CovSplit& split,
                            const Eigen::VectorXd& wstar, double n, double delta, double alpha,
                            const WidthEstimate& width_sigma2);

// C_{Sigma2}(||w||) for the unit ball of the chosen norm; `unit_width` is W_{Sigma2}(K_1).
double C_functional(double norm_w, const ConstraintSet& unit_ball, const CovSplit& split,
                    const Eigen::VectorXd& wstar, double n, double delta,
                    const WidthEstimate& unit_width);

// (sigma + 5(eps + beta2) max(sigma, 1))^2
double flatness_bound(double sigma, double eps, double beta2);

// `dual_norm_mean` is E||x||_* for x ~ N(0, Sigma2); `unit_radius` is sup_{||u||<=1} ||u||_{Sigma2}.
BoundReport optimally_tuned_bound(double sigma, double wstar_norm, const CovSplit& split, double n,
                                  double delta, const WidthEstimate& dual_norm_mean,
                                  double unit_radius);
BoundReport optimally_tuned_bound_ridge(double sigma, double wstar_norm_l2, const CovSplit& split,
                                        double n, double delta);

// Excess risk bound 8(beta1 + eps) sigma^2 + 512(1 + eps)(max_diag/phi2) sigma^2 k log(32d/delta)/n.
BoundReport lasso_compat_bound(double sigma, double eps, double beta1, double phi2, int k, int d,
                               double n, double delta, double max_diag);

// Two-sided interval on sqrt(L - sigma^2) for any w, d/n = gamma < 1, with the
// explicit constants eps = sqrt(log(36/delta)/n), beta1 = 14 eps. Not applicable
// (value inf) when (1 + 14 eps)^{-1} <= (sqrt(gamma) + 2 eps)^2.
BoundReport ols_interval(double emp_loss, double gamma, double n, double delta, double sigma2);
// Simplified form |sqrt(L - s2) - sqrt(gamma Lhat)/(1 - gamma)| <= eps sqrt(Lhat)
//   + sqrt((Lhat/(1 - gamma) - s2)/(1 - gamma) + eps Lhat) for a caller-chosen eps.
BoundReport ols_interval_eps(double emp_loss, double gamma, double sigma2, double eps,
                             double delta = 0.05);

// Two-sided interval on L(w) for interpolators under Sigma = I, gamma > 1.
BoundReport isotropic_interp_interval(double w_norm2_sq, double wstar_norm_sq, double sigma2,
                                      double gamma, double eps);

// (1 + eps)(||w*||^2 / gamma + sigma^2 / (gamma - 1))
double isotropic_minnorm_norm_bound(double gamma, double sigma2, double wstar_norm_sq, double eps);

BoundReport lasso_isotropic_interval(double emp_loss, double gamma_cone, double n, double delta,
                                     double sigma2);

// Excess risk <= [(1 + 2 beta1) sigma rho / (1 - sqrt(1 + 2 beta1) rho)^2]^2, rho = sqrt(p/n),
// reported as (1 + tau) sigma^2 p / n.
BoundReport low_complexity_bound(double p, double n, double sigma2, double delta);
double ols_fast_rate_p(int d, double delta);
double lasso_fast_rate_p(int k, int d, double delta, double max_diag, double phi2);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};
// Mean and variance of the population loss of OLS.
Moments ols_exact_moments(int n, int d, double sigma2);

// Bound on L(w_OLS) - sigma^2 with eps = 2 sqrt(log(32/delta)/n); extras carry the
// summarised form K sigma^2 sqrt(gamma log(36/delta)/n).
BoundReport ols_highprob_deviation(double gamma, double n, double delta, double sigma2,
                                   double K = 20.0);

}  // namespace optrate
