#include "optrate/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "optrate/model.hpp"

namespace optrate {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_nonneg(double v, const char* what) {
  if (!(v >= 0.0)) throw std::invalid_argument(std::string(what) + " must be nonnegative");
}

void require_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
}

double find_named(const std::vector<BoundTerm>& v, const std::string& name) {
  for (const auto& t : v)
    if (t.name == name) return t.value;
  throw std::out_of_range("no bound term named " + name);
}

}  // namespace

double BoundReport::recombine() const {
  double s = 0.0;
  for (const auto& t : terms) s += t.value;
  return multiplier * (squared ? s * s : s);
}

double BoundReport::term(const std::string& name) const { return find_named(terms, name); }
double BoundReport::extra(const std::string& name) const { return find_named(extras, name); }

bool BoundReport::has_flag(const std::string& flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

BoundReport optimistic_bound(double emp_loss, double F_value, double n, double delta) {
  require_nonneg(emp_loss, "empirical loss");
  require_nonneg(F_value, "complexity value");
  require_delta(delta);
  ConfidenceConstants cc = confidence_constants(n, delta, 0);
  BoundReport b;
  b.delta = delta;
  b.squared = true;
  b.multiplier = 1.0 + cc.beta1;
  b.terms = {{"empirical", std::sqrt(emp_loss)}, {"complexity", F_value / std::sqrt(n)}};
  b.value = b.recombine();
  b.applicable = cc.beta1_applicable;
  if (!b.applicable) b.flags.push_back("sample_size_below_threshold");
  return b;
}

BoundReport cov_split_bound(double emp_loss, const ConstraintSet& set, const CovSplit& split,
                            const Eigen::VectorXd& wstar, double n, double delta, double alpha,
                            const WidthEstimate& width_sigma2) {
  require_nonneg(emp_loss, "empirical loss");
  require_nonneg(alpha, "dilation");
  require_delta(delta);
  if (!set.bounded()) throw std::invalid_argument("cov_split_bound needs a bounded set");
  if (!(width_sigma2.value >= 0.0) || !std::isfinite(width_sigma2.value))
    throw std::invalid_argument("cov_split_bound: width must be finite and nonnegative");
  ConfidenceConstants cc = confidence_constants(n, delta, split.rank1);
  const double conf = std::sqrt(2.0 * std::log(32.0 / delta) / n);
  const double wstar_s2 = std::sqrt(split.sigma2.quad_form(wstar));
  const double rad = radius_under_cov(split.sigma2, set);
  BoundReport b;
  b.delta = delta;
  b.squared = true;
  b.multiplier = 1.0 + cc.beta2;
  b.terms = {{"empirical", std::sqrt(emp_loss)},
             {"width", alpha * width_sigma2.value / std::sqrt(n)},
             {"signal_confidence", wstar_s2 * conf},
             {"radius_confidence", alpha * rad * conf}};
  b.value = b.recombine();
  b.applicable = cc.beta2_applicable;
  if (!b.applicable) b.flags.push_back("beta2_above_one");
  b.extras = {{"beta2", cc.beta2}, {"width_std_error", alpha * width_sigma2.std_error / std::sqrt(n)}};
  return b;
}

double C_functional(double norm_w, const ConstraintSet& unit_ball, const CovSplit& split,
                    const Eigen::VectorXd& wstar, double n, double delta,
                    const WidthEstimate& unit_width) {
  require_nonneg(norm_w, "norm");
  require_delta(delta);
  const double conf = std::sqrt(2.0 * std::log(32.0 / delta) / n);
  const double wstar_s2 = std::sqrt(split.sigma2.quad_form(wstar));
  const double rad = radius_under_cov(split.sigma2, unit_ball);
  return norm_w * unit_width.value / std::sqrt(n) + (wstar_s2 + norm_w * rad) * conf;
}

double flatness_bound(double sigma, double eps, double beta2) {
  require_nonneg(sigma, "sigma");
  require_nonneg(eps, "eps");
  require_nonneg(beta2, "beta2");
  double v = sigma + 5.0 * (eps + beta2) * std::max(sigma, 1.0);
  return v * v;
}

BoundReport optimally_tuned_bound(double sigma, double wstar_norm, const CovSplit& split, double n,
                                  double delta, const WidthEstimate& dual_norm_mean,
                                  double unit_radius) {
  require_nonneg(sigma, "sigma");
  require_nonneg(wstar_norm, "norm of w*");
  require_delta(delta);
  ConfidenceConstants cc = confidence_constants(n, delta, split.rank1);
  BoundReport b;
  b.delta = delta;
  b.squared = true;
  b.multiplier = 1.0 + 3.0 * cc.beta2;
  b.terms = {{"noise", sigma},
             {"width", wstar_norm * dual_norm_mean.value / std::sqrt(n)},
             {"radius_confidence",
              wstar_norm * unit_radius * std::sqrt(8.0 * std::log(36.0 / delta)) / std::sqrt(n)}};
  b.value = b.recombine();
  b.applicable = cc.beta2_applicable;
  if (!b.applicable) b.flags.push_back("beta2_above_one");
  return b;
}

BoundReport optimally_tuned_bound_ridge(double sigma, double wstar_norm_l2, const CovSplit& split,
                                        double n, double delta) {
  require_nonneg(sigma, "sigma");
  require_nonneg(wstar_norm_l2, "norm of w*");
  require_delta(delta);
  ConfidenceConstants cc = confidence_constants(n, delta, split.rank1);
  BoundReport b;
  b.delta = delta;
  b.squared = true;
  b.multiplier = 1.0 + 3.0 * cc.beta2;
  b.terms = {{"noise", sigma},
             {"complexity", std::sqrt(32.0 * std::log(36.0 / delta) * wstar_norm_l2 *
                                      wstar_norm_l2 * split.sigma2.trace() / n)}};
  b.value = b.recombine();
  b.applicable = cc.beta2_applicable;
  if (!b.applicable) b.flags.push_back("beta2_above_one");
  return b;
}

BoundReport lasso_compat_bound(double sigma, double eps, double beta1, double phi2, int k, int d,
                               double n, double delta, double max_diag) {
  require_nonneg(sigma, "sigma");
  require_nonneg(eps, "eps");
  require_nonneg(beta1, "beta1");
  require_delta(delta);
  if (!(phi2 > 0.0)) throw std::invalid_argument("compatibility constant must be positive");
  if (k < 0 || d < 1) throw std::invalid_argument("lasso_compat_bound: bad k or d");
  const double s2 = sigma * sigma;
  const double logt = std::log(32.0 * d / delta);
  BoundReport b;
  b.delta = delta;
  b.terms = {{"confidence", 8.0 * (beta1 + eps) * s2},
             {"complexity", 512.0 * (1.0 + eps) * (max_diag / phi2) * s2 * k * logt / n}};
  b.value = b.recombine();
  b.applicable = n > 32.0 * max_diag / phi2 * k * logt;
  if (!b.applicable) b.flags.push_back("sample_size_below_threshold");
  return b;
}

BoundReport ols_interval_eps(double emp_loss, double gamma, double sigma2, double eps,
                             double delta) {
  require_nonneg(emp_loss, "empirical loss");
  require_nonneg(sigma2, "sigma^2");
  require_nonneg(eps, "eps");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("ols_interval needs 0 <= gamma < 1");
  const double center = std::sqrt(gamma * emp_loss) / (1.0 - gamma);
  double radicand = (emp_loss / (1.0 - gamma) - sigma2) / (1.0 - gamma) + eps * emp_loss;
  BoundReport b;
  b.delta = delta;
  if (radicand < 0.0) {
    if (radicand < -1e-12 * std::max(1.0, sigma2)) b.flags.push_back("radicand_clamped");
    radicand = 0.0;
  }
  const double half = eps * std::sqrt(emp_loss) + std::sqrt(radicand);
  b.terms = {{"center", center}, {"half_width", half}};
  b.value = b.recombine();
  b.lower = std::max(0.0, center - half);
  return b;
}

BoundReport ols_interval(double emp_loss, double gamma, double n, double delta, double sigma2) {
  require_delta(delta);
  require_nonneg(emp_loss, "empirical loss");
  require_nonneg(sigma2, "sigma^2");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("ols_interval needs 0 <= gamma < 1");
  // Explicit chain: (1 + 14 eps)^{-1} L <= (sqrt(Lhat) + (sqrt(gamma) + 2 eps) sqrt(L - sigma^2))^2,
  // solved as a quadratic in sqrt(L - sigma^2).
  const double eps = std::sqrt(std::log(36.0 / delta) / n);
  const double inv = 1.0 / (1.0 + 14.0 * eps);
  const double a = std::sqrt(gamma) + 2.0 * eps;
  const double D = inv - a * a;
  BoundReport b;
  b.delta = delta;
  b.extras = {{"eps", eps}, {"denominator", D}};
  if (!(D > 0.0)) {
    b.applicable = false;
    b.flags.push_back("nonpositive_denominator");
    b.terms = {{"center", kInf}, {"half_width", 0.0}};
    b.value = kInf;
    b.lower = 0.0;
    return b;
  }
  const double center = a * std::sqrt(emp_loss) / D;
  double radicand = inv / D * (emp_loss / D - sigma2);
  if (radicand < 0.0) {
    b.flags.push_back("radicand_clamped");
    radicand = 0.0;
  }
  const double half = std::sqrt(radicand);
  b.terms = {{"center", center}, {"half_width", half}};
  b.value = b.recombine();
  b.lower = std::max(0.0, center - half);
  return b;
}

BoundReport isotropic_interp_interval(double w_norm2_sq, double wstar_norm_sq, double sigma2,
                                      double gamma, double eps) {
  require_nonneg(w_norm2_sq, "||w||^2");
  require_nonneg(wstar_norm_sq, "||w*||^2");
  require_nonneg(sigma2, "sigma^2");
  require_nonneg(eps, "eps");
  if (!(gamma > 1.0)) throw std::invalid_argument("isotropic_interp_interval needs gamma > 1");
  const double center =
      sigma2 + w_norm2_sq + (1.0 - 2.0 / ((1.0 + eps) * gamma)) * wstar_norm_sq;
  double radicand = (1.0 - 1.0 / gamma) * (w_norm2_sq - wstar_norm_sq / gamma) - sigma2 / gamma +
                    3.0 * eps * w_norm2_sq;
  BoundReport b;
  if (radicand < 0.0) {
    b.applicable = false;
    b.flags.push_back("negative_radicand");
    radicand = 0.0;
  }
  const double half = 2.0 * std::sqrt(wstar_norm_sq) * std::sqrt(radicand);
  b.terms = {{"center", center}, {"half_width", half}};
  b.value = b.recombine();
  b.lower = center - half;
  return b;
}

double isotropic_minnorm_norm_bound(double gamma, double sigma2, double wstar_norm_sq, double eps) {
  if (!(gamma > 1.0)) throw std::invalid_argument("isotropic_minnorm_norm_bound needs gamma > 1");
  return (1.0 + eps) * (wstar_norm_sq / gamma + sigma2 / (gamma - 1.0));
}

BoundReport lasso_isotropic_interval(double emp_loss, double gamma_cone, double n, double delta,
                                     double sigma2) {
  require_delta(delta);
  const double eps = std::sqrt(std::log(36.0 / delta) / n);
  BoundReport b;
  if (gamma_cone < 1.0) {
    b = ols_interval_eps(emp_loss, std::max(gamma_cone, 0.0), sigma2, eps, delta);
  } else {
    b.terms = {{"center", kInf}, {"half_width", 0.0}};
    b.value = kInf;
    b.lower = 0.0;
  }
  b.applicable = gamma_cone + 2.0 * eps / std::sqrt(n) < 1.0;
  if (!b.applicable) b.flags.push_back("cone_width_too_large");
  b.extras = {{"asymptotic_excess",
               gamma_cone < 1.0 ? gamma_cone / (1.0 - gamma_cone) * sigma2 : kInf}};
  return b;
}

BoundReport low_complexity_bound(double p, double n, double sigma2, double delta) {
  require_nonneg(p, "p");
  require_nonneg(sigma2, "sigma^2");
  require_delta(delta);
  if (p / n > 0.999) throw std::invalid_argument("low_complexity_bound needs p/n <= 0.999");
  const double beta1 = beta1_cap(n, delta);
  const double rho = std::sqrt(p / n);
  const double s = std::sqrt(1.0 + 2.0 * beta1);
  const double leading = sigma2 * p / n;
  BoundReport b;
  b.delta = delta;
  double tau;
  if (s * rho >= 1.0) {
    b.applicable = false;
    b.flags.push_back("rho_too_large");
    tau = kInf;
  } else {
    double q = 1.0 - s * rho;
    tau = (1.0 + 2.0 * beta1) * (1.0 + 2.0 * beta1) / (q * q * q * q) - 1.0;
  }
  b.terms = {{"leading", leading}, {"tau_term", leading == 0.0 ? 0.0 : tau * leading}};
  b.value = b.recombine();
  b.extras = {{"tau", tau}, {"beta1", beta1}};
  return b;
}

double ols_fast_rate_p(int d, double delta) {
  double v = std::sqrt(static_cast<double>(d)) + 2.0 * std::sqrt(std::log(36.0 / delta));
  return v * v;
}

double lasso_fast_rate_p(int k, int d, double delta, double max_diag, double phi2) {
  return 8.0 * k * max_diag * std::log(16.0 * d / delta) / phi2;
}

Moments ols_exact_moments(int n, int d, double sigma2) {
  if (d < 0) throw std::invalid_argument("ols_exact_moments needs d >= 0");
  if (n - d - 3 <= 0) throw std::invalid_argument("ols_exact_moments needs n - d - 3 > 0");
  const double a = n - d - 1.0;
  Moments m;
  m.mean = sigma2 * (n - 1.0) / a;
  m.variance = 2.0 * sigma2 * sigma2 * d * (n - 1.0) / (a * a * (n - d - 3.0));
  return m;
}

BoundReport ols_highprob_deviation(double gamma, double n, double delta, double sigma2,
                                   double K) {
  require_delta(delta);
  require_nonneg(sigma2, "sigma^2");
  if (!(gamma >= 0.0 && gamma <= 0.999))
    throw std::invalid_argument("ols_highprob_deviation needs 0 <= gamma <= 0.999");
  const double eps = 2.0 * std::sqrt(std::log(32.0 / delta) / n);
  const double a = std::sqrt(gamma) + eps;
  const double inner = (1.0 - eps) * (1.0 - eps) - a * a;
  const double limit = sigma2 * gamma / (1.0 - gamma);
  BoundReport b;
  b.delta = delta;
  double excess = kInf;
  if (inner > 0.0 && 1.0 - eps > 0.0) {
    double den = std::sqrt(inner) - eps;
    if (den > 0.0) excess = sigma2 * a * a / (den * den);
  }
  if (!std::isfinite(excess)) {
    b.applicable = false;
    b.flags.push_back("nonpositive_denominator");
  }
  b.terms = {{"limit", limit}, {"deviation", excess - limit}};
  b.value = excess;
  b.extras = {{"summarized", K * sigma2 * std::sqrt(gamma * std::log(36.0 / delta) / n)},
              {"eps", eps}};
  return b;
}

}  // namespace optrate
