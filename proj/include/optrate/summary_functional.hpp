#pragma once

#include <cmath>
#include <functional>

#include "optrate/widths.hpp"

namespace optrate {

// psi_plus(r)  = max{0, (1 + beta1) sqrt(sigma^2 + r^2) - W(K_r)/sqrt(n) + C r sqrt(log(2/delta)/n)}
// psi_minus(r) = max{0, (1 - beta1) sqrt(sigma^2 + r^2) - W(K_r)/sqrt(n) - C r sqrt(log(2/delta)/n)}
// The width callback must be deterministic in r (frozen seed).
struct SummaryFunctional {
  enum class Sign { plus, minus };
  Sign sign = Sign::plus;
  double delta = 0.05;
  double sigma = 1.0;
  double n = 1.0;
  std::function<WidthEstimate(double)> width;
  double C = std::sqrt(2.0);
  double beta1 = 0.0;

  SummaryFunctional with_sign(Sign s) const;
  SummaryFunctional with_delta(double d) const;
};

double psi_eval(const SummaryFunctional& f, double r);

struct PsiMinimum {
  double r_star = 0.0;
  double mu_star = 0.0;
};

// Leftmost minimiser on [0, r_max].
PsiMinimum psi_minimize(const SummaryFunctional& f, double r_max);

struct Sublevel {
  bool empty = false;
  double r_minus = 0.0;
  double r_plus = 0.0;
};

// r_plus = sup{r : psi_minus_delta(r) <= mu}, r_minus = inf{r : psi_minus_tau(r) <= mu},
// both searched on [0, r_max] (r_plus = r_max when the sublevel set reaches it).
Sublevel psi_sublevel(const SummaryFunctional& f_minus, double mu, double tau, double r_max);

// delta / ceil((mu - mu*) / r*), or delta when r* = 0.
double local_tau(double delta, double mu, double mu_star, double r_star);

}  // namespace optrate
