#include "optrate/summary_functional.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "optrate/stats.hpp"

namespace optrate {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

SummaryFunctional SummaryFunctional::with_sign(Sign s) const {
  SummaryFunctional f = *this;
  f.sign = s;
  return f;
}

SummaryFunctional SummaryFunctional::with_delta(double d) const {
  SummaryFunctional f = *this;
  f.delta = d;
  return f;
}

double psi_eval(const SummaryFunctional& f, double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("psi_eval needs r >= 0");
  if (!f.width) throw std::invalid_argument("summary functional has no width oracle");
  if (!(f.delta > 0.0 && f.delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  const double w = f.width(r).value;
  if (w == -kInf) return kInf;  // K_r empty
  const double base = std::sqrt(f.sigma * f.sigma + r * r);
  const double conf = f.C * r * std::sqrt(std::log(2.0 / f.delta) / f.n);
  double v;
  if (f.sign == SummaryFunctional::Sign::plus) {
    v = (1.0 + f.beta1) * base - w / std::sqrt(f.n) + conf;
  } else {
    v = (1.0 - f.beta1) * base - w / std::sqrt(f.n) - conf;
  }
  return std::max(0.0, v);
}

PsiMinimum psi_minimize(const SummaryFunctional& f, double r_max) {
  if (!(r_max > 0.0)) throw std::invalid_argument("psi_minimize needs r_max > 0");
  auto g = [&](double r) { return psi_eval(f, r); };
  double r = golden_section_min(g, 0.0, r_max, 1e-6 * r_max);
  double mu = g(r);
  double f0 = g(0.0), fmax = g(r_max);
  if (f0 <= mu) {
    r = 0.0;
    mu = f0;
  }
  if (fmax < mu) {
    r = r_max;
    mu = fmax;
  }
  // leftmost point of the (convex) minimising set
  const double slack = 1e-12 * std::max(1.0, std::abs(mu));
  if (r > 0.0 && g(0.0) <= mu + slack) {
    r = 0.0;
  } else if (r > 0.0) {
    double lo = 0.0, hi = r;
    while (hi - lo > 1e-9 * r_max) {
      double mid = 0.5 * (lo + hi);
      if (g(mid) <= mu + slack) hi = mid; else lo = mid;
    }
    r = hi;
  }
  return {r, mu};
}

Sublevel psi_sublevel(const SummaryFunctional& f_minus, double mu, double tau, double r_max) {
  if (!(r_max > 0.0)) throw std::invalid_argument("psi_sublevel needs r_max > 0");
  SummaryFunctional fd = f_minus.with_sign(SummaryFunctional::Sign::minus);
  SummaryFunctional ft = fd.with_delta(tau);
  auto gd = [&](double r) { return psi_eval(fd, r); };
  auto gt = [&](double r) { return psi_eval(ft, r); };
  const double tol = 1e-9 * std::max(1.0, r_max);
  Sublevel out;

  PsiMinimum md = psi_minimize(fd, r_max);
  if (md.mu_star > mu) {
    out.empty = true;
    return out;
  }
  // right endpoint of {psi_minus_delta <= mu}
  if (gd(r_max) <= mu) {
    out.r_plus = r_max;
  } else {
    double lo = md.r_star, hi = r_max;
    while (hi - lo > tol) {
      double mid = 0.5 * (lo + hi);
      if (gd(mid) <= mu) lo = mid; else hi = mid;
    }
    out.r_plus = lo;
  }
  // left endpoint of {psi_minus_tau <= mu}
  PsiMinimum mt = psi_minimize(ft, r_max);
  if (mt.mu_star > mu) {
    out.empty = true;
    return out;
  }
  if (gt(0.0) <= mu) {
    out.r_minus = 0.0;
  } else {
    double lo = 0.0, hi = mt.r_star;
    while (hi - lo > tol) {
      double mid = 0.5 * (lo + hi);
      if (gt(mid) <= mu) hi = mid; else lo = mid;
    }
    out.r_minus = hi;
  }
  return out;
}

double local_tau(double delta, double mu, double mu_star, double r_star) {
  if (!(r_star > 0.0)) return delta;
  double m = std::ceil((mu - mu_star) / r_star);
  return delta / std::max(1.0, m);
}

}  // namespace optrate
