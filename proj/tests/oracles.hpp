#pragma once

// Independent reference computations used by the tests: brute force,
// quadrature and grid search, sharing no code with the library.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// Projection onto {||u||_1 <= B} by enumerating every support and sign pattern.
inline Eigen::VectorXd l1_projection_brute(const Eigen::VectorXd& v, double B) {
  const int d = static_cast<int>(v.size());
  if (v.lpNorm<1>() <= B) return v;
  Eigen::VectorXd best = Eigen::VectorXd::Zero(d);
  double best_dist = (v - best).squaredNorm();
  for (int mask = 1; mask < (1 << d); ++mask) {
    std::vector<int> S;
    for (int i = 0; i < d; ++i)
      if (mask & (1 << i)) S.push_back(i);
    const int k = static_cast<int>(S.size());
    for (int signs = 0; signs < (1 << k); ++signs) {
      Eigen::VectorXd s = Eigen::VectorXd::Zero(d);
      for (int j = 0; j < k; ++j) s(S[j]) = (signs & (1 << j)) ? -1.0 : 1.0;
      const double shift = (s.dot(v) - B) / k;
      Eigen::VectorXd u = Eigen::VectorXd::Zero(d);
      bool ok = true;
      for (int i : S) {
        u(i) = v(i) - shift * s(i);
        if (u(i) * s(i) < 0.0) ok = false;
      }
      if (!ok) continue;
      const double dist = (v - u).squaredNorm();
      if (dist < best_dist) {
        best_dist = dist;
        best = u;
      }
    }
  }
  return best;
}

// phi^2(Sigma, S) by a grid over the cone normalised to ||u_S||_1 = 1.
// Supports d <= 3 with |S| in {1, 2}.
inline double compatibility_grid(const Eigen::MatrixXd& sigma, const std::vector<int>& S, int steps) {
  const int d = static_cast<int>(sigma.rows());
  std::vector<int> off;
  for (int i = 0; i < d; ++i)
    if (std::find(S.begin(), S.end(), i) == S.end()) off.push_back(i);
  const int k = static_cast<int>(S.size());
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd u(d);
  auto eval = [&](void) { best = std::min(best, k * u.dot(sigma * u)); };
  // on-support directions: (s1 p, s2 (1 - p)) or (s1)
  std::vector<std::vector<double>> on;
  if (k == 1) {
    on = {{1.0}, {-1.0}};
  } else {
    for (int i = 0; i <= steps; ++i) {
      const double p = static_cast<double>(i) / steps;
      for (double s2 : {1.0, -1.0}) on.push_back({p, s2 * (1.0 - p)});
    }
  }
  for (const auto& us : on) {
    for (int j = 0; j < k; ++j) u(S[j]) = us[j];
    if (off.empty()) {
      eval();
    } else if (off.size() == 1) {
      for (int i = 0; i <= 2 * steps; ++i) {
        u(off[0]) = -1.0 + static_cast<double>(i) / steps;
        eval();
      }
    } else {
      for (int i = 0; i <= 2 * steps; ++i) {
        const double a = -1.0 + static_cast<double>(i) / steps;
        const double rem = 1.0 - std::abs(a);
        const int m = std::max(1, static_cast<int>(std::lround(rem * steps)));
        for (int j = 0; j <= 2 * m; ++j) {
          u(off[0]) = a;
          u(off[1]) = rem * (-1.0 + static_cast<double>(j) / m);
          eval();
        }
      }
    }
  }
  return best;
}

// Composite Simpson rule on [a, b] with `m` (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int m) {
  const double h = (b - a) / m;
  double s = f(a) + f(b);
  for (int i = 1; i < m; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// psi(rho) with the integral done by quadrature and tau by a dense grid plus refinement.
inline double psi_quadrature(double rho) {
  const double c = std::sqrt(2.0 / M_PI);
  auto objective = [&](double tau) {
    const double integral = simpson(
        [&](double u) { return (u - tau) * (u - tau) * std::exp(-u * u / 2.0); }, tau, tau + 40.0, 4000);
    return rho * (1.0 + tau * tau) + (1.0 - rho) * c * integral;
  };
  double best_tau = 0.0, best = objective(0.0);
  for (int i = 1; i <= 600; ++i) {
    const double tau = 0.01 * i;
    const double v = objective(tau);
    if (v < best) {
      best = v;
      best_tau = tau;
    }
  }
  double lo = std::max(0.0, best_tau - 0.01), hi = best_tau + 0.01;
  for (int it = 0; it < 100; ++it) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (objective(m1) < objective(m2)) hi = m2; else lo = m1;
  }
  return objective(0.5 * (lo + hi));
}

// E sqrt(chi^2_k) by quadrature of the chi density.
inline double chi_mean_quadrature(int k) {
  const double logc = (1.0 - k / 2.0) * std::log(2.0) - std::lgamma(k / 2.0);
  auto dens = [&](double x) {
    if (x <= 0.0) return 0.0;
    return x * std::exp(logc + (k - 1.0) * std::log(x) - x * x / 2.0);
  };
  const double mode = std::sqrt(std::max(k - 1.0, 0.0));
  return simpson(dens, std::max(0.0, mode - 40.0), mode + 40.0, 20000);
}

// P(Binomial(n, p) > c) by direct summation.
inline double binomial_tail_sum(int n, double p, int c) {
  long double total = 0.0L;
  for (int j = c + 1; j <= n; ++j) {
    long double logt = std::lgamma(n + 1.0L) - std::lgamma(j + 1.0L) - std::lgamma(n - j + 1.0L) +
                       j * std::log(static_cast<long double>(p)) +
                       (n - j) * std::log1p(-static_cast<long double>(p));
    total += std::exp(logt);
  }
  return static_cast<double>(total);
}

// Mean of the OLS population loss via E tr((X^T X)^{-1}) = d / (n - d - 1).
inline double ols_mean_via_inverse_wishart(int n, int d, double sigma2) {
  return sigma2 * (1.0 + static_cast<double>(d) / (n - d - 1.0));
}

}  // namespace oracle
