#include "optrate/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace optrate {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

Eigen::MatrixXd gram_cols(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(X.cols(), X.cols());
  G.selfadjointView<Eigen::Lower>().rankUpdate(X.transpose());
  G.triangularView<Eigen::StrictlyUpper>() = G.transpose();
  return G;
}

Eigen::MatrixXd gram_rows(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(X.rows(), X.rows());
  K.selfadjointView<Eigen::Lower>().rankUpdate(X);
  K.triangularView<Eigen::StrictlyUpper>() = K.transpose();
  return K;
}

void finish_ls_diagnostics(Predictor& p, const Eigen::MatrixXd& X, const Eigen::VectorXd& Y) {
  Eigen::VectorXd r = Y - X * p.w;
  double n = static_cast<double>(X.rows());
  p.diagnostics.objective = r.squaredNorm() / n;
  p.diagnostics.kkt_residual = (X.transpose() * r).cwiseAbs().maxCoeff() / n;
  p.diagnostics.iterations = 0;
  p.diagnostics.converged = p.w.allFinite();
}

}  // namespace

Predictor least_squares_minnorm(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y) {
  if (X.rows() != Y.size()) throw std::invalid_argument("least_squares_minnorm: rows(X) != len(Y)");
  const Eigen::Index n = X.rows(), d = X.cols();
  Predictor p;
  p.estimator_id = "least_squares_minnorm";
  bool done = false;
  // Cholesky on the smaller Gram matrix when it is well conditioned.
  if (d <= n) {
    Eigen::LLT<Eigen::MatrixXd> llt(gram_cols(X));
    if (llt.info() == Eigen::Success && llt.rcond() > 1e-8) {
      p.w = llt.solve(X.transpose() * Y);
      done = p.w.allFinite();
    }
  } else {
    Eigen::LLT<Eigen::MatrixXd> llt(gram_rows(X));
    if (llt.info() == Eigen::Success && llt.rcond() > 1e-8) {
      p.w = X.transpose() * llt.solve(Y);
      done = p.w.allFinite();
    }
  }
  if (!done) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(static_cast<double>(std::max(n, d)) * kEps);
    p.w = svd.solve(Y);
  }
  finish_ls_diagnostics(p, X, Y);
  return p;
}

Predictor least_squares_minnorm(const Dataset& data) { return least_squares_minnorm(data.X, data.Y); }

RidgeFactor::RidgeFactor(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y)
    : n_(static_cast<int>(X.rows())), d_(static_cast<int>(X.cols())), primal_(X.cols() <= X.rows()) {
  if (X.rows() != Y.size()) throw std::invalid_argument("RidgeFactor: rows(X) != len(Y)");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(primal_ ? gram_cols(X) : gram_rows(X));
  if (es.info() != Eigen::Success) throw std::runtime_error("RidgeFactor: eigendecomposition failed");
  evals_ = es.eigenvalues().cwiseMax(0.0);
  if (primal_) {
    vecs_ = es.eigenvectors();
    proj_ = vecs_.transpose() * (X.transpose() * Y);
  } else {
    proj_ = es.eigenvectors().transpose() * Y;
    vecs_ = X.transpose() * es.eigenvectors();
  }
  double top = evals_.size() > 0 ? evals_.maxCoeff() : 0.0;
  cutoff_ = static_cast<double>(std::max(n_, d_)) * kEps * top;
}

Eigen::VectorXd RidgeFactor::solve(double lambda) const {
  if (!(lambda > 0.0)) throw std::invalid_argument("ridge parameter must be positive");
  Eigen::VectorXd denom = evals_.array() + n_ * lambda;
  return vecs_ * proj_.cwiseQuotient(denom);
}

double RidgeFactor::norm_sq(double lambda) const {
  if (!(lambda > 0.0)) throw std::invalid_argument("ridge parameter must be positive");
  Eigen::ArrayXd denom = evals_.array() + n_ * lambda;
  if (primal_) return (proj_.array().square() / denom.square()).sum();
  return (evals_.array() * proj_.array().square() / denom.square()).sum();
}

Eigen::VectorXd RidgeFactor::minnorm() const {
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(evals_.size());
  for (Eigen::Index i = 0; i < evals_.size(); ++i)
    if (evals_(i) > cutoff_) coef(i) = proj_(i) / evals_(i);
  return vecs_ * coef;
}

double RidgeFactor::minnorm_norm_sq() const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < evals_.size(); ++i) {
    if (evals_(i) <= cutoff_) continue;
    s += primal_ ? proj_(i) * proj_(i) / (evals_(i) * evals_(i)) : proj_(i) * proj_(i) / evals_(i);
  }
  return s;
}

std::vector<Predictor> ridge_path(const Dataset& data, const std::vector<double>& lambdas) {
  for (double l : lambdas)
    if (!(l > 0.0)) throw std::invalid_argument("ridge_path: every lambda must be positive");
  RidgeFactor factor(data.X, data.Y);
  std::vector<Predictor> out;
  out.reserve(lambdas.size());
  const double n = data.n();
  for (double l : lambdas) {
    Predictor p;
    p.estimator_id = "ridge";
    p.hyperparam = l;
    p.w = factor.solve(l);
    Eigen::VectorXd r = data.Y - data.X * p.w;
    p.diagnostics.objective = r.squaredNorm() / n + l * p.w.squaredNorm();
    p.diagnostics.kkt_residual = (-data.X.transpose() * r / n + l * p.w).cwiseAbs().maxCoeff();
    out.push_back(std::move(p));
  }
  return out;
}

Predictor l2_constrained_erm(const Dataset& data, double R) {
  if (!(R >= 0.0)) throw std::invalid_argument("l2_constrained_erm: R must be >= 0");
  Predictor p;
  p.estimator_id = "l2_constrained_erm";
  p.hyperparam = R;
  if (R == 0.0) {
    p.w = Eigen::VectorXd::Zero(data.d());
    p.diagnostics.objective = data.Y.squaredNorm() / data.n();
    return p;
  }
  Predictor ls = least_squares_minnorm(data);
  if (ls.w.norm() <= R) {
    ls.estimator_id = p.estimator_id;
    ls.hyperparam = R;
    return ls;
  }
  RidgeFactor factor(data.X, data.Y);
  const double target = R * R;
  // ||w(lambda)|| <= ||X^T Y|| / (n lambda)
  double hi = (data.X.transpose() * data.Y).norm() / (data.n() * R);
  hi = std::max(hi, 1e-300);
  while (factor.norm_sq(hi) > target) hi *= 2.0;
  double lo = hi;
  int guard = 0;
  while (factor.norm_sq(lo) < target && guard++ < 2000) lo *= 0.5;
  double llo = std::log(lo), lhi = std::log(hi);
  int it = 0;
  for (; it < 400; ++it) {
    double mid = 0.5 * (llo + lhi);
    double ns = factor.norm_sq(std::exp(mid));
    if (std::abs(std::sqrt(ns) - R) <= 1e-10 * R) {
      llo = lhi = mid;
      break;
    }
    if (ns > target) llo = mid; else lhi = mid;
    if (lhi - llo < 1e-15) break;
  }
  double lambda = std::exp(0.5 * (llo + lhi));
  p.w = factor.solve(lambda);
  p.diagnostics.iterations = it;
  p.diagnostics.objective = empirical_loss(p.w, data);
  // KKT: gradient of the loss is anti-parallel to w on the sphere
  Eigen::VectorXd grad = -2.0 * data.X.transpose() * (data.Y - data.X * p.w) / data.n();
  p.diagnostics.kkt_residual = (grad + 2.0 * lambda * p.w).cwiseAbs().maxCoeff();
  p.diagnostics.converged = std::abs(p.w.norm() - R) <= 1e-8 * R;
  return p;
}

Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double B) {
  if (!(B >= 0.0)) throw std::invalid_argument("project_l1_ball: B must be >= 0");
  if (B == 0.0) return Eigen::VectorXd::Zero(v.size());
  if (v.lpNorm<1>() <= B) return v;
  Eigen::VectorXd u = v.cwiseAbs();
  std::vector<double> s(u.data(), u.data() + u.size());
  std::sort(s.begin(), s.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    cum += s[j];
    double t = (cum - B) / static_cast<double>(j + 1);
    if (s[j] - t > 0.0) theta = t;
  }
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double a = std::max(std::abs(v(i)) - theta, 0.0);
    out(i) = v(i) < 0.0 ? -a : a;
  }
  return out;
}

double power_iteration_norm(const Eigen::MatrixXd& G, double tol, int max_iter) {
  const Eigen::Index d = G.rows();
  if (d == 0) return 0.0;
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = 1.0 + 0.01 * static_cast<double>(i % 7);
  v.normalize();
  double est = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd u = G * v;
    double nu = u.norm();
    if (nu == 0.0) return 0.0;
    double next = v.dot(u);
    v = u / nu;
    if (std::abs(next - est) <= tol * std::abs(next)) return std::max(next, nu);
    est = next;
  }
  return est;
}

Predictor l1_constrained_erm(const Dataset& data, double B, const L1SolverOptions& opts) {
  if (!(B >= 0.0)) throw std::invalid_argument("l1_constrained_erm: B must be >= 0");
  const int n = data.n(), d = data.d();
  Predictor p;
  p.estimator_id = "l1_constrained_erm";
  p.hyperparam = B;
  p.w = Eigen::VectorXd::Zero(d);
  if (B == 0.0) {
    p.diagnostics.objective = data.Y.squaredNorm() / n;
    return p;
  }
  // Minimise 0.5 * empirical loss: gradient X^T (X w - Y) / n.
  const bool use_gram = n >= d;
  Eigen::MatrixXd G;
  Eigen::VectorXd c = data.X.transpose() * data.Y / n;
  double L;
  if (use_gram) {
    G = gram_cols(data.X) / n;
    L = power_iteration_norm(G);
  } else {
    L = power_iteration_norm(gram_rows(data.X) / n);
  }
  L *= 1.0 + 1e-9;
  if (!(L > 0.0)) {
    p.diagnostics.objective = data.Y.squaredNorm() / n;
    return p;
  }
  auto gradient = [&](const Eigen::VectorXd& w) -> Eigen::VectorXd {
    if (use_gram) return G * w - c;
    return data.X.transpose() * (data.X * w) / n - c;
  };
  Eigen::VectorXd w = p.w;
  double residual = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    Eigen::VectorXd next = project_l1_ball(w - gradient(w) / L, B);
    residual = L * (next - w).norm();
    w = std::move(next);
    if (residual <= opts.tolerance) {
      ++it;
      break;
    }
  }
  p.w = w;
  p.diagnostics.iterations = it;
  p.diagnostics.kkt_residual = residual;
  p.diagnostics.converged = residual <= opts.tolerance;
  p.diagnostics.objective = empirical_loss(w, data);
  return p;
}

NearErmResult near_erm_family(const Dataset& data, const RegressionProblem& problem, double c) {
  const int n = data.n(), d = data.d();
  if (d >= n) throw std::invalid_argument("near_erm_family: requires d < n");
  if (!(c >= 0.0)) throw std::invalid_argument("near_erm_family: c must be >= 0");
  NearErmResult out;
  out.ols = least_squares_minnorm(data);
  const double gamma = static_cast<double>(d) / n;
  out.alpha = 1.0 + std::sqrt(c / (4.0 * gamma)) * std::pow(static_cast<double>(n), -0.25);
  out.predictor.estimator_id = "near_erm";
  out.predictor.hyperparam = c;
  out.predictor.w = problem.w_star + out.alpha * (out.ols.w - problem.w_star);
  out.predictor.diagnostics.objective = empirical_loss(out.predictor.w, data);
  out.train_gap = out.predictor.diagnostics.objective - out.ols.diagnostics.objective;
  out.pop_gap = population_loss(out.predictor.w, problem) - population_loss(out.ols.w, problem);
  return out;
}

}  // namespace optrate
