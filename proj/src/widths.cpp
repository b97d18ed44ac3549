#include "optrate/widths.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "optrate/parallel.hpp"
#include "optrate/stats.hpp"

namespace optrate {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ConstraintSet ConstraintSet::l2_ball(double B) {
  if (!(B >= 0.0)) throw std::invalid_argument("ball radius must be >= 0");
  return {Kind::l2_ball, B};
}

ConstraintSet ConstraintSet::l1_ball(double B) {
  if (!(B >= 0.0)) throw std::invalid_argument("ball radius must be >= 0");
  return {Kind::l1_ball, B};
}

double ConstraintSet::norm_of(const Eigen::VectorXd& w) const {
  switch (kind) {
    case Kind::l2_ball: return w.norm();
    case Kind::l1_ball: return w.lpNorm<1>();
    case Kind::full_space: break;
  }
  return kInf;
}

std::string ConstraintSet::name() const {
  switch (kind) {
    case Kind::full_space: return "full_space";
    case Kind::l2_ball: return "l2_ball";
    case Kind::l1_ball: return "l1_ball";
  }
  return "unknown";
}

std::string to_string(WidthMethod m) {
  switch (m) {
    case WidthMethod::closed_form: return "closed_form";
    case WidthMethod::monte_carlo: return "monte_carlo";
    case WidthMethod::unbounded: return "unbounded";
  }
  return "unknown";
}

WidthEstimate monte_carlo_mean(int samples, std::uint64_t seed,
                               const std::function<double(Rng&)>& draw) {
  if (samples < 1) throw std::invalid_argument("Monte Carlo needs at least one sample");
  std::vector<double> values(static_cast<std::size_t>(samples));
  const int blocks = (samples + kMcBlock - 1) / kMcBlock;
  parallel_for(static_cast<std::size_t>(blocks), [&](std::size_t blk) {
    Rng rng = make_rng(seed, blk);
    int lo = static_cast<int>(blk) * kMcBlock;
    int hi = std::min(samples, lo + kMcBlock);
    for (int i = lo; i < hi; ++i) values[static_cast<std::size_t>(i)] = draw(rng);
  });
  SampleSummary s = summarize(values);
  WidthEstimate w;
  w.value = s.mean;
  w.std_error = s.std_error;
  w.method = WidthMethod::monte_carlo;
  w.mc_samples = samples;
  return w;
}

namespace {

// Draws ||x||_2 for x ~ N(0, Sigma).
std::function<double(Rng&)> l2_norm_sampler(const CovarianceSpec& cov) {
  using K = CovarianceSpec::Kind;
  if (cov.kind() == K::isotropic) {
    double v = cov.isotropic_variance();
    int d = cov.dim();
    return [v, d](Rng& rng) {
      std::chi_squared_distribution<double> chi(d);
      return std::sqrt(v * chi(rng));
    };
  }
  if (cov.kind() == K::spiked) {
    Eigen::VectorXd spikes = cov.spikes();
    double a2 = cov.tail_alpha() * cov.tail_alpha();
    int m = cov.tail_dim();
    return [spikes, a2, m](Rng& rng) {
      std::normal_distribution<double> nd;
      double s = 0.0;
      for (Eigen::Index i = 0; i < spikes.size(); ++i) {
        double g = nd(rng);
        s += spikes(i) * g * g;
      }
      if (m > 0) {
        std::chi_squared_distribution<double> chi(m);
        s += a2 * chi(rng);
      }
      return std::sqrt(s);
    };
  }
  Eigen::VectorXd lam = cov.eigenvalues();
  return [lam](Rng& rng) {
    std::normal_distribution<double> nd;
    double s = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      double g = nd(rng);
      s += lam(i) * g * g;
    }
    return std::sqrt(s);
  };
}

// Draws ||x||_inf for x ~ N(0, Sigma).
std::function<double(Rng&)> linf_norm_sampler(const CovarianceSpec& cov) {
  if (cov.kind() == CovarianceSpec::Kind::dense) {
    const CovarianceSpec c = cov;
    return [c](Rng& rng) {
      Eigen::VectorXd g(c.dim());
      fill_normal(g, rng);
      return c.sqrt_apply(g).cwiseAbs().maxCoeff();
    };
  }
  Eigen::VectorXd sd = cov.diagonal_entries().cwiseSqrt();
  return [sd](Rng& rng) {
    std::normal_distribution<double> nd;
    double best = 0.0;
    for (Eigen::Index i = 0; i < sd.size(); ++i) best = std::max(best, sd(i) * std::abs(nd(rng)));
    return best;
  };
}

}  // namespace

WidthEstimate width_ball(const CovarianceSpec& cov, const ConstraintSet& set, int mc_samples,
                         std::uint64_t seed) {
  if (set.kind == ConstraintSet::Kind::full_space) {
    WidthEstimate w;
    w.value = kInf;
    w.method = WidthMethod::unbounded;
    return w;
  }
  WidthEstimate base = monte_carlo_mean(
      mc_samples, seed,
      set.kind == ConstraintSet::Kind::l2_ball ? l2_norm_sampler(cov) : linf_norm_sampler(cov));
  base.value *= set.radius;
  base.std_error *= set.radius;
  return base;
}

std::pair<double, double> l2_norm_mean_bracket(const CovarianceSpec& cov) {
  double hi = std::sqrt(cov.trace());
  return {std::max(0.0, hi - std::sqrt(cov.op_norm())), hi};
}

double radius_under_cov(const CovarianceSpec& cov, const ConstraintSet& set) {
  switch (set.kind) {
    case ConstraintSet::Kind::l2_ball: return set.radius * std::sqrt(cov.op_norm());
    case ConstraintSet::Kind::l1_ball: return set.radius * std::sqrt(cov.max_diagonal());
    case ConstraintSet::Kind::full_space: break;
  }
  throw std::invalid_argument("radius_under_cov: the full space is unbounded");
}

double chi_mean(int k) {
  if (k <= 0) return 0.0;
  return std::sqrt(2.0) * std::exp(std::lgamma((k + 1) / 2.0) - std::lgamma(k / 2.0));
}

IsotropicBallLocalWidth::IsotropicBallLocalWidth(int d, int mc_samples, std::uint64_t seed)
    : d_(d), a_(static_cast<std::size_t>(mc_samples)), b_(static_cast<std::size_t>(mc_samples)) {
  if (d < 1) throw std::invalid_argument("localized width needs d >= 1");
  if (mc_samples < 1) throw std::invalid_argument("localized width needs mc_samples >= 1");
  const int blocks = (mc_samples + kMcBlock - 1) / kMcBlock;
  parallel_for(static_cast<std::size_t>(blocks), [&](std::size_t blk) {
    Rng rng = make_rng(seed, blk);
    std::normal_distribution<double> nd;
    int lo = static_cast<int>(blk) * kMcBlock;
    int hi = std::min(mc_samples, lo + kMcBlock);
    for (int i = lo; i < hi; ++i) {
      a_[static_cast<std::size_t>(i)] = nd(rng);
      double rest = 0.0;
      if (d > 1) {
        std::chi_squared_distribution<double> chi(d - 1);
        rest = std::sqrt(chi(rng));
      }
      b_[static_cast<std::size_t>(i)] = rest;
    }
  });
}

// sup a s + b t over s^2 + t^2 <= r^2 and (s + c)^2 + t^2 <= B^2, with b >= 0.
double IsotropicBallLocalWidth::sample_sup(double a, double b, double B, double r, double c) {
  if (c > B + r) return -kInf;
  double h = std::hypot(a, b);
  if (h == 0.0) return 0.0;
  const double slack = 1e-12 * std::max({1.0, B, r, c});
  // maximiser of the disc around w*
  double s1 = r * a / h, t1 = r * b / h;
  if ((s1 + c) * (s1 + c) + t1 * t1 <= B * B + slack * std::max(1.0, B)) return r * h;
  // maximiser of the ball K (centre -c in these coordinates)
  double s2 = -c + B * a / h, t2 = B * b / h;
  if (s2 * s2 + t2 * t2 <= r * r + slack * std::max(1.0, r)) return a * s2 + b * t2;
  // upper intersection of the two circles
  double s = (B * B - r * r - c * c) / (2.0 * c);
  double t = std::sqrt(std::max(0.0, r * r - s * s));
  return a * s + b * t;
}

WidthEstimate IsotropicBallLocalWidth::operator()(double B, double r, double wstar_norm) const {
  if (!(B >= 0.0) || !(r >= 0.0) || !(wstar_norm >= 0.0))
    throw std::invalid_argument("localized width needs B, r, ||w*|| >= 0");
  WidthEstimate w;
  w.method = WidthMethod::monte_carlo;
  w.mc_samples = samples();
  if (wstar_norm > B + r) {
    w.value = -kInf;
    return w;
  }
  std::vector<double> vals(a_.size());
  for (std::size_t i = 0; i < a_.size(); ++i) vals[i] = sample_sup(a_[i], b_[i], B, r, wstar_norm);
  SampleSummary s = summarize(vals);
  w.value = s.mean;
  w.std_error = s.std_error;
  return w;
}

WidthEstimate localized_width_l2_isotropic(double B, double r, double wstar_norm, int d,
                                           int mc_samples, std::uint64_t seed) {
  return IsotropicBallLocalWidth(d, mc_samples, seed)(B, r, wstar_norm);
}

WidthEstimate localized_width_full_space(const CovarianceSpec& cov, double r, int mc_samples,
                                         std::uint64_t seed) {
  if (!(r >= 0.0)) throw std::invalid_argument("localized width needs r >= 0");
  const int k = cov.rank();
  if (mc_samples <= 0) {
    WidthEstimate w;
    w.value = r * chi_mean(k);
    w.method = WidthMethod::closed_form;
    return w;
  }
  WidthEstimate w = monte_carlo_mean(mc_samples, seed, [k](Rng& rng) {
    if (k == 0) return 0.0;
    std::chi_squared_distribution<double> chi(k);
    return std::sqrt(chi(rng));
  });
  w.value *= r;
  w.std_error *= r;
  return w;
}

Eigen::VectorXd project_simplex(const Eigen::VectorXd& v, double total) {
  std::vector<double> s(v.data(), v.data() + v.size());
  std::sort(s.begin(), s.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    cum += s[j];
    double t = (cum - total) / static_cast<double>(j + 1);
    if (s[j] - t > 0.0) theta = t;
  }
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

namespace {

Eigen::VectorXd project_l1(const Eigen::VectorXd& v, double B) {
  if (v.lpNorm<1>() <= B) return v;
  Eigen::VectorXd mag = project_simplex(v.cwiseAbs(), B);
  return mag.cwiseProduct(v.unaryExpr([](double x) { return x < 0.0 ? -1.0 : 1.0; }));
}

}  // namespace

double compatibility_constant(const CovarianceSpec& cov, const std::vector<int>& S,
                              const CompatibilityOptions& opts) {
  const int d = cov.dim();
  const int k = static_cast<int>(S.size());
  if (k < 1) throw std::invalid_argument("compatibility constant needs |S| >= 1");
  if (k > 12) throw std::invalid_argument("compatibility constant: |S| > 12 is too large to enumerate");
  std::vector<char> in_s(static_cast<std::size_t>(d), 0);
  for (int i : S) {
    if (i < 0 || i >= d) throw std::invalid_argument("compatibility constant: index out of range");
    if (in_s[static_cast<std::size_t>(i)]) throw std::invalid_argument("compatibility constant: repeated index");
    in_s[static_cast<std::size_t>(i)] = 1;
  }
  std::vector<int> Sc;
  for (int i = 0; i < d; ++i)
    if (!in_s[static_cast<std::size_t>(i)]) Sc.push_back(i);

  const Eigen::MatrixXd Sig = cov.to_dense();
  const double L = 2.0 * std::max(cov.op_norm(), 1e-300);
  double best = kInf;
  // u and -u give the same objective, so fix the sign of the first entry.
  const unsigned patterns = 1u << (k - 1);
  for (unsigned mask = 0; mask < patterns; ++mask) {
    Eigen::VectorXd sgn(k);
    for (int j = 0; j < k; ++j) sgn(j) = (j > 0 && ((mask >> (j - 1)) & 1u)) ? -1.0 : 1.0;
    // variables: v = sgn * u_S in the unit simplex, z = u_{S^c} in the unit l1 ball
    auto assemble = [&](const Eigen::VectorXd& v, const Eigen::VectorXd& z) {
      Eigen::VectorXd u(d);
      for (int j = 0; j < k; ++j) u(S[static_cast<std::size_t>(j)]) = sgn(j) * v(j);
      for (std::size_t j = 0; j < Sc.size(); ++j) u(Sc[j]) = z(static_cast<Eigen::Index>(j));
      return u;
    };
    auto project = [&](Eigen::VectorXd& v, Eigen::VectorXd& z) {
      v = project_simplex(v, 1.0);
      z = project_l1(z, 1.0);
    };
    Eigen::VectorXd v = Eigen::VectorXd::Constant(k, 1.0 / k);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(Sc.size()));
    Eigen::VectorXd yv = v, yz = z;
    double tk = 1.0;
    for (int it = 0; it < opts.max_iterations; ++it) {
      Eigen::VectorXd g = 2.0 * (Sig * assemble(yv, yz));
      Eigen::VectorXd gv(k), gz(static_cast<Eigen::Index>(Sc.size()));
      for (int j = 0; j < k; ++j) gv(j) = sgn(j) * g(S[static_cast<std::size_t>(j)]);
      for (std::size_t j = 0; j < Sc.size(); ++j) gz(static_cast<Eigen::Index>(j)) = g(Sc[j]);
      Eigen::VectorXd nv = yv - gv / L, nz = yz - gz / L;
      project(nv, nz);
      double step = std::sqrt((nv - v).squaredNorm() + (nz - z).squaredNorm());
      double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
      double mom = (tk - 1.0) / tn;
      // restart momentum when the objective goes up
      Eigen::VectorXd un = assemble(nv, nz), uo = assemble(v, z);
      if (un.dot(Sig * un) > uo.dot(Sig * uo)) {
        tn = 1.0;
        mom = 0.0;
      }
      yv = nv + mom * (nv - v);
      yz = nz + mom * (nz - z);
      v = nv;
      z = nz;
      tk = tn;
      if (step * L <= opts.tolerance) break;
    }
    Eigen::VectorXd u = assemble(v, z);
    best = std::min(best, u.dot(Sig * u));
  }
  return k * best;
}

double compatibility_lower_bound(const CovarianceSpec& cov) { return cov.min_eigenvalue(); }

double descent_cone_distance_sq(const Eigen::VectorXd& g, const Eigen::VectorXd& wstar) {
  if (g.size() != wstar.size()) throw std::invalid_argument("descent cone: dimension mismatch");
  double A = 0.0;  // sum over S of sign(w*_i) g_i
  int k = 0;
  std::vector<double> h;
  h.reserve(static_cast<std::size_t>(g.size()));
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (wstar(i) != 0.0) {
      A += (wstar(i) > 0.0 ? 1.0 : -1.0) * g(i);
      ++k;
    } else {
      h.push_back(std::abs(g(i)));
    }
  }
  if (k == 0) throw std::invalid_argument("descent cone needs w* != 0");
  std::sort(h.begin(), h.end(), std::greater<double>());
  // The objective is convex piecewise quadratic in lambda; on the piece where
  // exactly the j largest off-support |g| exceed lambda its stationary point
  // is (A + top_j) / (k + j).
  const std::size_t m = h.size();
  double lambda = 0.0, cum = 0.0;
  for (std::size_t j = 0; j <= m; ++j) {
    if (j > 0) cum += h[j - 1];
    double cand = (A + cum) / static_cast<double>(k + static_cast<int>(j));
    double lower = j < m ? h[j] : 0.0;
    double upper = j == 0 ? kInf : h[j - 1];
    if (cand >= lower && cand <= upper) {
      lambda = cand;
      break;
    }
    if (j == m) lambda = std::max(cand, 0.0);
  }
  lambda = std::max(lambda, 0.0);
  double dist = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (wstar(i) != 0.0) {
      double r = g(i) - lambda * (wstar(i) > 0.0 ? 1.0 : -1.0);
      dist += r * r;
    } else {
      double r = std::max(std::abs(g(i)) - lambda, 0.0);
      dist += r * r;
    }
  }
  return dist;
}

DescentConeEstimate l1_descent_cone_dimension(const Eigen::VectorXd& wstar, int mc_samples,
                                              std::uint64_t seed) {
  if (wstar.size() == 0 || (wstar.array() != 0.0).count() == 0)
    throw std::invalid_argument("descent cone needs w* != 0");
  const Eigen::Index d = wstar.size();
  DescentConeEstimate out;
  out.stat_dim = monte_carlo_mean(mc_samples, seed, [&wstar, d](Rng& rng) {
    Eigen::VectorXd g(d);
    fill_normal(g, rng);
    return descent_cone_distance_sq(g, wstar);
  });
  out.omega = std::sqrt(std::max(0.0, out.stat_dim.value));
  return out;
}

PsiValue statistical_dimension_psi_detail(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("psi needs rho in [0, 1]");
  if (rho == 0.0) return {0.0, kInf};
  if (rho == 1.0) return {1.0, 0.0};
  auto obj = [rho](double tau) {
    double tail = 2.0 * ((1.0 + tau * tau) * normal_tail(tau) - tau * normal_pdf(tau));
    return rho * (1.0 + tau * tau) + (1.0 - rho) * tail;
  };
  double tau = golden_section_min(obj, 0.0, 12.0, 1e-10);
  return {obj(tau), tau};
}

double statistical_dimension_psi(double rho) { return statistical_dimension_psi_detail(rho).value; }

}  // namespace optrate
