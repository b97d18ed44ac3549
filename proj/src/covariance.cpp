#include "optrate/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace optrate {

namespace {

double rank_tolerance(int d, double top) {
  return std::max(1, d) * std::numeric_limits<double>::epsilon() * top;
}

}  // namespace

CovarianceSpec::CovarianceSpec() = default;

CovarianceSpec CovarianceSpec::dense(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0)
    throw std::invalid_argument("dense covariance must be square and nonempty");
  if (!sigma.allFinite()) throw std::invalid_argument("dense covariance has non-finite entries");
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() != 0.0)
    throw std::invalid_argument("dense covariance is not exactly symmetric");
  auto data = std::make_shared<DenseData>();
  data->sigma = sigma;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  data->vecs = es.eigenvectors();
  data->vals = es.eigenvalues();
  double scale = data->vals.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < data->vals.size(); ++i) {
    if (data->vals(i) < -1e-10 * scale)
      throw std::invalid_argument("dense covariance is not positive semidefinite");
    data->vals(i) = std::max(0.0, data->vals(i));
  }
  data->sqrt_sigma =
      data->vecs * data->vals.cwiseSqrt().asDiagonal() * data->vecs.transpose();
  CovarianceSpec c;
  c.kind_ = Kind::dense;
  c.dim_ = static_cast<int>(sigma.rows());
  c.dense_ = std::move(data);
  return c;
}

CovarianceSpec CovarianceSpec::diagonal(const Eigen::VectorXd& diag) {
  if (diag.size() == 0) throw std::invalid_argument("diagonal covariance must be nonempty");
  if (!diag.allFinite() || diag.minCoeff() < 0.0)
    throw std::invalid_argument("diagonal covariance entries must be finite and nonnegative");
  CovarianceSpec c;
  c.kind_ = Kind::diagonal;
  c.dim_ = static_cast<int>(diag.size());
  c.diag_ = diag;
  return c;
}

CovarianceSpec CovarianceSpec::isotropic(int d, double variance) {
  if (d < 1) throw std::invalid_argument("isotropic covariance needs d >= 1");
  if (!(variance >= 0.0) || !std::isfinite(variance))
    throw std::invalid_argument("isotropic variance must be finite and nonnegative");
  CovarianceSpec c;
  c.kind_ = Kind::isotropic;
  c.dim_ = d;
  c.scale_ = variance;
  return c;
}

CovarianceSpec CovarianceSpec::spiked(const Eigen::VectorXd& spikes, double alpha, int m) {
  if (m < 0) throw std::invalid_argument("spiked covariance needs m >= 0");
  if (spikes.size() + m == 0) throw std::invalid_argument("spiked covariance must be nonempty");
  if (!spikes.allFinite() || (spikes.size() > 0 && spikes.minCoeff() < 0.0))
    throw std::invalid_argument("spike values must be finite and nonnegative");
  if (!std::isfinite(alpha)) throw std::invalid_argument("tail scale must be finite");
  CovarianceSpec c;
  c.kind_ = Kind::spiked;
  c.dim_ = static_cast<int>(spikes.size()) + m;
  c.spikes_ = spikes;
  c.alpha_ = std::abs(alpha);
  c.m_ = m;
  return c;
}

std::string CovarianceSpec::kind_name() const {
  switch (kind_) {
    case Kind::dense: return "dense";
    case Kind::diagonal: return "diagonal";
    case Kind::isotropic: return "isotropic";
    case Kind::spiked: return "spiked";
  }
  return "unknown";
}

Eigen::VectorXd CovarianceSpec::diag_vector() const {
  switch (kind_) {
    case Kind::diagonal: return diag_;
    case Kind::isotropic: return Eigen::VectorXd::Constant(dim_, scale_);
    case Kind::spiked: {
      Eigen::VectorXd v(dim_);
      v.head(spikes_.size()) = spikes_;
      v.tail(m_).setConstant(alpha_ * alpha_);
      return v;
    }
    case Kind::dense: break;
  }
  throw std::logic_error("diag_vector on dense covariance");
}

double CovarianceSpec::trace() const {
  switch (kind_) {
    case Kind::dense: return dense_->sigma.trace();
    case Kind::diagonal: return diag_.sum();
    case Kind::isotropic: return scale_ * dim_;
    case Kind::spiked: return spikes_.sum() + alpha_ * alpha_ * m_;
  }
  return 0.0;
}

double CovarianceSpec::trace_of_square() const {
  switch (kind_) {
    case Kind::dense: return dense_->vals.squaredNorm();
    case Kind::diagonal: return diag_.squaredNorm();
    case Kind::isotropic: return scale_ * scale_ * dim_;
    case Kind::spiked: {
      double a2 = alpha_ * alpha_;
      return spikes_.squaredNorm() + a2 * a2 * m_;
    }
  }
  return 0.0;
}

double CovarianceSpec::op_norm() const {
  switch (kind_) {
    case Kind::dense: return dense_->vals.maxCoeff();
    case Kind::diagonal: return diag_.maxCoeff();
    case Kind::isotropic: return scale_;
    case Kind::spiked: {
      double top = m_ > 0 ? alpha_ * alpha_ : 0.0;
      if (spikes_.size() > 0) top = std::max(top, spikes_.maxCoeff());
      return top;
    }
  }
  return 0.0;
}

double CovarianceSpec::max_diagonal() const {
  if (kind_ == Kind::dense) return dense_->sigma.diagonal().maxCoeff();
  return op_norm();
}

double CovarianceSpec::min_eigenvalue() const {
  switch (kind_) {
    case Kind::dense: return dense_->vals.minCoeff();
    case Kind::diagonal: return diag_.minCoeff();
    case Kind::isotropic: return scale_;
    case Kind::spiked: {
      double low = m_ > 0 ? alpha_ * alpha_ : std::numeric_limits<double>::infinity();
      if (spikes_.size() > 0) low = std::min(low, spikes_.minCoeff());
      return low;
    }
  }
  return 0.0;
}

int CovarianceSpec::rank() const {
  double tol = rank_tolerance(dim_, op_norm());
  switch (kind_) {
    case Kind::dense: return static_cast<int>((dense_->vals.array() > tol).count());
    case Kind::diagonal: return static_cast<int>((diag_.array() > tol).count());
    case Kind::isotropic: return scale_ > 0.0 ? dim_ : 0;
    case Kind::spiked: {
      int r = static_cast<int>((spikes_.array() > tol).count());
      if (alpha_ * alpha_ > tol) r += m_;
      return r;
    }
  }
  return 0;
}

Eigen::VectorXd CovarianceSpec::eigenvalues() const {
  Eigen::VectorXd v = kind_ == Kind::dense ? Eigen::VectorXd(dense_->vals) : diag_vector();
  std::sort(v.data(), v.data() + v.size(), std::greater<double>());
  return v;
}

Eigen::VectorXd CovarianceSpec::diagonal_entries() const {
  if (kind_ == Kind::dense) return dense_->sigma.diagonal();
  return diag_vector();
}

double CovarianceSpec::quad_form(const Eigen::VectorXd& v) const {
  if (v.size() != dim_) throw std::invalid_argument("quad_form: dimension mismatch");
  switch (kind_) {
    case Kind::dense: return v.dot(dense_->sigma * v);
    case Kind::diagonal: return (v.array().square() * diag_.array()).sum();
    case Kind::isotropic: return scale_ * v.squaredNorm();
    case Kind::spiked: {
      Eigen::Index s = spikes_.size();
      return (v.head(s).array().square() * spikes_.array()).sum() +
             alpha_ * alpha_ * v.tail(m_).squaredNorm();
    }
  }
  return 0.0;
}

Eigen::VectorXd CovarianceSpec::apply(const Eigen::VectorXd& v) const {
  if (v.size() != dim_) throw std::invalid_argument("apply: dimension mismatch");
  if (kind_ == Kind::dense) return dense_->sigma * v;
  return diag_vector().cwiseProduct(v);
}

Eigen::VectorXd CovarianceSpec::sqrt_apply(const Eigen::VectorXd& v) const {
  if (v.size() != dim_) throw std::invalid_argument("sqrt_apply: dimension mismatch");
  if (kind_ == Kind::dense) return dense_->sqrt_sigma * v;
  return diag_vector().cwiseSqrt().cwiseProduct(v);
}

Eigen::MatrixXd CovarianceSpec::transform_rows(const Eigen::MatrixXd& Z) const {
  if (Z.cols() != dim_) throw std::invalid_argument("transform_rows: dimension mismatch");
  switch (kind_) {
    case Kind::dense: return Z * dense_->sqrt_sigma;
    case Kind::isotropic:
      if (scale_ == 1.0) return Z;
      return std::sqrt(scale_) * Z;
    default: return Z * diag_vector().cwiseSqrt().asDiagonal();
  }
}

Eigen::MatrixXd CovarianceSpec::to_dense() const {
  if (kind_ == Kind::dense) return dense_->sigma;
  return diag_vector().asDiagonal();
}

const Eigen::MatrixXd& CovarianceSpec::dense_matrix() const {
  if (kind_ != Kind::dense) throw std::logic_error("not a dense covariance");
  return dense_->sigma;
}

const Eigen::MatrixXd& CovarianceSpec::dense_eigenvectors() const {
  if (kind_ != Kind::dense) throw std::logic_error("not a dense covariance");
  return dense_->vecs;
}

const Eigen::VectorXd& CovarianceSpec::dense_eigenvalues_ascending() const {
  if (kind_ != Kind::dense) throw std::logic_error("not a dense covariance");
  return dense_->vals;
}

EffectiveRanks effective_ranks(const CovarianceSpec& cov) {
  double op = cov.op_norm();
  double tr2 = cov.trace_of_square();
  if (op <= 0.0 || tr2 <= 0.0) throw std::invalid_argument("effective ranks of the zero matrix");
  double tr = cov.trace();
  return {tr / op, tr * tr / tr2};
}

CovSplit split_covariance(const CovarianceSpec& cov, int k) {
  const int d = cov.dim();
  if (k < 0 || k > d) throw std::invalid_argument("split_covariance: need 0 <= k <= d");
  CovSplit out;
  double tol = rank_tolerance(d, cov.op_norm());

  if (cov.kind() == CovarianceSpec::Kind::dense) {
    const auto& V = cov.dense_eigenvectors();
    const auto& lam = cov.dense_eigenvalues_ascending();
    Eigen::MatrixXd V1 = V.rightCols(k);
    Eigen::MatrixXd V2 = V.leftCols(d - k);
    Eigen::MatrixXd S1 = V1 * lam.tail(k).asDiagonal() * V1.transpose();
    Eigen::MatrixXd S2 = V2 * lam.head(d - k).asDiagonal() * V2.transpose();
    S1 = 0.5 * (S1 + S1.transpose()).eval();
    S2 = 0.5 * (S2 + S2.transpose()).eval();
    out.sigma1 = CovarianceSpec::dense(S1);
    out.sigma2 = CovarianceSpec::dense(S2);
    out.rank1 = static_cast<int>((lam.tail(k).array() > tol).count());
    return out;
  }

  Eigen::VectorXd diag = cov.diagonal_entries();
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return diag(a) > diag(b); });
  Eigen::VectorXd d1 = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < k; ++i) d1(order[i]) = diag(order[i]);
  Eigen::VectorXd d2 = diag - d1;
  out.rank1 = static_cast<int>((d1.array() > tol).count());
  out.sigma1 = CovarianceSpec::diagonal(d1);

  const Eigen::Index s = cov.spikes().size();
  bool top_are_spikes = cov.kind() == CovarianceSpec::Kind::spiked;
  for (int i = 0; i < k && top_are_spikes; ++i) top_are_spikes = order[i] < s;
  if (top_are_spikes) {
    out.sigma2 = CovarianceSpec::spiked(d2.head(s), cov.tail_alpha(), cov.tail_dim());
  } else {
    out.sigma2 = CovarianceSpec::diagonal(d2);
  }
  return out;
}

}  // namespace optrate
