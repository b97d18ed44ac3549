#pragma once

#include <memory>
#include <string>

#include <Eigen/Dense>

namespace optrate {

// Structured PSD covariance. Diagonal-like kinds (diagonal, isotropic, spiked)
// never materialise a d x d matrix.
class CovarianceSpec {
 public:
  enum class Kind { dense, diagonal, isotropic, spiked };

  CovarianceSpec();  // 1x1 identity

  static CovarianceSpec dense(const Eigen::MatrixXd& sigma);
  static CovarianceSpec diagonal(const Eigen::VectorXd& diag);
  // Sigma = variance * I_d
  static CovarianceSpec isotropic(int d, double variance = 1.0);
  // Sigma = diag(spikes, alpha^2 I_m)
  static CovarianceSpec spiked(const Eigen::VectorXd& spikes, double alpha, int m);

  Kind kind() const { return kind_; }
  std::string kind_name() const;
  int dim() const { return dim_; }

  double trace() const;
  double trace_of_square() const;
  double op_norm() const;
  double max_diagonal() const;
  double min_eigenvalue() const;
  int rank() const;

  // Eigenvalues in descending order.
  Eigen::VectorXd eigenvalues() const;
  // Diagonal entries Sigma_ii.
  Eigen::VectorXd diagonal_entries() const;
  bool is_diagonal_like() const { return kind_ != Kind::dense; }

  double quad_form(const Eigen::VectorXd& v) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  // Z has i.i.d. N(0,1) entries; returns Z Sigma^{1/2}, whose rows are N(0, Sigma).
  Eigen::MatrixXd transform_rows(const Eigen::MatrixXd& Z) const;
  Eigen::VectorXd sqrt_apply(const Eigen::VectorXd& v) const;
  Eigen::MatrixXd to_dense() const;

  // spiked accessors
  const Eigen::VectorXd& spikes() const { return spikes_; }
  double tail_alpha() const { return alpha_; }
  int tail_dim() const { return m_; }
  double isotropic_variance() const { return scale_; }

  // dense accessors (eigenvectors are columns, eigenvalues ascending as in Eigen)
  const Eigen::MatrixXd& dense_matrix() const;
  const Eigen::MatrixXd& dense_eigenvectors() const;
  const Eigen::VectorXd& dense_eigenvalues_ascending() const;

 private:
  struct DenseData {
    Eigen::MatrixXd sigma;
    Eigen::MatrixXd vecs;
    Eigen::VectorXd vals;  // ascending, clamped at 0
    Eigen::MatrixXd sqrt_sigma;
  };

  Eigen::VectorXd diag_vector() const;  // diagonal-like kinds only

  Kind kind_ = Kind::isotropic;
  int dim_ = 1;
  double scale_ = 1.0;
  Eigen::VectorXd diag_;
  Eigen::VectorXd spikes_;
  double alpha_ = 0.0;
  int m_ = 0;
  std::shared_ptr<const DenseData> dense_;
};

struct CovSplit {
  CovarianceSpec sigma1;
  CovarianceSpec sigma2;
  int rank1 = 0;
};

struct EffectiveRanks {
  double r = 0.0;
  double R = 0.0;
};

EffectiveRanks effective_ranks(const CovarianceSpec& cov);

// Sigma1 = part of Sigma on its top-k eigenspace, Sigma2 = the remainder.
CovSplit split_covariance(const CovarianceSpec& cov, int k);

}  // namespace optrate
