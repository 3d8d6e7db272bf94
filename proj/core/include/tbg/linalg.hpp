#pragma once

#include <Eigen/Dense>

namespace tbg {

// ascending eigenvalues of a Hermitian matrix (lower triangle referenced)
Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& H);

// ascending eigenvalues and orthonormal eigenvectors (columns)
void hermitian_eigensystem(const Eigen::MatrixXcd& H, Eigen::VectorXd& evals, Eigen::MatrixXcd& evecs);

// eigenvalues of a general complex matrix, unordered
Eigen::VectorXcd eigenvalues(const Eigen::MatrixXcd& A);

// descending singular values
Eigen::VectorXd singular_values(const Eigen::MatrixXcd& A);

inline double sigma_min(const Eigen::MatrixXcd& A) { return singular_values(A).minCoeff(); }
inline double op_norm(const Eigen::MatrixXcd& A) { return singular_values(A).maxCoeff(); }

struct SingularTriple {
  double sigma;
  Eigen::VectorXcd u, v;  // A v = sigma u
};

SingularTriple smallest_singular_triple(const Eigen::MatrixXcd& A);

// Complex Schur form A = Q S Q^*, reused for many shifted smallest-singular-value queries.
class ShiftedSigmaMin {
 public:
  explicit ShiftedSigmaMin(const Eigen::MatrixXcd& A);
  // sigma_min(A - z) by inverse iteration with triangular solves; falls back to a dense SVD
  double operator()(std::complex<double> z) const;
  const Eigen::MatrixXcd& schur() const { return S_; }

 private:
  Eigen::MatrixXcd S_;
};

}  // namespace tbg
