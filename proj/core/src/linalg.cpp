#include "tbg/linalg.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace tbg {

extern "C" void openblas_set_num_threads(int);

namespace {

void check(lapack_int info, const char* what) {
  if (info != 0) throw std::runtime_error(std::string(what) + " failed, info = " + std::to_string(info));
}

void zheevr_all(char jobz, Eigen::MatrixXcd& A, Eigen::VectorXd& w, Eigen::MatrixXcd* Z) {
  const lapack_int n = lapack_int(A.rows());
  std::vector<lapack_int> isuppz(2 * std::size_t(n));
  lapack_int found = 0;
  std::complex<double> dummy;
  check(LAPACKE_zheevr(LAPACK_COL_MAJOR, jobz, 'A', 'L', n, A.data(), n, 0.0, 0.0, 0, 0, 0.0, &found, w.data(),
                       Z ? Z->data() : &dummy, Z ? n : 1, isuppz.data()),
        "zheevr");
  if (found != n) throw std::runtime_error("zheevr returned " + std::to_string(found) + " of " + std::to_string(n));
}

// Some OpenBLAS kernels return wrong blocked results on some CPUs; verify the routines used
// here once on a matrix large enough to take the blocked paths.
void backend_check() {
  static const bool ok = [] {
    openblas_set_num_threads(1);
    const int n = 400;
    Eigen::MatrixXcd A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = std::complex<double>(std::sin(1.0 + i + 3.0 * j), std::cos(2.0 * i - j));
    Eigen::MatrixXcd H = A + A.adjoint(), B = H, Z(n, n);
    Eigen::VectorXd w(n);
    zheevr_all('V', B, w, &Z);
    double e1 = (H * Z - Z * w.asDiagonal()).norm() / H.norm();
    Eigen::MatrixXcd C = A, U(n, n), VT(n, n);
    Eigen::VectorXd s(n), sup(n);
    check(LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'A', 'A', n, n, C.data(), n, s.data(), U.data(), n, VT.data(), n, sup.data()),
          "zgesvd");
    double e2 = (U * s.cast<std::complex<double>>().asDiagonal() * VT - A).norm() / A.norm();
    return e1 < 1e-10 && e2 < 1e-10;
  }();
  if (!ok)
    throw std::runtime_error(
        "LAPACK self-check failed: the BLAS backend returns wrong results on this CPU "
        "(for OpenBLAS try OPENBLAS_CORETYPE=Haswell)");
}

}  // namespace

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& H) {
  Eigen::VectorXd w(H.rows());
  if (H.rows() == 0) return w;
  backend_check();
  Eigen::MatrixXcd A = H;
  zheevr_all('N', A, w, nullptr);
  return w;
}

void hermitian_eigensystem(const Eigen::MatrixXcd& H, Eigen::VectorXd& evals, Eigen::MatrixXcd& evecs) {
  const Eigen::Index n = H.rows();
  evals.resize(n);
  evecs.resize(n, n);
  if (n == 0) return;
  backend_check();
  Eigen::MatrixXcd A = H;
  zheevr_all('V', A, evals, &evecs);
}

Eigen::VectorXcd eigenvalues(const Eigen::MatrixXcd& M) {
  const lapack_int n = lapack_int(M.rows());
  Eigen::MatrixXcd A = M;
  Eigen::VectorXcd w(n);
  if (n == 0) return w;
  backend_check();
  std::complex<double> dummy;
  check(LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, A.data(), n, w.data(), &dummy, 1, &dummy, 1), "zgeev");
  return w;
}

Eigen::VectorXd singular_values(const Eigen::MatrixXcd& M) {
  const lapack_int m = lapack_int(M.rows()), n = lapack_int(M.cols());
  Eigen::MatrixXcd A = M;
  Eigen::VectorXd s(std::min(m, n));
  if (s.size() == 0) return s;
  backend_check();
  std::complex<double> dummy;
  check(LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n, A.data(), m, s.data(), &dummy, 1, &dummy, 1), "zgesdd");
  return s;
}

SingularTriple smallest_singular_triple(const Eigen::MatrixXcd& M) {
  const lapack_int n = lapack_int(M.rows());
  if (M.cols() != n) throw std::invalid_argument("square matrix expected");
  backend_check();
  Eigen::MatrixXcd A = M, U(n, n), VT(n, n);
  Eigen::VectorXd s(n), sup(n);
  check(LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'A', 'A', n, n, A.data(), n, s.data(), U.data(), n, VT.data(), n, sup.data()),
        "zgesvd");
  SingularTriple t;
  t.sigma = s(n - 1);
  t.u = U.col(n - 1);
  t.v = VT.row(n - 1).adjoint();
  return t;
}

ShiftedSigmaMin::ShiftedSigmaMin(const Eigen::MatrixXcd& A) {
  Eigen::ComplexSchur<Eigen::MatrixXcd> cs(A, false);
  S_ = cs.matrixT();
}

double ShiftedSigmaMin::operator()(std::complex<double> z) const {
  const int n = int(S_.rows());
  Eigen::MatrixXcd R = S_;
  R.diagonal().array() -= z;
  const double scale = R.cwiseAbs().maxCoeff();
  // an exactly singular triangle means z is an eigenvalue
  for (int i = 0; i < n; ++i)
    if (std::abs(R(i, i)) <= 1e-300) return 0.0;
  auto tri = R.triangularView<Eigen::Upper>();
  Eigen::VectorXcd x(n);
  for (int i = 0; i < n; ++i) x(i) = std::complex<double>(std::sin(1.0 + 0.7 * i), std::cos(0.3 + 1.3 * i));
  x.normalize();
  double prev = 0, est = 0;
  for (int it = 0; it < 300; ++it) {
    // x <- (R^* R)^{-1} x
    Eigen::VectorXcd y = tri.adjoint().solve(x);
    y = tri.solve(y);
    double ny = y.norm();
    if (!std::isfinite(ny) || ny == 0) return 0.0;
    x = y / ny;
    est = 1.0 / std::sqrt(ny);
    if (it > 2 && std::abs(est - prev) <= 1e-13 * std::max(est, 1e-300) + 1e-16 * scale) {
      // converged estimate is an upper bound; verify with the Rayleigh quotient
      return (tri * x).norm();
    }
    prev = est;
  }
  return singular_values(R).minCoeff();
}

}  // namespace tbg
