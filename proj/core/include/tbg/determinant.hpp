#pragma once

#include <map>
#include <vector>

#include "tbg/operators.hpp"

namespace tbg {

struct TraceTable {
  // sigma[p] in the normalisation of the reference table: half the sector trace of T^{2p}
  std::map<int, cplx> sigma;
  std::map<int, double> reference;
  std::map<int, double> rel_err;
  bool sigma1_conditional = true;  // p = 1 is not absolutely summable
  // series[j] = sector trace of T^j, zeroed for j < 4
  std::vector<cplx> series;
  double cutoff = 0;  // summation radius
  cplx k_used;
};

// 3^p (pi / sqrt 3) r_p for p = 1..8, 0 outside
double reference_trace(int p);

// Traces of the infinite operator: T is built on the ball of radius cutoff + pmax + 1, so
// that every diagonal entry of T^{2p} with |p| <= cutoff is exact, and the diagonal is
// summed with a smooth radial taper on [cutoff/2, cutoff].
TraceTable compute_traces(const PotentialSpec& pot, cplx k, double cutoff, int pmax);

// sector traces of powers of a (truncated) matrix up to jmax; sigma filled from even powers
TraceTable matrix_traces(const BlockOperator& T, int jmax);

struct LogDet {
  double log_abs = 0;  // -inf at an exact zero
  double phase = 0;
  bool zero = false;
  cplx value() const;
};

// det_4(1 - alpha T) from the eigenvalues of T
LogDet det4_eig(const Eigen::VectorXcd& evals, cplx alpha);
LogDet det4_eig(const BlockOperator& T, cplx alpha);

// mu_j, j = 0..n, from the Hessenberg determinants of the trace recursion
std::vector<cplx> det4_mu(const TraceTable& traces, int n);

struct SeriesValue {
  cplx value;
  double tail;  // +inf when it overflows
};

SeriesValue det4_series(const TraceTable& traces, cplx alpha, int n);

// sum_{j > n} (4 e^{3/4} |alpha|)^j / (j!)^{1/4}
double det4_tail(double abs_alpha, int n);

// log10 of 1 / (|alpha| ((1 + 3|alpha|)^2 + e^{3(4|alpha|+1)^4/4} / |det_4|))
double stability_bound(cplx alpha, const LogDet& det);

struct PseudospectrumGrid {
  double re0, re1, im0, im1;
  int nx, ny;
  Eigen::MatrixXd values;  // (ix, iy) -> sigma_min(T - z)
  std::vector<double> epsilon_levels;
  cplx node(int ix, int iy) const;
};

PseudospectrumGrid pseudospectrum_grid(const BlockOperator& T, double re0, double re1, double im0, double im1,
                                       int nx, int ny);

struct RankOne {
  double norm;
  Eigen::MatrixXcd R;  // mu is an eigenvalue of T + R
};

RankOne min_rank1_norm(const BlockOperator& T, cplx mu);

struct LinearFit {
  double slope = 0, intercept = 0, r_squared = 0;
  int n = 0;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct InstabilityScan {
  std::vector<double> alpha, sigma;
  LinearFit fit;  // log sigma against alpha
};

// sigma_min(T + 1/alpha) along real alpha
InstabilityScan instability_scan(const BlockOperator& T, const std::vector<double>& alphas);

}  // namespace tbg
