#include "tbg/determinant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tbg/linalg.hpp"
#include "tbg/parallel.hpp"

namespace tbg {

double reference_trace(int p) {
  static const double r[] = {0.0,
                             2.0 / 9.0,
                             4.0 / 9.0,
                             32.0 / 63.0,
                             40.0 / 81.0,
                             9560.0 / 20007.0,
                             245120.0 / 527877.0,
                             1957475168.0 / 4337177481.0,
                             13316086960.0 / 30360242367.0};
  if (p < 1 || p > 8) return 0.0;
  return std::pow(3.0, p) * pi / std::sqrt(3.0) * r[p];
}

namespace {

// C-infinity step: 1 for x >= 1, 0 for x <= 0
double smooth_step(double x) {
  if (x <= 0) return 0.0;
  if (x >= 1) return 1.0;
  double a = std::exp(-1.0 / x), b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

void fill_reference(TraceTable& t) {
  for (auto& [p, s] : t.sigma) {
    double ref = reference_trace(p);
    t.reference[p] = ref;
    t.rel_err[p] = ref != 0 ? std::abs(s - ref) / ref : std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

TraceTable compute_traces(const PotentialSpec& pot, cplx k, double cutoff, int pmax) {
  if (pmax < 2) throw std::invalid_argument("pmax must be at least 2");
  PlaneWaveBasis b = enumerate_basis(k, cutoff + pmax + 1, 2, true);
  Eigen::SparseMatrix<cplx> T = sparse_T(b, pot);
  const int jmax = 2 * pmax;
  std::vector<int> cols;
  std::vector<double> wt;
  for (int f = 0; f < b.size(); ++f) {
    double r = std::abs(b.momenta[b.momentum_of(f)]);
    double w = smooth_step((cutoff - r) / (0.5 * cutoff));
    if (w > 0) {
      cols.push_back(f);
      wt.push_back(w);
    }
  }
  const int block = 64;
  const int nblocks = (int(cols.size()) + block - 1) / block;
  std::vector<std::vector<cplx>> partial(nblocks, std::vector<cplx>(jmax + 1, 0.0));
  parallel_for(nblocks, [&](int bi) {
    int c0 = bi * block, nc = std::min(block, int(cols.size()) - c0);
    Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(b.size(), nc);
    for (int c = 0; c < nc; ++c) V(cols[c0 + c], c) = 1.0;
    for (int j = 1; j <= jmax; ++j) {
      V = T * V;
      for (int c = 0; c < nc; ++c) partial[bi][j] += wt[c0 + c] * V(cols[c0 + c], c);
    }
  });
  std::vector<cplx> full(jmax + 1, 0.0);
  for (const auto& p : partial)
    for (int j = 0; j <= jmax; ++j) full[j] += p[j];
  TraceTable t;
  t.cutoff = cutoff;
  t.k_used = k;
  // three sectors with equal traces, two spinor components each
  for (int p = 1; p <= pmax; ++p) t.sigma[p] = full[2 * p] / 6.0;
  t.series.assign(jmax + 1, 0.0);
  for (int j = 4; j <= jmax; ++j) t.series[j] = full[j] / 3.0;
  fill_reference(t);
  return t;
}

TraceTable matrix_traces(const BlockOperator& T, int jmax) {
  if (jmax < 4) throw std::invalid_argument("jmax must be at least 4");
  TraceTable t;
  t.cutoff = T.basis ? T.basis->cutoff : 0.0;
  t.k_used = T.basis ? T.basis->k : 0.0;
  t.series.assign(jmax + 1, 0.0);
  Eigen::MatrixXcd M = T.matrix;
  for (int j = 1; j <= jmax; ++j) {
    if (j > 1) M = M * T.matrix;
    cplx tr = M.trace();
    if (j >= 4) t.series[j] = tr;
    if (j % 2 == 0) t.sigma[j / 2] = tr / 2.0;
  }
  fill_reference(t);
  return t;
}

cplx LogDet::value() const {
  if (zero) return 0.0;
  return std::polar(std::exp(log_abs), phase);
}

namespace {

// log(1 - z) + z + z^2/2 + z^3/3
cplx log_det4_factor(cplx z) {
  if (std::abs(z) < 0.25) {
    cplx s = 0, zk = z * z * z;
    for (int k = 4; k < 60; ++k) {
      zk *= z;
      cplx term = zk / double(k);
      s -= term;
      if (std::abs(term) < 1e-18 * std::abs(s)) break;
    }
    return s;
  }
  return std::log(1.0 - z) + z + z * z / 2.0 + z * z * z / 3.0;
}

}  // namespace

LogDet det4_eig(const Eigen::VectorXcd& ev, cplx alpha) {
  // each factor 1 - t alpha lambda, t in [0,1], is a segment starting at 1: it meets the
  // negative axis only through 0, so summing principal logs is the continuous branch
  LogDet d;
  cplx s = 0;
  for (int i = 0; i < ev.size(); ++i) {
    cplx z = alpha * ev(i);
    if (1.0 - z == 0.0) {
      d.zero = true;
      d.log_abs = -std::numeric_limits<double>::infinity();
      return d;
    }
    s += log_det4_factor(z);
  }
  d.log_abs = s.real();
  d.phase = s.imag();
  return d;
}

LogDet det4_eig(const BlockOperator& T, cplx alpha) { return det4_eig(eigenvalues(T.matrix), alpha); }

std::vector<cplx> det4_mu(const TraceTable& traces, int n) {
  if (int(traces.series.size()) <= n) throw std::invalid_argument("traces do not reach the requested order");
  std::vector<cplx> mu(n + 1, 0.0);
  mu[0] = 1.0;
  auto s = [&](int j) -> cplx { return j < 4 ? cplx(0.0) : traces.series[j]; };
  for (int m = 1; m <= n; ++m) {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j <= i; ++j) A(i, j) = s(i - j + 1);
      if (i + 1 < m) A(i, i + 1) = double(m - i - 1);
    }
    mu[m] = A.determinant();
  }
  return mu;
}

double det4_tail(double a, int n) {
  const double x = 4.0 * std::exp(0.75) * a;
  if (x == 0) return 0.0;
  // log-sum-exp over j > n; terms decrease once (j+1)^{1/4} > x
  const double lx = std::log(x);
  double mx = -std::numeric_limits<double>::infinity();
  std::vector<double> logs;
  for (int j = n + 1;; ++j) {
    double lt = j * lx - std::lgamma(j + 1.0) / 4.0;
    logs.push_back(lt);
    mx = std::max(mx, lt);
    if (mx > 710.0) return std::numeric_limits<double>::infinity();
    bool past_peak = std::pow(j + 1.0, 0.25) > x;
    if (past_peak && lt < mx - 50.0) break;
  }
  double s = 0;
  for (double l : logs) s += std::exp(l - mx);
  double lt = mx + std::log(s);
  if (lt > 700.0) return std::numeric_limits<double>::infinity();
  return std::exp(lt);
}

SeriesValue det4_series(const TraceTable& traces, cplx alpha, int n) {
  if (n < 4) throw std::invalid_argument("n must be at least 4");
  auto mu = det4_mu(traces, n);
  cplx v = 0, pw = 1.0;
  double fact = 1.0;
  for (int j = 0; j <= n; ++j) {
    if (j > 0) {
      pw *= -alpha;
      fact *= j;
    }
    v += mu[j] * pw / fact;
  }
  return {v, det4_tail(std::abs(alpha), n)};
}

double stability_bound(cplx alpha, const LogDet& det) {
  if (alpha == 0.0) throw std::invalid_argument("alpha must be nonzero");
  if (det.zero) return -std::numeric_limits<double>::infinity();
  const double a = std::abs(alpha);
  double l1 = 2.0 * std::log1p(3.0 * a);
  double l2 = 0.75 * std::pow(4.0 * a + 1.0, 4) - det.log_abs;
  double mx = std::max(l1, l2);
  double lse = mx + std::log(std::exp(l1 - mx) + std::exp(l2 - mx));
  return -(std::log(a) + lse) / std::log(10.0);
}

cplx PseudospectrumGrid::node(int ix, int iy) const {
  double x = nx > 1 ? re0 + (re1 - re0) * ix / (nx - 1) : re0;
  double y = ny > 1 ? im0 + (im1 - im0) * iy / (ny - 1) : im0;
  return {x, y};
}

PseudospectrumGrid pseudospectrum_grid(const BlockOperator& T, double re0, double re1, double im0, double im1,
                                       int nx, int ny) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("resolution must be at least 2 x 2");
  PseudospectrumGrid g{re0, re1, im0, im1, nx, ny, Eigen::MatrixXd(nx, ny), {1e-3, 1e-2, 1e-1}};
  ShiftedSigmaMin sm(T.matrix);
  parallel_for(nx * ny, [&](int i) {
    int ix = i / ny, iy = i % ny;
    g.values(ix, iy) = sm(g.node(ix, iy));
  });
  return g;
}

RankOne min_rank1_norm(const BlockOperator& T, cplx mu) {
  Eigen::MatrixXcd A = T.matrix;
  A.diagonal().array() -= mu;
  SingularTriple st = smallest_singular_triple(A);
  return {st.sigma, -st.sigma * st.u * st.v.adjoint()};
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit needs at least two points");
  const int n = int(x.size());
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) mx += x[i], my += y[i];
  mx /= n, my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.n = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0;
  for (int i = 0; i < n; ++i) {
    double r = y[i] - f.intercept - f.slope * x[i];
    ssr += r * r;
  }
  f.r_squared = syy > 0 ? 1.0 - ssr / syy : 1.0;
  return f;
}

InstabilityScan instability_scan(const BlockOperator& T, const std::vector<double>& alphas) {
  InstabilityScan s;
  s.alpha = alphas;
  s.sigma.resize(alphas.size());
  ShiftedSigmaMin sm(T.matrix);
  parallel_for(int(alphas.size()), [&](int i) { s.sigma[i] = sm(cplx(-1.0 / alphas[i], 0.0)); });
  std::vector<double> ly;
  for (double v : s.sigma) ly.push_back(std::log(std::max(v, 1e-300)));
  s.fit = fit_line(alphas, ly);
  return s;
}

}  // namespace tbg
