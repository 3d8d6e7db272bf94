#include "tbg/topology.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "tbg/linalg.hpp"
#include "tbg/magic.hpp"
#include "tbg/parallel.hpp"

namespace tbg {

ProjectionData spectral_projection(const Eigen::VectorXd& evals, const Eigen::MatrixXcd& evecs,
                                   std::shared_ptr<const TorusBasis> basis, const TorusGrid& grid, Interval window,
                                   std::string source) {
  std::vector<int> cols;
  for (int i = 0; i < evals.size(); ++i)
    if (evals[i] > window.lo && evals[i] < window.hi) cols.push_back(i);
  ProjectionData P;
  P.V.resize(evecs.rows(), Eigen::Index(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) P.V.col(Eigen::Index(j)) = evecs.col(cols[j]);
  P.window = window;
  P.source = std::move(source);
  P.basis = std::move(basis);
  P.grid = grid;
  return P;
}

namespace {

struct Wrapped {
  cplx w;
  std::array<double, 2> x;  // cell coordinates relative to the corner
};

Wrapped wrap(cplx z, cplx c, int L) {
  const auto& lat = lattice();
  const cplx A1 = lat.gamma3_gens[0], A2 = lat.gamma3_gens[1];
  auto x = lattice_coords(z - c, double(L) * A1, double(L) * A2);
  x[0] -= std::round(x[0]);
  x[1] -= std::round(x[1]);
  Wrapped out;
  out.w = double(L) * (x[0] * A1 + x[1] * A2);
  out.x = {x[0] * L, x[1] * L};
  return out;
}

std::array<double, 4> sublattice_weights(int sub) {
  if (sub == 0) return {1, 1, 1, 1};
  if (sub == 1) return {1, 1, 0, 0};
  if (sub == 2) return {0, 0, 1, 1};
  throw std::invalid_argument("sublattice must be 0, 1 or 2");
}

cplx trace_product(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
  // tr(A B)
  return (A.transpose().cwiseProduct(B)).sum();
}

}  // namespace

SwitchOperators switch_operators(const TorusBasis& tb, const TorusGrid& g, const SwitchFunctions& sw, const TraceRegion& tr) {
  const auto& lat = lattice();
  const cplx A1 = lat.gamma3_gens[0], A2 = lat.gamma3_gens[1];
  const double hx = std::abs((A2 - A1).real()), vy = std::abs((A1 + A2).imag());
  const cplx c(0.5 + sw.theta1_offset * hx, 0.5 + sw.theta2_offset * vy);
  const int N = g.N, L = g.L;
  const double h = tr.half_width < 0 ? 0.5 * (L - 4) : tr.half_width;
  if (!tr.full && !(h > 0)) throw std::invalid_argument("trace region is empty; use L >= 5 or set half_width");
  std::vector<double> t1(std::size_t(N) * N), t2(t1.size()), reg(t1.size());
  for (int i1 = 0; i1 < N; ++i1)
    for (int i2 = 0; i2 < N; ++i2) {
      auto w = wrap(g.z(i1, i2), c, L);
      std::size_t idx = std::size_t(i1) * N + i2;
      t1[idx] = w.w.real() >= 0 ? 1.0 : 0.0;
      t2[idx] = w.w.imag() >= 0 ? 1.0 : 0.0;
      reg[idx] = (std::abs(w.x[0]) < h && std::abs(w.x[1]) < h) ? 1.0 : 0.0;
    }
  SwitchOperators ops;
  auto wts = sublattice_weights(sw.sublattice);
  ops.theta1 = compress_scalar(tb, g, t1, wts);
  ops.theta2 = compress_scalar(tb, g, t2, wts);
  if (!tr.full) ops.region = compress_scalar(tb, g, reg);
  return ops;
}

cplx omega(const Eigen::MatrixXcd& V, const SwitchOperators& ops) {
  Eigen::MatrixXcd X1 = V.adjoint() * ops.theta1 * V;
  Eigen::MatrixXcd X2 = V.adjoint() * ops.theta2 * V;
  Eigen::MatrixXcd C = X1 * X2 - X2 * X1;
  if (ops.region.size() == 0) return C.trace();
  Eigen::MatrixXcd Xc = V.adjoint() * ops.region * V;
  return trace_product(Xc, C);
}

HallResult hall_conductance(const ProjectionData& P, const SwitchFunctions& sw, const TraceRegion& tr) {
  if (!P.basis) throw std::invalid_argument("projection without a torus basis");
  auto ops = switch_operators(*P.basis, P.grid, sw, tr);
  HallResult r;
  r.omega = omega(P.V, ops);
  r.chern = cplx(0, -2.0 * pi) * r.omega;
  return r;
}

HallResult partial_chern(const ProjectionData& P, int i, SwitchFunctions sw, const TraceRegion& tr) {
  if (i != 1 && i != 2) throw std::invalid_argument("sublattice index must be 1 or 2");
  sw.sublattice = i;
  return hall_conductance(P, sw, tr);
}

namespace {

int wrap_cell(int c, int L) {
  int lo = -(L / 2);
  int v = ((c - lo) % L + L) % L + lo;
  return v;
}

std::map<std::array<int, 2>, std::vector<std::array<int, 2>>> cell_nodes(const TorusGrid& g) {
  std::map<std::array<int, 2>, std::vector<std::array<int, 2>>> out;
  for (int i1 = 0; i1 < g.N; ++i1)
    for (int i2 = 0; i2 < g.N; ++i2) {
      auto x = g.cell_coords(i1, i2);
      std::array<int, 2> c{wrap_cell(int(std::floor(x[0] + 0.5)), g.L), wrap_cell(int(std::floor(x[1] + 0.5)), g.L)};
      out[c].push_back({i1, i2});
    }
  return out;
}

double torus_distance(cplx z, int L) {
  const auto& lat = lattice();
  return std::abs(min_image(z, double(L) * lat.gamma3_gens[0], double(L) * lat.gamma3_gens[1]));
}

}  // namespace

DecayFit combes_thomas_decay(const ProjectionData& P, double max_separation) {
  const auto& lat = lattice();
  const int L = P.grid.L;
  if (max_separation < 0) max_separation = 0.5 * L * std::abs(lat.gamma3_gens[0]);
  auto cells = cell_nodes(P.grid);
  Eigen::MatrixXcd B = synthesis_rows(*P.basis, P.grid, cells.at({0, 0})) * P.V;
  DecayFit out;
  std::vector<double> logs;
  for (const auto& [c, nodes] : cells) {
    double d = torus_distance(double(c[0]) * lat.gamma3_gens[0] + double(c[1]) * lat.gamma3_gens[1], L);
    if (d <= 1e-9 || d > max_separation + 1e-9) continue;
    Eigen::MatrixXcd A = synthesis_rows(*P.basis, P.grid, nodes) * P.V;
    double nrm = op_norm(A * B.adjoint());
    out.separation.push_back(d);
    out.norm.push_back(nrm);
  }
  std::vector<double> distinct;
  for (std::size_t i = 0; i < out.norm.size(); ++i)
    if (out.norm[i] > 0) {
      logs.push_back(std::log(out.norm[i]));
      bool seen = false;
      for (double s : distinct) seen = seen || std::abs(s - out.separation[i]) < 1e-9;
      if (!seen) distinct.push_back(out.separation[i]);
    }
  if (distinct.size() < 4) throw std::invalid_argument("fewer than 4 usable separations for the decay fit");
  std::vector<double> xs;
  for (std::size_t i = 0; i < out.norm.size(); ++i)
    if (out.norm[i] > 0) xs.push_back(out.separation[i]);
  out.fit = fit_line(xs, logs);
  out.rate = out.fit.slope;
  out.r_squared = out.fit.r_squared;
  out.rejected = out.rate >= 0 || out.r_squared <= 0.95;
  return out;
}

double WindowFunction::operator()(double E) const {
  const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
  if (!(h > 0)) return 0.0;
  double x = std::abs(E - c) / h;
  if (x >= 1) return 0.0;
  double y = std::clamp((1 - x) / 0.5, 0.0, 1.0);
  auto f = [](double t) { return t > 0 ? std::exp(-1.0 / t) : 0.0; };
  return f(y) / (f(y) + f(1 - y));
}

TransportSeries transport_moment(const TorusBasis& tb, const TorusGrid& g, const Eigen::VectorXd& evals,
                                 const Eigen::MatrixXcd& evecs, double p, const WindowFunction& chi,
                                 const std::vector<double>& times) {
  if (p < 0) throw std::invalid_argument("p must be >= 0");
  const auto& lat = lattice();
  const int N = g.N, L = g.L;
  TransportSeries out;
  out.t = times;
  out.edge_warning = chi.lo < evals.minCoeff() || chi.hi > evals.maxCoeff();
  std::vector<int> sel;
  for (int i = 0; i < evals.size(); ++i)
    if (chi(evals[i]) > 0) sel.push_back(i);
  out.n_states = int(sel.size());
  if (sel.empty()) {
    out.M.assign(times.size(), 0.0);
    return out;
  }
  const int r = int(sel.size());
  Eigen::MatrixXcd V(evecs.rows(), r);
  Eigen::VectorXd E(r), c(r);
  for (int j = 0; j < r; ++j) {
    V.col(j) = evecs.col(sel[j]);
    E[j] = evals[sel[j]];
    c[j] = chi(E[j]);
  }
  std::vector<double> cell(std::size_t(N) * N), W(cell.size());
  const double cap = 0.5 * L * std::abs(lat.gamma3_gens[0]);
  for (int i1 = 0; i1 < N; ++i1)
    for (int i2 = 0; i2 < N; ++i2) {
      auto x = g.cell_coords(i1, i2);
      std::size_t idx = std::size_t(i1) * N + i2;
      bool home = std::floor(x[0] + 0.5) == 0 && std::floor(x[1] + 0.5) == 0;
      cell[idx] = home ? 1.0 : 0.0;
      double d = std::min(torus_distance(g.z(i1, i2), L), cap);
      W[idx] = std::pow(1.0 + d * d, 0.5 * p);
    }
  Eigen::MatrixXcd Ac = V.adjoint() * compress_scalar(tb, g, cell) * V;
  Eigen::MatrixXcd Aw = V.adjoint() * compress_scalar(tb, g, W) * V;
  // M(t) = sum_{n,m} c_n c_m Ac_{mn} Aw_{nm} e^{it(E_n - E_m)}
  Eigen::MatrixXcd K(r, r);
  for (int n = 0; n < r; ++n)
    for (int m = 0; m < r; ++m) K(n, m) = c[n] * c[m] * Ac(m, n) * Aw(n, m);
  for (double t : times) {
    Eigen::VectorXcd ph(r);
    for (int n = 0; n < r; ++n) ph[n] = std::polar(1.0, t * E[n]);
    cplx s = (ph.asDiagonal() * K * ph.conjugate().asDiagonal()).sum();
    out.M.push_back(s.real());
  }
  return out;
}

std::vector<double> time_averaged_moment(const std::vector<double>& t, const std::vector<double>& M,
                                         const std::vector<double>& T_list) {
  if (t.size() < 2 || t.size() != M.size()) throw std::invalid_argument("time grid and series must match and have >= 2 points");
  if (t.front() != 0.0) throw std::invalid_argument("time grid must start at 0");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw std::invalid_argument("time grid must be strictly increasing");
  const double tmax = t.back();
  std::vector<double> out;
  for (double T : T_list) {
    if (!(T > 0)) throw std::invalid_argument("T must be positive");
    if (5.0 * T > tmax) throw std::invalid_argument("T exceeds the time grid coverage / 5");
    double s = 0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i)
      s += 0.5 * (t[i + 1] - t[i]) * (M[i] * std::exp(-t[i] / T) + M[i + 1] * std::exp(-t[i + 1] / T));
    out.push_back(s / T + M.back() * std::exp(-tmax / T));
  }
  return out;
}

std::vector<double> time_averaged_moment(const std::vector<double>& t, const std::vector<std::vector<double>>& Ms,
                                         const std::vector<double>& T_list) {
  if (Ms.empty()) throw std::invalid_argument("empty ensemble");
  std::vector<double> mean(t.size(), 0.0);
  for (const auto& M : Ms) {
    if (M.size() != t.size()) throw std::invalid_argument("series length mismatch");
    for (std::size_t i = 0; i < t.size(); ++i) mean[i] += M[i] / double(Ms.size());
  }
  return time_averaged_moment(t, mean, T_list);
}

std::vector<WannierPoint> wannier_moment(cplx alpha, double p, const std::vector<int>& L_list, const PotentialSpec& pot,
                                         double cutoff, int nc, double check_cutoff) {
  if (p < 0) throw std::invalid_argument("p must be >= 0");
  if (nc < 2) throw std::invalid_argument("need at least 2 grid points per cell side");
  {
    bool generic = true;
    int nu = classify_degeneracy(sector_T(pot, default_k, check_cutoff, 0), alpha, &generic);
    if (nu != 1) throw std::domain_error("wannier moment needs a simple magic angle, multiplicity " + std::to_string(nu));
  }
  const auto& lat = lattice();
  const cplx A1 = lat.gamma3_gens[0], A2 = lat.gamma3_gens[1];
  const cplx b1 = lat.moire_star_gens[0], b2 = lat.moire_star_gens[1];
  const int nn = nc * nc, Mc = 4 * nn;
  std::vector<cplx> zl(nn);
  for (int a = 0; a < nc; ++a)
    for (int b = 0; b < nc; ++b) zl[a * nc + b] = (double(a) / nc - 0.5) * A1 + (double(b) / nc - 0.5) * A2;
  std::vector<WannierPoint> out;
  for (int L : L_list) {
    if (L < 1) throw std::invalid_argument("L must be >= 1");
    const int N = L * nc, LL = L * L;
    std::vector<fftw_complex> Q(std::size_t(Mc) * Mc * LL);
    std::vector<Eigen::MatrixXcd> psis(LL);
    parallel_for(LL, [&](int j) {
      int j1 = j / L, j2 = j % L;
      cplx k = (double(j1) * b1 + double(j2) * b2) / double(L);
      BlockOperator H = sector_H(pot, 0.0, alpha, k, cutoff, 0);
      Eigen::VectorXd e;
      Eigen::MatrixXcd U;
      hermitian_eigensystem(H.matrix, e, U);
      const int h = H.dim() / 2;
      Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(Mc, 2);
      for (int r = 0; r < H.dim(); ++r) {
        int flat = H.support[r];
        int comp = H.basis->component_of(flat);
        cplx pm = H.basis->momenta[H.basis->momentum_of(flat)];
        for (int n = 0; n < nn; ++n) {
          cplx ph = std::polar(1.0 / N, pairing(zl[n], pm));
          psi(comp * nn + n, 0) += ph * U(r, h - 1);
          psi(comp * nn + n, 1) += ph * U(r, h);
        }
      }
      psis[j] = psi;
    });
    for (int j = 0; j < LL; ++j) {
      Eigen::MatrixXcd q = psis[j] * psis[j].adjoint();
      for (int a = 0; a < Mc; ++a)
        for (int b = 0; b < Mc; ++b) {
          auto& dst = Q[(std::size_t(a) * Mc + b) * LL + j];
          dst[0] = q(a, b).real();
          dst[1] = q(a, b).imag();
        }
    }
    int dims[2] = {L, L};
    fftw_plan plan;
    {
      std::lock_guard<std::mutex> lk(fftw_planner_mutex());
      plan = fftw_plan_many_dft(2, dims, Mc * Mc, Q.data(), nullptr, 1, LL, Q.data(), nullptr, 1, LL, FFTW_BACKWARD,
                                FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
      std::lock_guard<std::mutex> lk(fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
    const double cap = 0.5 * L * std::abs(A1);
    double mom = 0;
    for (int g1 = 0; g1 < L; ++g1)
      for (int g2 = 0; g2 < L; ++g2) {
        int x1 = (g1 + L / 2) % L - L / 2, x2 = (g2 + L / 2) % L - L / 2;
        std::vector<double> W(nn);
        for (int n = 0; n < nn; ++n) {
          double d = std::min(torus_distance(zl[n] + double(x1) * A1 + double(x2) * A2, L), cap);
          W[n] = std::pow(1.0 + d * d, 0.5 * p);
        }
        const int j = g1 * L + g2;
        for (int a = 0; a < Mc; ++a) {
          double acc = 0;
          for (int b = 0; b < Mc; ++b) {
            const auto& v = Q[(std::size_t(a) * Mc + b) * LL + j];
            acc += v[0] * v[0] + v[1] * v[1];
          }
          mom += W[a % nn] * acc;
        }
      }
    out.push_back({L, mom});
  }
  return out;
}

}  // namespace tbg
