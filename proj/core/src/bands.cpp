#include "tbg/bands.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "tbg/linalg.hpp"
#include "tbg/parallel.hpp"

namespace tbg {

std::vector<cplx> zone_grid(int n) {
  const auto& lat = lattice();
  std::vector<cplx> ks;
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t)
      ks.push_back(double(s) / n * lat.moire_star_gens[0] + double(t) / n * lat.moire_star_gens[1]);
  return ks;
}

std::vector<cplx> polyline(const std::vector<cplx>& corners, int n) {
  std::vector<cplx> out;
  if (corners.empty()) return out;
  for (std::size_t c = 0; c + 1 < corners.size(); ++c)
    for (int i = 0; i < n; ++i) out.push_back(corners[c] + double(i) / n * (corners[c + 1] - corners[c]));
  out.push_back(corners.back());
  return out;
}

std::vector<cplx> default_path(int n) {
  const auto& lat = lattice();
  return polyline({lat.K, lat.Gamma, lat.M, lat.K}, n);
}

BandResult bands_on_path(double m, cplx alpha, const PotentialSpec& pot, const std::vector<cplx>& path,
                         double cutoff) {
  if (path.empty()) throw std::invalid_argument("empty path");
  std::vector<Eigen::VectorXd> rows(path.size());
  parallel_for(int(path.size()), [&](int i) {
    rows[i] = hermitian_eigenvalues(sector_H(pot, m, alpha, path[i], cutoff).matrix);
  });
  // the sector dimension can change along the path; keep the common middle block
  int nb = int(rows[0].size());
  for (const auto& r : rows) nb = std::min(nb, int(r.size()));
  nb -= nb % 2;
  BandResult br;
  br.kpath = path;
  br.m = m;
  br.alpha = alpha;
  br.energies.resize(int(path.size()), nb);
  double s = 0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i > 0) s += std::abs(path[i] - path[i - 1]);
    br.path_coord.push_back(s);
    int off = (int(rows[i].size()) - nb) / 2;
    br.energies.row(int(i)) = rows[i].segment(off, nb).transpose();
  }
  return br;
}

double upper_band_edge(cplx alpha, double m, cplx k, const PotentialSpec& pot, double cutoff) {
  Eigen::VectorXd e = hermitian_eigenvalues(sector_H(pot, m, alpha, k, cutoff).matrix);
  return e(int(e.size()) / 2 + 1);
}

namespace {

struct GapCtx {
  cplx alpha;
  double m, cutoff;
  const PotentialSpec* pot;
};

double gap_objective(const gsl_vector* x, void* p) {
  auto* c = static_cast<GapCtx*>(p);
  const auto& lat = lattice();
  cplx k = gsl_vector_get(x, 0) * lat.moire_star_gens[0] + gsl_vector_get(x, 1) * lat.moire_star_gens[1];
  return upper_band_edge(c->alpha, c->m, k, *c->pot, c->cutoff);
}

}  // namespace

double spectral_gap(cplx alpha, double m, const PotentialSpec& pot, int kgrid, double cutoff) {
  if (kgrid < 2) throw std::invalid_argument("kgrid must be at least 2");
  auto ks = zone_grid(kgrid);
  std::vector<double> edge(ks.size()), flat(ks.size());
  parallel_for(int(ks.size()), [&](int i) {
    Eigen::VectorXd e = hermitian_eigenvalues(sector_H(pot, m, alpha, ks[i], cutoff).matrix);
    const int h = int(e.size()) / 2;
    flat[i] = std::max(std::abs(std::abs(e(h - 1)) - m), std::abs(std::abs(e(h)) - m));
    edge[i] = e(h + 1);
  });
  double worst = *std::max_element(flat.begin(), flat.end());
  int best = int(std::min_element(edge.begin(), edge.end()) - edge.begin());
  if (worst > 1e-4 || edge[best] - m < 100.0 * std::max(worst, 1e-12))
    throw std::domain_error("no separated flat-band cluster: max flat deviation " + std::to_string(worst) +
                            ", next band at " + std::to_string(edge[best]));
  // simplex refinement in zone coordinates from the best grid node
  GapCtx ctx{alpha, m, cutoff, &pot};
  gsl_multimin_function F{&gap_objective, 2, &ctx};
  gsl_vector* x = gsl_vector_alloc(2);
  gsl_vector* step = gsl_vector_alloc(2);
  gsl_vector_set(x, 0, double(best / kgrid) / kgrid);
  gsl_vector_set(x, 1, double(best % kgrid) / kgrid);
  gsl_vector_set_all(step, 0.5 / kgrid);
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2);
  gsl_multimin_fminimizer_set(s, &F, x, step);
  for (int it = 0; it < 400; ++it) {
    if (gsl_multimin_fminimizer_iterate(s)) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-9) == GSL_SUCCESS) break;
  }
  double emin = std::min(s->fval, edge[best]);
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(x);
  gsl_vector_free(step);
  return std::sqrt(std::max(emin * emin - m * m, 0.0));
}

namespace {

struct BlochStates {
  Eigen::MatrixXcd vecs;                        // rows follow the sector support
  std::map<std::array<int, 3>, int> row_of;     // (component, n1, n2) -> row
  double gap = 0;
};

BlochStates bloch_states(cplx alpha, double m, cplx k, const PotentialSpec& pot, double cutoff,
                         const std::vector<int>& sel) {
  BlockOperator H = sector_H(pot, m, alpha, k, cutoff);
  Eigen::VectorXd e;
  Eigen::MatrixXcd V;
  hermitian_eigensystem(H.matrix, e, V);
  const int h = int(e.size()) / 2;
  std::vector<int> cols;
  for (int b : sel) cols.push_back(b > 0 ? h + b - 1 : h + b);
  std::sort(cols.begin(), cols.end());
  BlochStates st;
  st.vecs.resize(V.rows(), int(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) st.vecs.col(int(j)) = V.col(cols[j]);
  // separation of the selected set from the rest
  st.gap = 1e300;
  for (int c = 0; c < int(e.size()); ++c) {
    if (std::binary_search(cols.begin(), cols.end(), c)) continue;
    for (int s : cols) st.gap = std::min(st.gap, std::abs(e(c) - e(s)));
  }
  const auto& b = *H.basis;
  for (int r = 0; r < H.dim(); ++r) {
    int f = H.support[r];
    int i = b.momentum_of(f);
    st.row_of[{b.component_of(f), b.shifts[i][0], b.shifts[i][1]}] = r;
  }
  return st;
}

// U = det(A^* B) / |det| with B's lattice label shifted by (d1, d2)
cplx link(const BlochStates& A, const BlochStates& B, int d1, int d2) {
  const int nb = int(A.vecs.cols());
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(nb, nb);
  for (const auto& [key, ra] : A.row_of) {
    auto it = B.row_of.find({key[0], key[1] + d1, key[2] + d2});
    if (it == B.row_of.end()) continue;
    M += A.vecs.row(ra).adjoint() * B.vecs.row(it->second);
  }
  cplx d = M.determinant();
  if (std::abs(d) < 1e-12) throw std::domain_error("singular plaquette link");
  return d / std::abs(d);
}

}  // namespace

ChernResult chern_fhs(cplx alpha, double m, const PotentialSpec& pot, const std::vector<int>& band_selector,
                      int kgrid, double cutoff) {
  if (band_selector.empty()) throw std::invalid_argument("empty band selector");
  if (kgrid < 3) throw std::invalid_argument("kgrid must be at least 3");
  for (int b : band_selector)
    if (b == 0) throw std::invalid_argument("band offsets are nonzero");
  const int n = kgrid;
  auto ks = zone_grid(n);
  std::vector<BlochStates> st(ks.size());
  parallel_for(int(ks.size()), [&](int i) { st[i] = bloch_states(alpha, m, ks[i], pot, cutoff, band_selector); });
  ChernResult res;
  res.min_gap = 1e300;
  for (const auto& s : st) res.min_gap = std::min(res.min_gap, s.gap);
  if (res.min_gap < 1e-6) throw std::domain_error("gap closure on the k grid");
  // b1 = q1 - q0 is (-1, 1) and b2 = q2 - q0 is (-2, -1) in (q0, q1) coordinates; a state at
  // k + b has coefficients a(g + b) in the labels of k
  auto at = [&](int s, int t) -> const BlochStates& { return st[(s % n) * n + (t % n)]; };
  auto U = [&](int s, int t, int dir) {
    int s2 = s + (dir == 0), t2 = t + (dir == 1);
    int ws = s2 / n - s / n, wt = t2 / n - t / n;
    int d1 = -ws - 2 * wt, d2 = ws - wt;
    return link(at(s, t), at(s2, t2), d1, d2);
  };
  double total = 0;
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t) {
      cplx w = U(s, t, 0) * U(s + 1, t, 1) * std::conj(U(s, t + 1, 0)) * std::conj(U(s, t, 1));
      total += std::arg(w);
    }
  res.raw = total / (2.0 * pi);
  res.chern = int(std::lround(res.raw));
  return res;
}

}  // namespace tbg
