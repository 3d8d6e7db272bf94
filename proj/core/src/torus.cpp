#include "tbg/torus.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace tbg {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

namespace {

bool first_of_pair(int comp) { return comp % 2 == 0; }

// coordinates of r - q0 in (b1, b2)
std::array<int, 2> moire_coords(cplx r) {
  const auto& lat = lattice();
  auto x = lattice_coords(r - lat.q[0], lat.moire_star_gens[0], lat.moire_star_gens[1]);
  std::array<int, 2> n{int(std::lround(x[0])), int(std::lround(x[1]))};
  cplx back = double(n[0]) * lat.moire_star_gens[0] + double(n[1]) * lat.moire_star_gens[1];
  if (std::abs(back - (r - lat.q[0])) > 1e-9) throw std::invalid_argument("potential mode is not in q0 + 3 Gamma*");
  return n;
}

}  // namespace

TorusBasis::TorusBasis(int L, double cutoff) : L_(L), cutoff_(cutoff) {
  if (L < 1) throw std::invalid_argument("L must be positive");
  if (!(cutoff > 0)) throw std::invalid_argument("cutoff must be positive");
  const auto& lat = lattice();
  const cplx b1 = lat.moire_star_gens[0], b2 = lat.moire_star_gens[1];
  int M = int(std::ceil(L * (cutoff + 1.0) * std::sqrt(2.0 / 3.0))) + 2;
  for (int c = 0; c < 4; ++c) {
    struct Tmp {
      Entry e;
      long long r;
      double a;
    };
    std::vector<Tmp> tmp;
    cplx off = first_of_pair(c) ? lat.q[0] : cplx(0.0);
    for (int m1 = -M; m1 <= M; ++m1)
      for (int m2 = -M; m2 <= M; ++m2) {
        cplx p = off + (double(m1) * b1 + double(m2) * b2) / double(L);
        if (std::abs(p) <= cutoff + 1e-9) tmp.push_back({{c, {m1, m2}, p}, std::llround(std::abs(p) * 1e8), std::arg(p)});
      }
    std::sort(tmp.begin(), tmp.end(), [](const Tmp& x, const Tmp& y) {
      if (x.r != y.r) return x.r < y.r;
      if (x.a != y.a) return x.a < y.a;
      return x.e.m < y.e.m;
    });
    for (const auto& t : tmp) {
      entries_.push_back(t.e);
      max_index_ = std::max({max_index_, std::abs(t.e.m[0]), std::abs(t.e.m[1])});
    }
  }
  span_ = 2 * (max_index_ + L_ + 1) + 1;
  lookup_.assign(std::size_t(4) * span_ * span_, -1);
  const int h = max_index_ + L_ + 1;
  for (int i = 0; i < size(); ++i) {
    const auto& e = entries_[i];
    lookup_[(std::size_t(e.comp) * span_ + (e.m[0] + h)) * span_ + (e.m[1] + h)] = i;
  }
}

int TorusBasis::find(int comp, int m1, int m2) const {
  const int h = max_index_ + L_ + 1;
  if (std::abs(m1) > h || std::abs(m2) > h) return -1;
  return lookup_[(std::size_t(comp) * span_ + (m1 + h)) * span_ + (m2 + h)];
}

double TorusBasis::area() const { return double(L_) * L_ * lattice().moire_cell_area; }

Eigen::MatrixXcd torus_hamiltonian(const TorusBasis& tb, double m, cplx alpha, const PotentialSpec& pot) {
  const int n = tb.size();
  const int L = tb.L();
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n, n);
  std::vector<std::array<int, 2>> shifts;
  for (const auto& md : pot.modes) shifts.push_back(moire_coords(md.momentum));
  auto add = [&](int r, int c, cplx v) {
    H(r, c) += v;
    H(c, r) += std::conj(v);
  };
  for (int i = 0; i < n; ++i) {
    const auto& e = tb.entries()[i];
    H(i, i) += e.comp < 2 ? m : -m;
    if (e.comp >= 2) continue;
    // D maps (c0, c1) to (c2, c3)
    int j = tb.find(e.comp + 2, e.m[0], e.m[1]);
    add(j, i, e.p);
    for (std::size_t k = 0; k < shifts.size(); ++k) {
      cplx a = alpha * pot.modes[k].coeff;
      if (e.comp == 1) {
        // U: second -> first, p + r
        int t = tb.find(2, e.m[0] + L * shifts[k][0], e.m[1] + L * shifts[k][1]);
        if (t >= 0) add(t, i, a);
      } else {
        // U(-z): first -> second, p - r
        int t = tb.find(3, e.m[0] - L * shifts[k][0], e.m[1] - L * shifts[k][1]);
        if (t >= 0) add(t, i, a);
      }
    }
  }
  return H;
}

cplx TorusGrid::z(int i1, int i2) const {
  const auto& lat = lattice();
  return (double(s_of(i1)) * L / N) * lat.gamma3_gens[0] + (double(s_of(i2)) * L / N) * lat.gamma3_gens[1];
}

std::array<double, 2> TorusGrid::cell_coords(int i1, int i2) const {
  return {double(s_of(i1)) * L / N, double(s_of(i2)) * L / N};
}

TorusGrid make_grid(const TorusBasis& tb, int min_points) {
  TorusGrid g;
  g.L = tb.L();
  int need = std::max(4 * tb.max_index() + 1, min_points);
  g.N = ((need + g.L - 1) / g.L) * g.L;
  if (g.N % 2) g.N += g.L;
  return g;
}

Eigen::MatrixXcd compress(const TorusBasis& tb, const TorusGrid& g, const std::vector<double>& f,
                          const std::array<std::array<cplx, 4>, 4>& w) {
  const int N = g.N;
  if (int(f.size()) != N * N) throw std::invalid_argument("grid field has the wrong size");
  if (N < 4 * tb.max_index() + 1) throw std::invalid_argument("aliasing guard: grid must be at least 4x the basis index range");
  std::vector<fftw_complex> buf(std::size_t(N) * N);
  for (std::size_t i = 0; i < buf.size(); ++i) {
    buf[i][0] = f[i];
    buf[i][1] = 0.0;
  }
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lk(fftw_planner_mutex());
    plan = fftw_plan_dft_2d(N, N, buf.data(), buf.data(), FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lk(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  const double scale = 1.0 / (double(N) * N);
  auto fh = [&](int d1, int d2) {
    d1 = ((d1 % N) + N) % N;
    d2 = ((d2 % N) + N) % N;
    const auto& v = buf[std::size_t(d1) * N + d2];
    return cplx(v[0], v[1]) * scale;
  };
  const int n = tb.size();
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
  const auto& es = tb.entries();
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a) {
      int ca = es[a].comp, cb = es[b].comp;
      if (w[ca][cb] == 0.0 || first_of_pair(ca) != first_of_pair(cb)) continue;
      M(a, b) = w[ca][cb] * fh(es[a].m[0] - es[b].m[0], es[a].m[1] - es[b].m[1]);
    }
  return M;
}

Eigen::MatrixXcd compress_scalar(const TorusBasis& tb, const TorusGrid& g, const std::vector<double>& f,
                                 const std::array<double, 4>& comps) {
  std::array<std::array<cplx, 4>, 4> w{};
  for (int c = 0; c < 4; ++c) w[c][c] = comps[c];
  return compress(tb, g, f, w);
}

Eigen::MatrixXcd synthesis_rows(const TorusBasis& tb, const TorusGrid& g, const std::vector<std::array<int, 2>>& nodes) {
  const int nn = int(nodes.size());
  Eigen::MatrixXcd F = Eigen::MatrixXcd::Zero(4 * nn, tb.size());
  const auto& es = tb.entries();
  for (int r = 0; r < nn; ++r) {
    cplx z = g.z(nodes[r][0], nodes[r][1]);
    for (int e = 0; e < tb.size(); ++e) F(es[e].comp * nn + r, e) = std::polar(1.0 / g.N, pairing(z, es[e].p));
  }
  return F;
}

}  // namespace tbg
