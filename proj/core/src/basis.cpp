#include "tbg/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tbg {

namespace {

std::int64_t key(int n1, int n2) {
  return (std::int64_t(n1) + (1 << 30)) << 32 | std::int64_t(std::uint32_t(n2 + (1 << 30)));
}

int mod3(int n) { return ((n % 3) + 3) % 3; }

}  // namespace

int PlaneWaveBasis::find(int n1, int n2) const {
  auto it = lookup_.find(key(n1, n2));
  return it == lookup_.end() ? -1 : it->second;
}

void PlaneWaveBasis::build_lookup() {
  lookup_.clear();
  for (int i = 0; i < nmom(); ++i) lookup_[key(shifts[i][0], shifts[i][1])] = i;
}

int sector_label(int component, int n1, int n2) {
  // e^{i<a, q_j>} = conj(omega)^{a1+a2}; the first component of each spinor picks up
  // an extra omega^{a1+a2}
  int N = n1 + n2;
  bool first = (component % 2 == 0) && component >= 0;
  return first ? mod3(1 - N) : mod3(-N);
}

double distance_to_dual_lattice(cplx k) {
  const auto& lat = lattice();
  return lattice_distance(k, lat.gamma_star_gens[0], lat.gamma_star_gens[1]);
}

PlaneWaveBasis enumerate_basis(cplx k, double cutoff, int components, bool require_invertible) {
  if (!(cutoff > 0)) throw std::invalid_argument("cutoff must be positive");
  if (components != 1 && components != 2 && components != 4)
    throw std::invalid_argument("components must be 1, 2 or 4");
  if (require_invertible && distance_to_dual_lattice(k) < 1e-8)
    throw std::invalid_argument("k lies on the dual lattice: 2D + k is not invertible, choose another k");
  const auto& lat = lattice();
  PlaneWaveBasis b;
  b.k = k;
  b.cutoff = cutoff;
  b.components = components;
  // |n1 q0 + n2 q1|^2 = n1^2 + n2^2 - n1 n2 >= (n1^2 + n2^2) / 2
  int M = int(std::ceil(std::sqrt(2.0) * (cutoff + std::abs(k)))) + 1;
  struct Entry {
    cplx p;
    std::array<int, 2> n;
    long long r;
    double arg;
  };
  std::vector<Entry> es;
  for (int n1 = -M; n1 <= M; ++n1)
    for (int n2 = -M; n2 <= M; ++n2) {
      cplx p = k + double(n1) * lat.q[0] + double(n2) * lat.q[1];
      double r = std::abs(p);
      if (r <= cutoff + 1e-9) es.push_back({p, {n1, n2}, std::llround(r * 1e8), std::arg(p)});
    }
  std::sort(es.begin(), es.end(), [](const Entry& a, const Entry& c) {
    if (a.r != c.r) return a.r < c.r;
    if (a.arg != c.arg) return a.arg < c.arg;
    return a.n < c.n;
  });
  for (const auto& e : es) {
    b.momenta.push_back(e.p);
    b.shifts.push_back(e.n);
  }
  b.sector_labels.resize(b.size());
  for (int c = 0; c < components; ++c)
    for (int i = 0; i < b.nmom(); ++i)
      b.sector_labels[b.index(c, i)] =
          components == 1 ? sector_label(1, b.shifts[i][0], b.shifts[i][1])
                          : sector_label(c, b.shifts[i][0], b.shifts[i][1]);
  b.build_lookup();
  return b;
}

bool rotation_closed(const PlaneWaveBasis& b, double tol) {
  const auto& lat = lattice();
  cplx wb = std::conj(lat.omega);
  for (const auto& p : b.momenta) {
    cplx g = wb * p - b.k;
    auto x = lattice_coords(g, lat.q[0], lat.q[1]);
    int n1 = int(std::lround(x[0])), n2 = int(std::lround(x[1]));
    cplx back = double(n1) * lat.q[0] + double(n2) * lat.q[1];
    if (std::abs(back - g) > tol || b.find(n1, n2) < 0) return false;
  }
  return true;
}

}  // namespace tbg
