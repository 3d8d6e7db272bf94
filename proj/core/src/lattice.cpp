#include "tbg/lattice.hpp"

#include <cmath>

namespace tbg {

namespace {

std::array<cplx, 2> dual_pair(cplx g1, cplx g2) {
  // rows of G are (Re g_i, Im g_i); the dual vectors are the columns of 2 pi G^{-1}
  double a = g1.real(), b = g1.imag(), c = g2.real(), d = g2.imag();
  double det = a * d - b * c;
  double s = 2.0 * pi / det;
  return {cplx(d * s, -c * s), cplx(-b * s, a * s)};
}

}  // namespace

MoireLattice build_lattice() {
  MoireLattice lat;
  const cplx I(0.0, 1.0);
  lat.omega = std::polar(1.0, 2.0 * pi / 3.0);
  const cplx w = lat.omega;
  lat.gamma_gens = {4.0 * pi * I * w, 4.0 * pi * I * w * w};
  lat.gamma_star_gens = dual_pair(lat.gamma_gens[0], lat.gamma_gens[1]);
  lat.gamma3_gens = {lat.gamma_gens[0] / 3.0, lat.gamma_gens[1] / 3.0};
  lat.moire_star_gens = dual_pair(lat.gamma3_gens[0], lat.gamma3_gens[1]);
  for (int j = 0; j < 3; ++j) lat.q[j] = I * std::pow(w, j);
  auto area = [](cplx u, cplx v) { return std::abs((std::conj(u) * v).imag()); };
  lat.cell_area = area(lat.gamma_gens[0], lat.gamma_gens[1]);
  lat.moire_cell_area = area(lat.gamma3_gens[0], lat.gamma3_gens[1]);
  lat.K = 0.0;
  lat.K_prime = -I;
  lat.Gamma = cplx(std::sqrt(3.0) / 2.0, -0.5);
  lat.M = cplx(0.0, -0.5);
  return lat;
}

const MoireLattice& lattice() {
  static const MoireLattice lat = build_lattice();
  return lat;
}

std::array<double, 2> lattice_coords(cplx z, cplx e1, cplx e2) {
  double a = e1.real(), b = e2.real(), c = e1.imag(), d = e2.imag();
  double det = a * d - b * c;
  return {(d * z.real() - b * z.imag()) / det, (-c * z.real() + a * z.imag()) / det};
}

cplx min_image(cplx z, cplx e1, cplx e2) {
  auto x = lattice_coords(z, e1, e2);
  cplx base = z - std::round(x[0]) * e1 - std::round(x[1]) * e2;
  cplx best = base;
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j) {
      cplx c = base + double(i) * e1 + double(j) * e2;
      if (std::abs(c) < std::abs(best)) best = c;
    }
  return best;
}

}  // namespace tbg
