#pragma once

#include <array>
#include <complex>

namespace tbg {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

// <z,w> = Re(z conj w)
inline double pairing(cplx z, cplx w) { return z.real() * w.real() + z.imag() * w.imag(); }

struct MoireLattice {
  cplx omega;
  std::array<cplx, 2> gamma_gens;       // Gamma = 4 pi i omega (Z + omega Z)
  std::array<cplx, 2> gamma_star_gens;  // <gamma_i, gamma*_j> = 2 pi delta_ij
  std::array<cplx, 2> gamma3_gens;      // Gamma_3 = Gamma / 3
  std::array<cplx, 2> moire_star_gens;  // 3 Gamma*, dual to gamma3_gens; b1 = q1 - q0, b2 = q2 - q0
  std::array<cplx, 3> q;                // tunnelling momenta i omega^j
  double cell_area = 0;                 // |C / Gamma|
  double moire_cell_area = 0;           // |C / Gamma_3|

  // corners and centre of the hexagonal zone C / 3Gamma*
  cplx K, K_prime, Gamma, M;
};

MoireLattice build_lattice();

// cached instance of build_lattice()
const MoireLattice& lattice();

// real coordinates (x, y) with z = x e1 + y e2
std::array<double, 2> lattice_coords(cplx z, cplx e1, cplx e2);

// the shortest representative of z modulo Z e1 + Z e2
cplx min_image(cplx z, cplx e1, cplx e2);

inline double lattice_distance(cplx z, cplx e1, cplx e2) { return std::abs(min_image(z, e1, e2)); }

}  // namespace tbg
