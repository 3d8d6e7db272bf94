#include "tbg/potential.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace tbg {

cplx PotentialSpec::operator()(cplx z) const {
  cplx s = 0;
  for (const auto& m : modes) s += m.coeff * std::polar(1.0, pairing(z, m.momentum));
  return s;
}

PotentialSpec default_potential() {
  const auto& lat = lattice();
  PotentialSpec pot;
  pot.label = "default";
  for (int j = 0; j < 3; ++j) pot.modes.push_back({lat.q[j], std::pow(lat.omega, j)});
  return pot;
}

SymmetryReport check_symmetries(const PotentialSpec& pot, int samples, std::uint64_t seed) {
  const auto& lat = lattice();
  const cplx w = lat.omega;
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  SymmetryReport r;
  for (int s = 0; s < samples; ++s) {
    cplx z(u(gen), u(gen));
    cplx Uz = pot(z);
    for (int g = 0; g < 2; ++g)
      r.translation = std::max(r.translation, std::abs(pot(z + lat.gamma3_gens[g]) - std::conj(w) * Uz));
    r.rotation = std::max(r.rotation, std::abs(pot(w * z) - w * Uz));
    r.conjugation = std::max(r.conjugation, std::abs(std::conj(Uz) - pot(std::conj(z))));
  }
  for (const auto& m : pot.modes)
    for (const auto& g : lat.gamma_gens) {
      double x = pairing(g, m.momentum) / (2.0 * pi);
      r.periodicity = std::max(r.periodicity, std::abs(x - std::round(x)));
    }
  return r;
}

std::vector<std::array<int, 2>> potential_shifts(const PotentialSpec& pot) {
  const auto& lat = lattice();
  std::vector<std::array<int, 2>> out;
  for (const auto& m : pot.modes) {
    auto x = lattice_coords(m.momentum, lat.q[0], lat.q[1]);
    std::array<int, 2> n{int(std::lround(x[0])), int(std::lround(x[1]))};
    cplx back = double(n[0]) * lat.q[0] + double(n[1]) * lat.q[1];
    if (std::abs(back - m.momentum) > 1e-9)
      throw std::invalid_argument("potential mode is not on the tunnelling lattice Z q0 + Z q1");
    if (((n[0] + n[1]) % 3 + 3) % 3 != 1)
      throw std::invalid_argument("potential mode is not in q0 + 3 Gamma*");
    out.push_back(n);
  }
  return out;
}

}  // namespace tbg
