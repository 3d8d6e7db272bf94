#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tbg/lattice.hpp"

namespace tbg {

struct FourierMode {
  cplx momentum;
  cplx coeff;
};

// U(z) = sum_j c_j e^{i<z, q_j>}
struct PotentialSpec {
  std::vector<FourierMode> modes;
  std::string label;

  cplx operator()(cplx z) const;
};

PotentialSpec default_potential();

// worst pointwise defect of each identity over random samples
struct SymmetryReport {
  double translation = 0;  // U(z+a) = conj(omega)^{a1+a2} U(z), a in Gamma_3
  double rotation = 0;     // U(omega z) = omega U(z)
  double conjugation = 0;  // conj U(z) = U(conj z)
  double periodicity = 0;  // max distance of <gamma, q_j> / 2 pi to an integer
};

SymmetryReport check_symmetries(const PotentialSpec& pot, int samples = 100, std::uint64_t seed = 7);

// Modes must sit in q0 + 3 Gamma*, so U shifts map the tunnelling lattice to itself.
// Throws std::invalid_argument otherwise. Returns integer coordinates (n1, n2) of each
// mode in the basis (q0, q1).
std::vector<std::array<int, 2>> potential_shifts(const PotentialSpec& pot);

}  // namespace tbg
