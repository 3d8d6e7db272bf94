#pragma once

#include <vector>

#include "tbg/operators.hpp"

namespace tbg {

inline constexpr cplx default_k{0.0, -0.5};
inline constexpr double default_cutoff = 12.0;

struct MagicAngle {
  cplx alpha;
  cplx eigenvalue;  // 1 / alpha
  int degeneracy = 1;
  int sector = 0;
  bool generic = true;
  double residual = 0;  // sigma_min(D(alpha) + k) on the sector
};

struct MagicAngleSet {
  std::vector<MagicAngle> alphas;
  double cutoff = 0;
  cplx k_used;
};

MagicAngleSet compute_magic_angles(const PotentialSpec& pot, double cutoff, cplx k, double alpha_max);

// numerical multiplicity of 1/alpha as an eigenvalue of T; throws std::domain_error when
// 1/alpha is farther than 1e-6 from Spec(T)
int classify_degeneracy(const BlockOperator& T, cplx alpha, bool* generic = nullptr);

// sigma_min of D(alpha) + k on sector ell
double kernel_residual(const PotentialSpec& pot, cplx alpha, cplx k, double cutoff, int ell = 0);

// max over a kgrid x kgrid zone grid of | |E_{+-1}(k)| - m |
double flat_band_certificate(cplx alpha, double m, int kgrid_size, const PotentialSpec& pot = default_potential(),
                             double cutoff = default_cutoff);

}  // namespace tbg
