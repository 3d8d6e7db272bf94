#pragma once

#include <cstdint>
#include <vector>

#include "tbg/determinant.hpp"
#include "tbg/magic.hpp"

namespace tbg {

// W = [[A+, V+], [V-, A-]] as trigonometric polynomials; V+ and V- carry the symmetries of
// U(z) and U(-z), A+ and A- are Gamma_3-periodic
struct Perturbation {
  std::vector<FourierMode> a_plus, v_plus, v_minus, a_minus;
  double sup_norm = 0;  // sup_z ||W(z)|| after normalisation (1 up to sampling)
};

struct PerturbationSpec {
  int shells = 2;       // lowest Fourier shells per entry
  int sup_grid = 64;    // samples per side of the Gamma_3 cell for the sup norm
  bool diagonal = true; // include A+ and A-
};

Perturbation sample_perturbation(const PerturbationSpec& spec, std::uint64_t seed);

// 2x2 matrix W(z)
Eigen::Matrix2cd evaluate(const Perturbation& w, cplx z);

// (2D + k)^{-1} W on the sector ell basis of T
Eigen::MatrixXcd perturbation_operator(const Perturbation& w, const BlockOperator& T);

struct ScatterSample {
  int realization = 0;
  std::uint64_t seed = 0;
  double dT_norm = 0;              // ||Delta T||
  std::vector<cplx> eigenvalues;   // of T + Delta T
  int containment_violations = 0;  // sigma_min(T - mu') > ||Delta T|| + 1e-9
  int bound_violations = 0;        // eigenvalue where the stability bound exceeds ||Delta T||
  double worst_containment = 0;    // max sigma_min(T - mu') - ||Delta T||
};

struct ScatterResult {
  std::vector<ScatterSample> samples;
  Eigen::VectorXcd unperturbed;
};

ScatterResult perturbed_magic_scatter(const PotentialSpec& pot, double lambda, int n_samples, std::uint64_t seed,
                                      const PerturbationSpec& spec, double cutoff = 8.0, cplx k = default_k);

}  // namespace tbg
