#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "tbg/lattice.hpp"

namespace tbg {

// Plane waves e^{i<z,p>} e_c with p = k + g, g = n1 q0 + n2 q1 and |p| <= cutoff.
// The lattice Z q0 + Z q1 has index 3 in Gamma*; its three cosets in Gamma* decouple
// under every operator built from U, so one coset is kept.
// Basis vector (c, i) has flat index c * nmom() + i.
class PlaneWaveBasis {
 public:
  cplx k = 0;
  double cutoff = 0;
  int components = 2;
  std::vector<cplx> momenta;
  std::vector<std::array<int, 2>> shifts;
  std::vector<int> sector_labels;

  int nmom() const { return int(momenta.size()); }
  int size() const { return components * nmom(); }
  int index(int c, int i) const { return c * nmom() + i; }
  int component_of(int flat) const { return flat / nmom(); }
  int momentum_of(int flat) const { return flat % nmom(); }

  // momentum index of g = n1 q0 + n2 q1, or -1
  int find(int n1, int n2) const;

  void build_lookup();

 private:
  std::unordered_map<std::int64_t, int> lookup_;
};

// sector label of e^{i<z, k + n1 q0 + n2 q1>} e_c under the twisted Gamma_3 translations
int sector_label(int component, int n1, int n2);

// distance of k to the nearest point of -Gamma* (= Gamma*)
double distance_to_dual_lattice(cplx k);

// Throws std::invalid_argument for cutoff <= 0, components not in {1,2,4}, or
// (when require_invertible) k within 1e-8 of Gamma*.
PlaneWaveBasis enumerate_basis(cplx k, double cutoff, int components, bool require_invertible = false);

// true when omega-bar maps the momentum set onto itself
bool rotation_closed(const PlaneWaveBasis& b, double tol = 1e-9);

}  // namespace tbg
