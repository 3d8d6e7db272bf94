#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <mutex>
#include <vector>

#include "tbg/potential.hpp"

namespace tbg {

// Plane waves on the torus C / (L Gamma_3), restricted to the sector that carries the
// Bloch fibre of the moire zone. Component c has momenta p = [c even] q0 + (m1 b1 + m2 b2) / L
// with |p| <= cutoff; the Bloch block of (m1, m2) is (m1 mod L, m2 mod L).
class TorusBasis {
 public:
  struct Entry {
    int comp;
    std::array<int, 2> m;
    cplx p;
  };

  TorusBasis(int L, double cutoff);

  int L() const { return L_; }
  double cutoff() const { return cutoff_; }
  int size() const { return int(entries_.size()); }
  const std::vector<Entry>& entries() const { return entries_; }
  int find(int comp, int m1, int m2) const;
  int max_index() const { return max_index_; }  // max |m_i|
  // L-torus area
  double area() const;

 private:
  int L_;
  double cutoff_;
  int max_index_ = 0;
  std::vector<Entry> entries_;
  std::vector<int> lookup_;  // dense table over [-max, max]^2 x 4
  int span_ = 0;
};

// clean H(m, alpha) on the torus basis
Eigen::MatrixXcd torus_hamiltonian(const TorusBasis& tb, double m, cplx alpha, const PotentialSpec& pot);

// Real-space grid z(s1, s2) = (s1/N) L A1 + (s2/N) L A2 with centred s in [-N/2, N/2);
// N is a multiple of L and at least 4 max|m| + 1.
struct TorusGrid {
  int L = 0, N = 0;
  int s_of(int idx) const { return idx >= N / 2 ? idx - N : idx; }
  cplx z(int i1, int i2) const;
  // fractional torus coordinates in units of the moire cell, centred
  std::array<double, 2> cell_coords(int i1, int i2) const;
};

TorusGrid make_grid(const TorusBasis& tb, int min_points = 0);

// Compression of pointwise multiplication by the matrix field F(z) (4x4 in spinor
// components, given per component pair) to the torus basis. comp_weight(c, c') returns the
// coefficient of the scalar field f; fields coupling different momentum offsets are ignored.
Eigen::MatrixXcd compress(const TorusBasis& tb, const TorusGrid& g, const std::vector<double>& f,
                          const std::array<std::array<cplx, 4>, 4>& comp_weight);

// scalar multiplication on all four components
Eigen::MatrixXcd compress_scalar(const TorusBasis& tb, const TorusGrid& g, const std::vector<double>& f,
                                 const std::array<double, 4>& comps = {1, 1, 1, 1});

// rows F(z, .) of the synthesis map at the listed grid nodes, components stacked
Eigen::MatrixXcd synthesis_rows(const TorusBasis& tb, const TorusGrid& g, const std::vector<std::array<int, 2>>& nodes);

// FFTW planning is not thread safe
std::mutex& fftw_planner_mutex();

}  // namespace tbg
