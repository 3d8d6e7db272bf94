#pragma once

#include <vector>

#include "tbg/magic.hpp"

namespace tbg {

struct BandResult {
  std::vector<cplx> kpath;
  std::vector<double> path_coord;
  Eigen::MatrixXd energies;  // n_k x n_bands, ascending per row
  double m = 0;
  cplx alpha;
  double gap = 0;  // E_gap estimate, 0 when not computed
};

// k = (s/n) b1 + (t/n) b2 for s, t in [0, n), enumerated with s major
std::vector<cplx> zone_grid(int n);

// piecewise linear path through the corners, n_per_segment points per leg (closing point included)
std::vector<cplx> polyline(const std::vector<cplx>& corners, int n_per_segment);

// K -> Gamma -> M -> K of the moire zone
std::vector<cplx> default_path(int n_per_segment);

BandResult bands_on_path(double m, cplx alpha, const PotentialSpec& pot, const std::vector<cplx>& path,
                         double cutoff = default_cutoff);

// E_gap(alpha) = inf sqrt(Spec(H(0,alpha)^2) \ {0}), from grid minimum plus simplex refinement.
// Throws std::domain_error when the two middle bands are not a separated flat cluster.
double spectral_gap(cplx alpha, double m, const PotentialSpec& pot, int kgrid, double cutoff = default_cutoff);

// lowest eigenvalue above the middle pair of H_k(m, alpha)
double upper_band_edge(cplx alpha, double m, cplx k, const PotentialSpec& pot, double cutoff);

// Fukui-Hatsugai-Suzuki lattice Chern number of the selected bands. Band offsets count from
// the middle: +1 is the first band above zero energy, -1 the first below.
struct ChernResult {
  int chern = 0;
  double raw = 0;  // sum of plaquette phases / 2 pi before rounding
  double min_gap = 0;
};

ChernResult chern_fhs(cplx alpha, double m, const PotentialSpec& pot, const std::vector<int>& band_selector,
                      int kgrid, double cutoff = 8.0);

}  // namespace tbg
