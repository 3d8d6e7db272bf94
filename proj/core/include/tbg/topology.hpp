#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "tbg/disorder.hpp"
#include "tbg/magic.hpp"

namespace tbg {

// Projection onto the span of orthonormal columns V of the torus basis.
struct ProjectionData {
  Eigen::MatrixXcd V;
  Interval window;
  std::string source;
  std::shared_ptr<const TorusBasis> basis;
  TorusGrid grid;

  int rank() const { return int(V.cols()); }
  Eigen::MatrixXcd matrix() const { return V * V.adjoint(); }
};

// eigenvectors with eigenvalue in the open window (lo, hi)
ProjectionData spectral_projection(const Eigen::VectorXd& evals, const Eigen::MatrixXcd& evecs,
                                   std::shared_ptr<const TorusBasis> basis, const TorusGrid& grid, Interval window,
                                   std::string source = "spectral");

// Sharp switches Theta_1 = [Re w >= 0], Theta_2 = [Im w >= 0] where w is z - c reduced to the
// torus fundamental domain centred at the corner c = (1/2 + s |A2 - A1|) + i (1/2 + r |A1 + A2|).
// sublattice 1 keeps components (0, 1), 2 keeps (2, 3), 0 keeps all.
struct SwitchFunctions {
  double theta1_offset = 0;  // s, in units of the horizontal lattice vector
  double theta2_offset = 0;  // r, in units of the vertical lattice vector
  int sublattice = 0;
};

// Trace region: the cells with |x_i| < half_width around the corner, in cell units of the
// fundamental domain. half_width < 0 selects (L - 4) / 2; full = true traces the whole torus.
struct TraceRegion {
  double half_width = -1;
  bool full = false;
};

struct SwitchOperators {
  Eigen::MatrixXcd theta1, theta2, region;
};

SwitchOperators switch_operators(const TorusBasis& tb, const TorusGrid& g, const SwitchFunctions& sw, const TraceRegion& tr = {});

struct HallResult {
  cplx omega;  // tr(chi P [[P, Theta_1], [P, Theta_2]])
  cplx chern;  // -2 pi i omega
};

HallResult hall_conductance(const ProjectionData& P, const SwitchFunctions& sw, const TraceRegion& tr = {});
// switches multiplied by pi_i
HallResult partial_chern(const ProjectionData& P, int i, SwitchFunctions sw, const TraceRegion& tr = {});
// Omega from precomputed switch operators
cplx omega(const Eigen::MatrixXcd& V, const SwitchOperators& ops);

struct DecayFit {
  std::vector<double> separation, norm;  // one entry per cell pair
  LinearFit fit;                         // log norm against separation
  double rate = 0;                       // fitted slope
  double r_squared = 0;
  bool rejected = false;  // slope >= 0 or r_squared <= 0.95
};

// ||chi_{w0} P chi_w|| over all cells w with 0 < |w - w0| <= max_separation (default (L/2)|A1|),
// w0 the cell at the origin; cell distances are torus minimum-image distances between cell origins.
DecayFit combes_thomas_decay(const ProjectionData& P, double max_separation = -1);

// smooth window equal to 1 on the middle half of [lo, hi] and 0 outside (lo, hi)
struct WindowFunction {
  double lo = 0, hi = 0;
  double operator()(double E) const;
};

struct TransportSeries {
  std::vector<double> t, M;
  int n_states = 0;
  bool edge_warning = false;  // window reaches past the spectrum
};

// M(p, chi, t) = ||<z>^{p/2} e^{-itH} chi(H) 1_cell||_2^2 with the origin cell and
// <z> = (1 + d^2)^{1/2}, d the torus distance to the origin capped at (L/2)|A1|.
TransportSeries transport_moment(const TorusBasis& tb, const TorusGrid& g, const Eigen::VectorXd& evals,
                                 const Eigen::MatrixXcd& evecs, double p, const WindowFunction& chi,
                                 const std::vector<double>& times);

// (1/T) int_0^inf M(t) e^{-t/T} dt by the trapezoid rule on the grid plus a constant tail
// M(t_max) e^{-t_max/T}; the grid must start at 0 and every T must satisfy 5 T <= t_max.
std::vector<double> time_averaged_moment(const std::vector<double>& t, const std::vector<double>& M,
                                         const std::vector<double>& T_list);
// ensemble mean of the series first
std::vector<double> time_averaged_moment(const std::vector<double>& t, const std::vector<std::vector<double>>& Ms,
                                         const std::vector<double>& T_list);

struct WannierPoint {
  int L;
  double moment;
};

// ||<z>^{p/2} P 1_cell||_2^2 for the flat-band projection of H(0, alpha) on the L-torus, built
// from the commensurate Bloch fibres; cell_points^2 grid nodes per moire cell.
// Throws std::domain_error when alpha is not a simple magic angle at the check cutoff.
std::vector<WannierPoint> wannier_moment(cplx alpha, double p, const std::vector<int>& L_list,
                                         const PotentialSpec& pot = default_potential(), double cutoff = 3.0,
                                         int cell_points = 8, double check_cutoff = default_cutoff);

}  // namespace tbg
