#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "tbg/determinant.hpp"
#include "tbg/torus.hpp"

namespace tbg {

// Case1: u = [[Y, Z*], [Z, -Y]] with Y = bump, Z = ratio e^{i phase} bump.
// Case2: u = bump times the identity on all four components.
enum class DisorderCase { Case1, Case2 };

struct DisorderConfig {
  double lambda = 0.1;
  DisorderCase kind = DisorderCase::Case2;
  double bump_radius = 3.2;
  double relax_radius = 0.3;  // xi uniform on this disk, 0 disables relaxation
  double density_scale = 1.0;  // X = sgn(Y)|Y|^s with Y uniform on [-1, 1]; s = 1 is the uniform law
  double case1_ratio = 0.3;
  double case1_phase = 0.0;
};

void validate(const DisorderConfig& cfg);

// exp(1 - 1/(1 - (r/R)^2)) on r < R, zero outside
double bump_shape(double r, double R);

struct BumpNormalization {
  double constant = 1;      // c with sup_z sum_gamma c bump(|z - gamma - xi|) <= 1 for all |xi| <= rho
  double worst_sum_min = 0;  // inf_z sum_gamma c bump(|z - gamma| + rho), positive means globally positive
};

// Computed on one moire cell with a fine grid; the lattice sum is Gamma_3 periodic.
BumpNormalization bump_normalization(const DisorderConfig& cfg, int cell_points = 96);

struct DisorderRealization {
  int L = 0;
  std::uint64_t seed = 0;
  std::vector<double> amplitudes;  // X_gamma at gamma = i A1 + j A2, index i L + j
  std::vector<cplx> displacements;  // xi_gamma
  cplx site(int idx) const;
};

DisorderRealization sample_realization(const DisorderConfig& cfg, int L, std::uint64_t seed);

struct FiniteHamiltonian {
  Eigen::MatrixXcd matrix;
  int L = 0;
  double m = 0;
  cplx alpha;
  double lambda = 0;
  double hermitian_correction = 0;  // ||V - V^*||_F before symmetrization
  std::uint64_t seed = 0;
  std::shared_ptr<const TorusBasis> basis;
};

// Clean torus model with cached basis, grid and clean Hamiltonian; realizations are added on top.
class FiniteModel {
 public:
  FiniteModel(int L, double m, cplx alpha, const DisorderConfig& cfg, double cutoff,
              const PotentialSpec& pot = default_potential(), int grid_points = 0);

  const TorusBasis& basis() const { return *basis_; }
  std::shared_ptr<const TorusBasis> basis_ptr() const { return basis_; }
  const TorusGrid& grid() const { return grid_; }
  const Eigen::MatrixXcd& clean() const { return H0_; }
  const DisorderConfig& config() const { return cfg_; }
  double normalization() const { return norm_.constant; }
  double area() const { return basis_->area(); }
  int L() const { return basis_->L(); }

  // scalar lattice sum c sum X_gamma bump(z - gamma - xi_gamma) on the grid, row major (i1, i2)
  std::vector<double> potential_grid(const DisorderRealization& r) const;
  // compressed V_X (before the coupling lambda), already symmetrized
  Eigen::MatrixXcd potential_operator(const DisorderRealization& r, double* correction = nullptr) const;
  FiniteHamiltonian assemble(const DisorderRealization& r) const;

 private:
  std::shared_ptr<const TorusBasis> basis_;
  TorusGrid grid_;
  Eigen::MatrixXcd H0_;
  DisorderConfig cfg_;
  BumpNormalization norm_;
  double m_;
  cplx alpha_;
};

FiniteHamiltonian assemble_finite_H(double m, cplx alpha, const DisorderConfig& cfg, const DisorderRealization& r,
                                    double cutoff, const PotentialSpec& pot = default_potential());

// spectra of n realizations; realization i uses derive_seed(seed, "disorder/L<L>", i)
std::vector<Eigen::VectorXd> ensemble_spectra(const FiniteModel& model, int n_real, std::uint64_t seed);

struct Interval {
  double lo = 0, hi = 0;
  double width() const { return hi - lo; }
};

struct IntervalEstimate {
  Interval I;
  double mean = 0;     // E tr 1_I / area
  double std_err = 0;
  double mean_count = 0;  // E tr 1_I
};

struct WegnerFit {
  std::vector<int> L_list;
  std::vector<double> widths;
  Eigen::MatrixXd mean_counts, std_errs;  // L x width
  double width_exponent = 0, width_r2 = 0;  // at the largest L
  double area_exponent = 0, area_r2 = 0;    // at widths[area_width_index]
  int gap_violations = 0;
  int widenings = 0;
  double k_minus = 0, k_plus = 0, K_minus = 0;  // widest intervals used, over all L
};

struct EnsembleStats {
  int n_realizations = 0;
  int dimension = 0;
  double area = 0;
  std::vector<double> hist_edges;
  std::vector<long long> hist_counts;
  std::vector<IntervalEstimate> ids;
  WegnerFit wegner;
  int gap_violations = 0;
};

EnsembleStats ids_estimate(const std::vector<Eigen::VectorXd>& spectra, double area, const std::vector<Interval>& intervals,
                           int hist_bins = 200);

// Eigenvalues of the clean model with |E| inside the flat cluster (the 2 L^2 states of smallest |E|)
// give [flat_lo, flat_hi]; the next |E| is K. The forbidden set for coupling lambda is
// (-k_-, k_-) u (k_+, K_-) u (-K_-, -k_+), k_- = flat_lo - lambda, k_+ = flat_hi + lambda, K_- = K - lambda.
struct GapIntervals {
  double flat_lo = 0, flat_hi = 0, K = 0;
  double k_minus = 0, k_plus = 0, K_minus = 0;
  bool nonempty() const { return k_plus < K_minus; }
};

GapIntervals gap_intervals(const FiniteModel& model, double lambda);
int count_gap_violations(const GapIntervals& g, const Eigen::VectorXd& spectrum);

struct WegnerSpec {
  std::vector<int> L_list{3, 4, 5, 6};
  std::vector<double> widths{0.0025, 0.005, 0.01, 0.02, 0.04};
  int n_real = 200;
  std::uint64_t seed = 1;
  double m = 0.2;
  cplx alpha{0.5856635583895583, 0.0};
  double cutoff = 3.0;
  double center = -1;  // defaults to m
  int area_width_index = -1;  // defaults to the middle width
};

WegnerFit wegner_scaling(const DisorderConfig& cfg, const WegnerSpec& spec, const PotentialSpec& pot = default_potential());

struct LipschitzFit {
  std::vector<double> widths, max_mass;  // max over window positions of E tr 1_I / area
  LinearFit fit;                         // max_mass against width
};

// sliding windows of each width across [lo, hi] in steps of step
LipschitzFit lipschitz_windows(const std::vector<Eigen::VectorXd>& spectra, double area, const std::vector<double>& widths,
                               double lo, double hi, double step);

}  // namespace tbg
