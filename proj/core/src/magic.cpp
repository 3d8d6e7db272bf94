#include "tbg/magic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tbg/bands.hpp"
#include "tbg/linalg.hpp"
#include "tbg/parallel.hpp"

namespace tbg {

int classify_degeneracy(const BlockOperator& T, cplx alpha, bool* generic) {
  if (alpha == 0.0) throw std::domain_error("alpha = 0 is never magic");
  const cplx lam = 1.0 / alpha;
  Eigen::VectorXcd ev = eigenvalues(T.matrix);
  double dist = (ev.array() - lam).abs().minCoeff();
  if (dist > 1e-6) throw std::domain_error("1/alpha is not an eigenvalue of T at this cutoff");
  Eigen::MatrixXcd S = T.matrix;
  S.diagonal().array() -= lam;
  Eigen::VectorXd sv = singular_values(S);
  double thr = 1e-6 * op_norm(T.matrix);
  int nu = int((sv.array() < thr).count());
  nu = std::max(nu, 1);
  if (generic) *generic = nu <= 2;
  return nu;
}

double kernel_residual(const PotentialSpec& pot, cplx alpha, cplx k, double cutoff, int ell) {
  return sigma_min(sector_D(pot, alpha, k, cutoff, ell).matrix);
}

MagicAngleSet compute_magic_angles(const PotentialSpec& pot, double cutoff, cplx k, double alpha_max) {
  if (!(alpha_max > 0)) throw std::invalid_argument("alpha_max must be positive");
  BlockOperator T = sector_T(pot, k, cutoff, 0);
  Eigen::VectorXcd ev = eigenvalues(T.matrix);
  MagicAngleSet out;
  out.cutoff = cutoff;
  out.k_used = k;
  std::vector<cplx> lams;
  for (int i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i)) > 1e-300 && 1.0 / std::abs(ev(i)) <= alpha_max) lams.push_back(ev(i));
  auto mag = [](cplx a) { return std::llround(std::abs(a) * 1e9); };
  std::sort(lams.begin(), lams.end(), [&](cplx a, cplx b) {
    cplx x = 1.0 / a, y = 1.0 / b;
    if (mag(x) != mag(y)) return mag(x) < mag(y);
    return std::arg(x) < std::arg(y);
  });
  out.alphas.resize(lams.size());
  parallel_for(int(lams.size()), [&](int i) {
    MagicAngle& a = out.alphas[i];
    a.eigenvalue = lams[i];
    a.alpha = 1.0 / lams[i];
    a.sector = 0;
    a.degeneracy = classify_degeneracy(T, a.alpha, &a.generic);
    a.residual = kernel_residual(pot, a.alpha, k, cutoff, 0);
  });
  return out;
}

double flat_band_certificate(cplx alpha, double m, int kgrid_size, const PotentialSpec& pot, double cutoff) {
  if (kgrid_size < 4) throw std::invalid_argument("kgrid_size must be at least 4");
  auto ks = zone_grid(kgrid_size);
  std::vector<double> dev(ks.size());
  parallel_for(int(ks.size()), [&](int i) {
    Eigen::VectorXd e = hermitian_eigenvalues(sector_H(pot, m, alpha, ks[i], cutoff).matrix);
    const int h = int(e.size()) / 2;
    dev[i] = std::max(std::abs(std::abs(e(h - 1)) - m), std::abs(std::abs(e(h)) - m));
  });
  return *std::max_element(dev.begin(), dev.end());
}

}  // namespace tbg
