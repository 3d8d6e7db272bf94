#include <gtest/gtest.h>

#include <algorithm>

#include "oracles.hpp"
#include "tbg/bands.hpp"
#include "tbg/linalg.hpp"
#include "tbg/magic.hpp"

using namespace tbg;

namespace {
constexpr double alpha1 = 0.5856635583895583;
}

TEST(Basis, CountAndLookup) {
  auto b = enumerate_basis(default_k, 12.0, 2);
  const auto& q = lattice().q;
  double cell = std::abs(std::imag(std::conj(q[0]) * q[1]));
  double expected = pi * 144.0 / cell;
  EXPECT_NEAR(b.nmom(), expected, 0.05 * expected);
  EXPECT_EQ(b.size(), 2 * b.nmom());
  for (int i = 0; i < b.nmom(); ++i) {
    EXPECT_LE(std::abs(b.momenta[i]), 12.0 + 1e-12);
    auto x = lattice_coords(b.momenta[i] - b.k, q[0], q[1]);
    EXPECT_EQ(b.find(int(std::lround(x[0])), int(std::lround(x[1]))), i);
  }
}

TEST(Basis, InvertibilityGuard) {
  EXPECT_THROW(enumerate_basis(0.0, 5.0, 2, true), std::invalid_argument);
  EXPECT_THROW(enumerate_basis(default_k, -1.0, 2), std::invalid_argument);
  EXPECT_NEAR(distance_to_dual_lattice(0.0), 0.0, 1e-15);
  EXPECT_GT(distance_to_dual_lattice(default_k), 0.1);
  EXPECT_TRUE(rotation_closed(enumerate_basis(0.0, 6.0, 2)));
}

TEST(Operators, HamiltonianHermitianAndChiral) {
  auto pot = default_potential();
  auto H = sector_H(pot, 0.3, {0.7, 0.1}, default_k, 6.0);
  EXPECT_LT((H.matrix - H.matrix.adjoint()).norm(), 1e-12);
  auto D = sector_D(pot, {0.7, 0.1}, default_k, 6.0);
  ASSERT_EQ(2 * D.dim(), H.dim());
  // E = +-sqrt(m^2 + s^2) over the singular values s of D
  Eigen::VectorXd s = singular_values(D.matrix);
  std::vector<double> expect;
  for (int i = 0; i < s.size(); ++i) {
    double e = std::sqrt(0.09 + s(i) * s(i));
    expect.push_back(e);
    expect.push_back(-e);
  }
  std::sort(expect.begin(), expect.end());
  Eigen::VectorXd E = hermitian_eigenvalues(H.matrix);
  for (int i = 0; i < E.size(); ++i) EXPECT_NEAR(E(i), expect[i], 1e-10);
}

TEST(Operators, BirmanSchwingerFactorization) {
  // D(alpha) + k = (D(0) + k)(1 + alpha T) on the same truncation
  auto pot = default_potential();
  cplx a(0.9, -0.3);
  auto D0 = sector_D(pot, 0.0, default_k, 7.0);
  auto Da = sector_D(pot, a, default_k, 7.0);
  auto T = sector_T(pot, default_k, 7.0);
  ASSERT_EQ(D0.support, T.support);
  Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(T.dim(), T.dim());
  EXPECT_LT((D0.matrix * (I + a * T.matrix) - Da.matrix).norm(), 1e-10 * Da.matrix.norm());
}

TEST(Magic, MatchesBruteForceScan) {
  auto pot = default_potential();
  auto set = compute_magic_angles(pot, 10.0, default_k, 1.0);
  ASSERT_FALSE(set.alphas.empty());
  auto f = [&](double x) { return oracle::sigma_min_gram(sector_D(pot, x, default_k, 10.0).matrix); };
  // coarse scan for the bracket, then Brent
  double best = 0.5, fb = 1e300;
  for (double x = 0.5; x <= 0.7; x += 0.02)
    if (f(x) < fb) fb = f(x), best = x;
  double xmin = oracle::brent_min(f, best - 0.02, best, best + 0.02);
  bool found = false;
  for (const auto& m : set.alphas)
    if (std::abs(m.alpha - cplx(xmin, 0)) < 1e-6) {
      found = true;
      EXPECT_EQ(m.degeneracy, 1);
      EXPECT_LT(m.residual, 1e-8);
    }
  EXPECT_TRUE(found) << "scan minimum at " << xmin;
  EXPECT_NEAR(xmin, 0.58566, 1e-3);
}

TEST(Magic, DegeneracyClassification) {
  auto T = sector_T(default_potential(), default_k, 10.0);
  bool generic = false;
  EXPECT_EQ(classify_degeneracy(T, alpha1, &generic), 1);
  EXPECT_TRUE(generic);
  EXPECT_THROW(classify_degeneracy(T, 0.7), std::domain_error);
}

TEST(Magic, SpectrumIndependentOfK) {
  auto pot = default_potential();
  auto big = [&](cplx k) {
    Eigen::VectorXcd ev = eigenvalues(sector_T(pot, k, 12.0).matrix);
    std::vector<cplx> v;
    for (int i = 0; i < ev.size(); ++i)
      if (std::abs(ev(i)) > 0.4) v.push_back(ev(i));
    return v;
  };
  auto a = big(default_k), b = big({0.31, -0.17});
  ASSERT_GE(a.size(), 2u);
  EXPECT_EQ(a.size(), b.size());
  for (const auto& x : a) {
    double best = 1e9;
    for (const auto& y : b) best = std::min(best, std::abs(x - y));
    EXPECT_LT(best, 1e-6) << x;
  }
}

TEST(Bands, FlatAtMagicAngleOnly) {
  auto pot = default_potential();
  EXPECT_LT(flat_band_certificate(alpha1, 0.0, 6, pot, 10.0), 1e-6);
  EXPECT_GT(flat_band_certificate(0.4, 0.0, 6, pot, 10.0), 1e-2);
  // massive case: the flat pair sits at +-m
  EXPECT_LT(flat_band_certificate(alpha1, 0.2, 4, pot, 10.0), 1e-6);
}

TEST(Bands, PathAndGrid) {
  EXPECT_EQ(zone_grid(5).size(), 25u);
  auto path = default_path(10);
  EXPECT_EQ(path.size(), 31u);
  auto res = bands_on_path(0.0, alpha1, default_potential(), path, 6.0);
  ASSERT_EQ(res.energies.rows(), 31);
  for (int i = 1; i < int(res.path_coord.size()); ++i) EXPECT_GT(res.path_coord[i], res.path_coord[i - 1]);
  for (int i = 0; i < res.energies.rows(); ++i)
    for (int j = 1; j < res.energies.cols(); ++j) EXPECT_LE(res.energies(i, j - 1), res.energies(i, j));
}

TEST(Bands, GapPositive) {
  double g = spectral_gap(alpha1, 0.0, default_potential(), 6, 10.0);
  EXPECT_GT(g, 0.1);
}

TEST(Bands, PlaquetteChernOpposite) {
  auto pot = default_potential();
  auto up = chern_fhs(alpha1, 0.2, pot, {1}, 10, 6.0);
  auto dn = chern_fhs(alpha1, 0.2, pot, {-1}, 10, 6.0);
  EXPECT_EQ(std::abs(up.chern), 1);
  EXPECT_EQ(up.chern + dn.chern, 0);
  EXPECT_NEAR(up.raw, up.chern, 1e-6);
}
