#include <gtest/gtest.h>

#include <random>

#include "tbg/lattice.hpp"
#include "tbg/parallel.hpp"
#include "tbg/potential.hpp"
#include "tbg/rng.hpp"

using namespace tbg;

TEST(Lattice, DualPairing) {
  const auto& L = lattice();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      EXPECT_NEAR(pairing(L.gamma_gens[i], L.gamma_star_gens[j]), i == j ? 2 * pi : 0.0, 1e-12);
      EXPECT_NEAR(pairing(L.gamma3_gens[i], L.moire_star_gens[j]), i == j ? 2 * pi : 0.0, 1e-12);
    }
}

TEST(Lattice, KnownLengths) {
  const auto& L = lattice();
  cplx w = std::exp(cplx(0, 2 * pi / 3));
  EXPECT_NEAR(std::abs(L.omega - w), 0.0, 1e-15);
  // A1 = 4 pi i w / 3, A2 = 4 pi i w^2 / 3
  EXPECT_NEAR(std::abs(L.gamma3_gens[0] - cplx(0, 4 * pi / 3) * w), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(L.gamma3_gens[1] - cplx(0, 4 * pi / 3) * w * w), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(L.gamma3_gens[1] - L.gamma3_gens[0]), 7.2552, 1e-4);
  EXPECT_NEAR(std::abs(L.gamma3_gens[1] + L.gamma3_gens[0]), 4.18879, 1e-5);
  double area = std::abs(std::imag(std::conj(L.gamma3_gens[0]) * L.gamma3_gens[1]));
  EXPECT_NEAR(L.moire_cell_area, area, 1e-12);
  EXPECT_NEAR(L.moire_cell_area, 15.19525, 1e-5);
  EXPECT_NEAR(L.cell_area, 9 * L.moire_cell_area, 1e-9);
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(std::abs(L.q[j] - cplx(0, 1) * std::pow(w, j)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(L.moire_star_gens[0] - (L.q[1] - L.q[0])), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(L.moire_star_gens[1] - (L.q[2] - L.q[0])), 0.0, 1e-12);
}

TEST(Lattice, MinImageIsShortest) {
  const auto& L = lattice();
  cplx e1 = L.gamma3_gens[0], e2 = L.gamma3_gens[1];
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-40, 40);
  for (int s = 0; s < 200; ++s) {
    cplx z(u(gen), u(gen));
    cplx m = min_image(z, e1, e2);
    double best = 1e300;
    for (int a = -30; a <= 30; ++a)
      for (int b = -30; b <= 30; ++b) best = std::min(best, std::abs(z + double(a) * e1 + double(b) * e2));
    EXPECT_NEAR(std::abs(m), best, 1e-9);
    auto c = lattice_coords(z - m, e1, e2);
    EXPECT_NEAR(c[0], std::round(c[0]), 1e-9);
    EXPECT_NEAR(c[1], std::round(c[1]), 1e-9);
  }
}

TEST(Potential, Symmetries) {
  auto r = check_symmetries(default_potential(), 300, 11);
  EXPECT_LT(r.translation, 1e-12);
  EXPECT_LT(r.rotation, 1e-12);
  EXPECT_LT(r.conjugation, 1e-12);
  EXPECT_LT(r.periodicity, 1e-12);
}

TEST(Potential, ExplicitFormula) {
  // U(z) = sum_j w^j exp((z conj(w)^j - conj(z) w^j) / 2)
  auto pot = default_potential();
  cplx w = lattice().omega;
  for (cplx z : {cplx(0.3, -1.2), cplx(2.5, 0.7), cplx(-4.0, 3.3)}) {
    cplx s = 0;
    for (int j = 0; j < 3; ++j) s += std::pow(w, j) * std::exp((z * std::pow(std::conj(w), j) - std::conj(z) * std::pow(w, j)) / 2.0);
    EXPECT_NEAR(std::abs(pot(z) - s), 0.0, 1e-12);
  }
}

TEST(Potential, ShiftsRejectOffLatticeModes) {
  PotentialSpec p;
  p.modes = {{cplx(0.1, 0.2), 1.0}};
  EXPECT_THROW(potential_shifts(p), std::invalid_argument);
  EXPECT_EQ(potential_shifts(default_potential()).size(), 3u);
}

TEST(Rng, DeriveSeedStableAndDistinct) {
  EXPECT_EQ(derive_seed(1, "disorder/L4", 0), derive_seed(1, "disorder/L4", 0));
  EXPECT_NE(derive_seed(1, "disorder/L4", 0), derive_seed(1, "disorder/L4", 1));
  EXPECT_NE(derive_seed(1, "disorder/L4", 0), derive_seed(1, "disorder/L5", 0));
  EXPECT_NE(derive_seed(1, "a", 0), derive_seed(2, "a", 0));
}

TEST(Parallel, EachIndexOnce) {
  for (int t : {1, 3}) {
    set_threads(t);
    std::vector<int> hits(1000, 0);
    parallel_for(1000, [&](int i) { hits[i] += 1; });
    for (int h : hits) EXPECT_EQ(h, 1);
  }
  set_threads(0);
}
