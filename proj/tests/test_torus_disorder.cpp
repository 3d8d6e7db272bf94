#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "tbg/disorder.hpp"
#include "tbg/linalg.hpp"
#include "tbg/parallel.hpp"
#include "tbg/rng.hpp"

using namespace tbg;

namespace {
constexpr double alpha1 = 0.5856635583895583;

int mod(int a, int L) { return ((a % L) + L) % L; }
}  // namespace

TEST(Torus, BasisAndGrid) {
  TorusBasis tb(3, 3.0);
  EXPECT_GT(tb.size(), 0);
  for (int i = 0; i < tb.size(); ++i) {
    const auto& e = tb.entries()[i];
    EXPECT_LE(std::abs(e.p), 3.0 + 1e-12);
    EXPECT_EQ(tb.find(e.comp, e.m[0], e.m[1]), i);
  }
  EXPECT_NEAR(tb.area(), 9 * lattice().moire_cell_area, 1e-9);
  auto g = make_grid(tb);
  EXPECT_EQ(g.N % 3, 0);
  EXPECT_EQ(g.N % 2, 0);
  EXPECT_GE(g.N, 4 * tb.max_index() + 1);
}

TEST(Torus, HamiltonianConservesBlochBlock) {
  const int L = 3;
  TorusBasis tb(L, 3.0);
  auto H = torus_hamiltonian(tb, 0.2, alpha1, default_potential());
  EXPECT_LT((H - H.adjoint()).norm(), 1e-12);
  for (int a = 0; a < tb.size(); ++a)
    for (int b = 0; b < tb.size(); ++b) {
      if (std::abs(H(a, b)) < 1e-14) continue;
      const auto& ea = tb.entries()[a];
      const auto& eb = tb.entries()[b];
      EXPECT_EQ(mod(ea.m[0] - eb.m[0], L), 0);
      EXPECT_EQ(mod(ea.m[1] - eb.m[1], L), 0);
    }
}

TEST(Torus, FlatClusterAtMagicAngle) {
  const int L = 3;
  TorusBasis tb(L, 3.0);
  Eigen::VectorXd E = hermitian_eigenvalues(torus_hamiltonian(tb, 0.2, alpha1, default_potential()));
  std::vector<double> a(E.data(), E.data() + E.size());
  for (auto& x : a) x = std::abs(x);
  std::sort(a.begin(), a.end());
  for (int i = 0; i < 2 * L * L; ++i) EXPECT_NEAR(a[i], 0.2, 1e-5);
  EXPECT_GT(a[2 * L * L], 0.4);
}

TEST(Torus, CompressionMatchesDirectQuadrature) {
  TorusBasis tb(2, 2.5);
  auto g = make_grid(tb);
  std::vector<double> f(std::size_t(g.N) * g.N);
  std::vector<std::array<int, 2>> nodes;
  for (int i = 0; i < g.N; ++i)
    for (int j = 0; j < g.N; ++j) {
      cplx z = g.z(i, j);
      f[std::size_t(i) * g.N + j] = std::exp(-0.1 * std::norm(min_image(z, 2.0 * lattice().gamma3_gens[0], 2.0 * lattice().gamma3_gens[1])));
      nodes.push_back({i, j});
    }
  Eigen::MatrixXcd S = synthesis_rows(tb, g, nodes);  // 4 N^2 x dim
  const int nn = g.N * g.N;
  // S is an isometry on the basis
  EXPECT_LT((S.adjoint() * S - Eigen::MatrixXcd::Identity(tb.size(), tb.size())).norm(), 1e-10);
  Eigen::VectorXd d(4 * nn);
  for (int c = 0; c < 4; ++c)
    for (int r = 0; r < nn; ++r) d(c * nn + r) = f[r];
  Eigen::MatrixXcd ref = S.adjoint() * d.asDiagonal() * S;
  Eigen::MatrixXcd M = compress_scalar(tb, g, f);
  // the FFT route keeps only same-offset component pairs, so compare on those blocks
  double err = 0;
  for (int a = 0; a < tb.size(); ++a)
    for (int b = 0; b < tb.size(); ++b)
      if (tb.entries()[a].comp == tb.entries()[b].comp) err = std::max(err, std::abs(M(a, b) - ref(a, b)));
  EXPECT_LT(err, 1e-10);
  EXPECT_LT((M - M.adjoint()).norm(), 1e-10);
}

TEST(Disorder, BumpShape) {
  EXPECT_DOUBLE_EQ(bump_shape(0.0, 3.2), 1.0);
  EXPECT_EQ(bump_shape(3.2, 3.2), 0.0);
  EXPECT_EQ(bump_shape(5.0, 3.2), 0.0);
  EXPECT_GT(bump_shape(3.1, 3.2), 0.0);
  EXPECT_LT(bump_shape(2.0, 3.2), bump_shape(1.0, 3.2));
}

TEST(Disorder, ValidateRejectsBadConfig) {
  DisorderConfig c;
  c.bump_radius = -1;
  EXPECT_THROW(validate(c), std::invalid_argument);
  c = DisorderConfig{};
  c.bump_radius = 30;
  EXPECT_THROW(validate(c), std::invalid_argument);
  EXPECT_NO_THROW(validate(DisorderConfig{}));
}

TEST(Disorder, NormalizationBoundsRandomConfigurations) {
  DisorderConfig cfg;
  auto n = bump_normalization(cfg, 48);
  EXPECT_GT(n.worst_sum_min, 0.0);
  const auto& L = lattice();
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0, 1), ang(0, 2 * pi);
  for (int s = 0; s < 200; ++s) {
    cplx z = u(gen) * L.gamma3_gens[0] + u(gen) * L.gamma3_gens[1];
    double sum = 0;
    for (int i = -4; i <= 4; ++i)
      for (int j = -4; j <= 4; ++j) {
        cplx xi = std::polar(cfg.relax_radius * std::sqrt(u(gen)), ang(gen));
        sum += bump_shape(std::abs(z - double(i) * L.gamma3_gens[0] - double(j) * L.gamma3_gens[1] - xi), cfg.bump_radius);
      }
    EXPECT_LE(n.constant * sum, 1.0 + 2e-3);
    EXPECT_GE(n.constant * sum, n.worst_sum_min - 2e-3);
  }
}

TEST(Disorder, RealizationsDeterministicAndBounded) {
  DisorderConfig cfg;
  auto a = sample_realization(cfg, 4, 99), b = sample_realization(cfg, 4, 99), c = sample_realization(cfg, 4, 100);
  EXPECT_EQ(a.amplitudes, b.amplitudes);
  EXPECT_EQ(a.displacements, b.displacements);
  EXPECT_NE(a.amplitudes, c.amplitudes);
  ASSERT_EQ(a.amplitudes.size(), 16u);
  for (int i = 0; i < 16; ++i) {
    EXPECT_LE(std::abs(a.amplitudes[i]), 1.0);
    EXPECT_LE(std::abs(a.displacements[i]), cfg.relax_radius);
  }
  EXPECT_EQ(a.site(1 * 4 + 2), 1.0 * lattice().gamma3_gens[0] + 2.0 * lattice().gamma3_gens[1]);
}

TEST(Disorder, PotentialGridMatchesDirectSum) {
  DisorderConfig cfg;
  FiniteModel model(3, 0.2, alpha1, cfg, 2.5);
  auto r = sample_realization(cfg, 3, 7);
  auto f = model.potential_grid(r);
  const auto& g = model.grid();
  const auto& L = lattice();
  cplx P1 = 3.0 * L.gamma3_gens[0], P2 = 3.0 * L.gamma3_gens[1];
  for (auto [i1, i2] : {std::pair{0, 0}, {5, 17}, {g.N - 1, 3}}) {
    cplx z = g.z(i1, i2);
    double s = 0;
    for (int idx = 0; idx < 9; ++idx)
      for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b)
          s += r.amplitudes[idx] *
               bump_shape(std::abs(z - r.site(idx) - r.displacements[idx] + double(a) * P1 + double(b) * P2), cfg.bump_radius);
    EXPECT_NEAR(f[std::size_t(i1) * g.N + i2], model.normalization() * s, 1e-12);
  }
}

TEST(Disorder, AssembleCases) {
  for (auto kind : {DisorderCase::Case1, DisorderCase::Case2}) {
    DisorderConfig cfg;
    cfg.kind = kind;
    FiniteModel model(3, 0.2, alpha1, cfg, 2.5);
    auto r = sample_realization(cfg, 3, 5);
    auto H = model.assemble(r);
    EXPECT_LT((H.matrix - H.matrix.adjoint()).norm(), 1e-12);
    EXPECT_LT(H.hermitian_correction, 1e-8);
    double c = 0;
    Eigen::MatrixXcd V = model.potential_operator(r, &c);
    EXPECT_LT((H.matrix - model.clean() - cfg.lambda * V).norm(), 1e-12);
    // |lambda V| <= lambda sup|u| <= lambda (sqrt(1 + r^2) normalisation for Case1)
    EXPECT_LE(op_norm(V), 1.0 + 1e-6);
  }
  DisorderConfig zero;
  zero.lambda = 0;
  FiniteModel m0(3, 0.2, alpha1, zero, 2.5);
  EXPECT_EQ((m0.assemble(sample_realization(zero, 3, 1)).matrix - m0.clean()).norm(), 0.0);
}

TEST(Disorder, EnsembleDeterministicAcrossThreads) {
  DisorderConfig cfg;
  FiniteModel model(2, 0.2, alpha1, cfg, 2.5);
  set_threads(1);
  auto a = ensemble_spectra(model, 4, 11);
  set_threads(3);
  auto b = ensemble_spectra(model, 4, 11);
  set_threads(0);
  for (int i = 0; i < 4; ++i) EXPECT_EQ((a[i] - b[i]).norm(), 0.0);
  auto direct = hermitian_eigenvalues(model.assemble(sample_realization(cfg, 2, derive_seed(11, "disorder/L2", 2))).matrix);
  EXPECT_EQ((a[2] - direct).norm(), 0.0);
}

TEST(Ids, SyntheticCounts) {
  std::vector<Eigen::VectorXd> s(2, Eigen::VectorXd(4));
  s[0] << -1, 0.1, 0.2, 1;
  s[1] << -1, 0.15, 0.5, 1;
  auto st = ids_estimate(s, 2.0, {{0.0, 0.3}, {0.4, 2.0}}, 4);
  ASSERT_EQ(st.ids.size(), 2u);
  EXPECT_DOUBLE_EQ(st.ids[0].mean_count, 1.5);
  EXPECT_DOUBLE_EQ(st.ids[0].mean, 0.75);
  EXPECT_DOUBLE_EQ(st.ids[1].mean_count, 1.5);
  long long total = 0;
  for (auto c : st.hist_counts) total += c;
  EXPECT_EQ(total, 8);
}

TEST(Ids, LipschitzOnUniformSpectrum) {
  // equally spaced levels of density 100 per unit energy: max window mass ~ 100 w / area
  std::vector<Eigen::VectorXd> s(1, Eigen::VectorXd::LinSpaced(201, -1.0, 1.0));
  auto f = lipschitz_windows(s, 4.0, {0.05, 0.1, 0.2, 0.4}, -1.0, 1.0, 0.001);
  EXPECT_NEAR(f.fit.slope, 25.0, 1.5);
  EXPECT_GT(f.fit.r_squared, 0.99);
}

TEST(Ids, GapViolationCounting) {
  GapIntervals g;
  g.k_minus = 0.1;
  g.k_plus = 0.3;
  g.K_minus = 0.5;
  Eigen::VectorXd e(6);
  e << -0.6, -0.4, -0.05, 0.2, 0.35, 0.55;
  EXPECT_EQ(count_gap_violations(g, e), 3);
}

TEST(Wegner, RejectsZeroCoupling) {
  DisorderConfig cfg;
  cfg.lambda = 0;
  WegnerSpec ws;
  ws.L_list = {2};
  ws.n_real = 2;
  EXPECT_THROW(wegner_scaling(cfg, ws), std::invalid_argument);
}
