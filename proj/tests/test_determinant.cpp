#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "tbg/determinant.hpp"
#include "tbg/linalg.hpp"
#include "tbg/magic.hpp"
#include "tbg/perturb.hpp"

using namespace tbg;

namespace {

const BlockOperator& small_T() {
  static BlockOperator T = sector_T(default_potential(), default_k, 6.0);
  return T;
}

}  // namespace

TEST(Traces, ReferenceRationals) {
  // sigma_2 = 3^2 (pi / sqrt 3) (4 / 9)
  EXPECT_NEAR(reference_trace(2), 4 * pi / std::sqrt(3.0), 1e-12);
  EXPECT_EQ(reference_trace(0), 0.0);
  EXPECT_EQ(reference_trace(9), 0.0);
}

TEST(Traces, InfiniteOperatorTableAtModerateCutoff) {
  auto t = compute_traces(default_potential(), default_k, 10.0, 4);
  for (int p = 2; p <= 4; ++p) EXPECT_LT(t.rel_err.at(p), 1e-3) << p;
  EXPECT_TRUE(t.sigma1_conditional);
}

TEST(Traces, MatrixTracesMatchEigenvaluePowers) {
  const auto& T = small_T();
  auto t = matrix_traces(T, 8);
  Eigen::VectorXcd ev = eigenvalues(T.matrix);
  for (int j = 4; j <= 8; ++j) {
    cplx s = 0;
    for (int i = 0; i < ev.size(); ++i) s += std::pow(ev(i), j);
    EXPECT_LT(std::abs(t.series[j] - s), 1e-9 * (1 + std::abs(s))) << j;
  }
  for (int p = 1; p <= 4; ++p) {
    cplx s = 0;
    for (int i = 0; i < ev.size(); ++i) s += std::pow(ev(i), 2 * p);
    EXPECT_LT(std::abs(2.0 * t.sigma.at(p) - s), 1e-9 * (1 + std::abs(s)));
  }
}

TEST(Det4, EigenRouteMatchesLU) {
  const auto& T = small_T();
  Eigen::VectorXcd ev = eigenvalues(T.matrix);
  for (cplx a : {cplx(0.2, 0.1), cplx(-0.5, 0.3), cplx(0.8, -0.6), cplx(1.3, 0.2)}) {
    cplx d1 = det4_eig(ev, a).value(), d2 = oracle::det4_direct(T.matrix, a);
    EXPECT_LT(std::abs(d1 - d2), 1e-8 * (1 + std::abs(d2))) << a;
  }
}

TEST(Det4, ZeroAtMagicAngle) {
  auto T = sector_T(default_potential(), default_k, 10.0);
  Eigen::VectorXcd ev = eigenvalues(T.matrix);
  int imax = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i)) > std::abs(ev(imax))) imax = i;
  auto near = det4_eig(ev, 1.0 / ev(imax) * 0.999999);
  auto far = det4_eig(ev, 1.0 / ev(imax) * 0.9);
  EXPECT_LT(near.log_abs, far.log_abs - 5);
}

TEST(Det4, MuIdentities) {
  auto t = matrix_traces(small_T(), 12);
  auto mu = det4_mu(t, 12);
  EXPECT_EQ(mu[0], cplx(1.0));
  for (int j = 1; j <= 3; ++j) EXPECT_EQ(std::abs(mu[j]), 0.0);
  EXPECT_LT(std::abs(mu[4] + 6.0 * t.series[4]), 1e-10 * std::abs(t.series[4]));
  // mu_5 = -24 tr T^5
  EXPECT_LT(std::abs(mu[5] + 24.0 * t.series[5]), 1e-10 * (1 + std::abs(t.series[5])));
}

TEST(Det4, SeriesMatchesEigenRouteWithinTail) {
  const auto& T = small_T();
  const int n = 40;
  auto t = matrix_traces(T, n);
  Eigen::VectorXcd ev = eigenvalues(T.matrix);
  for (cplx a : {cplx(0.1, 0.0), cplx(0.05, 0.12), cplx(0.3, -0.2)}) {
    auto s = det4_series(t, a, n);
    EXPECT_LE(std::abs(s.value - det4_eig(ev, a).value()), s.tail + 1e-8);
    EXPECT_LT(std::abs(s.value - det4_eig(ev, a).value()), 1e-10);
  }
}

TEST(Det4, TailMonotone) {
  double prev = det4_tail(0.2, 4);
  for (int n = 5; n < 60; ++n) {
    double t = det4_tail(0.2, n);
    EXPECT_LT(t, prev);
    prev = t;
  }
  EXPECT_EQ(det4_tail(0.0, 10), 0.0);
}

TEST(StabilityBound, Formula) {
  LogDet d;
  d.log_abs = std::log(0.37);
  double a = 0.42;
  double rhs = 1.0 / (a * (std::pow(1 + 3 * a, 2) + std::exp(0.75 * std::pow(4 * a + 1, 4)) / 0.37));
  EXPECT_NEAR(stability_bound(a, d), std::log10(rhs), 1e-12);
  d.zero = true;
  EXPECT_TRUE(std::isinf(stability_bound(a, d)));
}

TEST(Linalg, ShiftedSigmaMinMatchesGram) {
  const auto& T = small_T();
  ShiftedSigmaMin sm(T.matrix);
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(T.dim(), T.dim());
  for (int s = 0; s < 10; ++s) {
    cplx z(u(g), u(g));
    double ref = singular_values(T.matrix - z * I).minCoeff();
    EXPECT_NEAR(sm(z), ref, 1e-9 * std::max(1.0, ref));
    if (ref > 1e-6) EXPECT_NEAR(oracle::sigma_min_gram(T.matrix - z * I), ref, 1e-6);
  }
}

TEST(Pseudospectrum, GridNodesAndValues) {
  const auto& T = small_T();
  auto g = pseudospectrum_grid(T, -1, 1, -0.5, 0.5, 5, 3);
  EXPECT_EQ(g.values.rows(), 5);
  EXPECT_EQ(g.values.cols(), 3);
  EXPECT_EQ(g.node(0, 0), cplx(-1, -0.5));
  EXPECT_EQ(g.node(4, 2), cplx(1, 0.5));
  Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(T.dim(), T.dim());
  EXPECT_NEAR(g.values(2, 1), singular_values(T.matrix - g.node(2, 1) * I).minCoeff(), 1e-9);
}

TEST(RankOne, MakesMuAnEigenvalue) {
  const auto& T = small_T();
  cplx mu(-0.7, 0.2);
  auto r = min_rank1_norm(T, mu);
  Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(T.dim(), T.dim());
  EXPECT_NEAR(r.norm, singular_values(T.matrix - mu * I).minCoeff(), 1e-10);
  EXPECT_NEAR(op_norm(r.R), r.norm, 1e-10);
  EXPECT_LT(singular_values(T.matrix + r.R - mu * I).minCoeff(), 1e-10);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(r.R);
  EXPECT_LT(svd.singularValues()(1), 1e-12);
}

TEST(FitLine, ExactLine) {
  std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  auto f = fit_line(x, y);
  EXPECT_NEAR(f.slope, 2, 1e-14);
  EXPECT_NEAR(f.intercept, 1, 1e-14);
  EXPECT_NEAR(f.r_squared, 1, 1e-14);
  std::vector<double> y2{1, 2.7, 5.4, 6.8};
  auto o = oracle::ols(x, y2);
  auto f2 = fit_line(x, y2);
  EXPECT_NEAR(f2.slope, o.slope, 1e-12);
  EXPECT_NEAR(f2.r_squared, o.r2, 1e-12);
}

TEST(Instability, NegativeSlope) {
  std::vector<double> a;
  for (int i = 0; i < 30; ++i) a.push_back(0.8 + 3.2 * i / 29);
  auto s = instability_scan(small_T(), a);
  EXPECT_LT(s.fit.slope, 0);
  ShiftedSigmaMin sm(small_T().matrix);
  EXPECT_NEAR(s.sigma[7], sm(-1.0 / a[7]), 1e-12);
}

TEST(Perturbation, SymmetriesAndNormalization) {
  PerturbationSpec ps;
  auto w = sample_perturbation(ps, 17);
  const auto& L = lattice();
  cplx om = L.omega;
  std::mt19937_64 g(9);
  std::uniform_real_distribution<double> u(-5, 5);
  double sup = 0;
  for (int s = 0; s < 50; ++s) {
    cplx z(u(g), u(g));
    auto W = evaluate(w, z);
    for (const auto& a : L.gamma3_gens) {
      auto Wa = evaluate(w, z + a);
      EXPECT_LT(std::abs(Wa(0, 0) - W(0, 0)), 1e-10);
      EXPECT_LT(std::abs(Wa(1, 1) - W(1, 1)), 1e-10);
      EXPECT_LT(std::abs(Wa(0, 1) - std::conj(om) * W(0, 1)), 1e-10);
      EXPECT_LT(std::abs(Wa(1, 0) - om * W(1, 0)), 1e-10);
    }
    Eigen::JacobiSVD<Eigen::Matrix2cd> svd(W);
    sup = std::max(sup, svd.singularValues()(0));
  }
  EXPECT_LE(sup, 1.0 + 1e-6);
  auto w2 = sample_perturbation(ps, 17);
  EXPECT_EQ(evaluate(w2, {0.3, 0.4}), evaluate(w, {0.3, 0.4}));
}

TEST(Perturbation, ScatterContainment) {
  PerturbationSpec ps;
  auto r = perturbed_magic_scatter(default_potential(), 0.05, 4, 3, ps, 5.0);
  ASSERT_EQ(r.samples.size(), 4u);
  for (const auto& s : r.samples) {
    EXPECT_EQ(s.containment_violations, 0);
    EXPECT_EQ(s.bound_violations, 0);
    EXPECT_GT(s.dT_norm, 0);
  }
  auto r2 = perturbed_magic_scatter(default_potential(), 0.05, 4, 3, ps, 5.0);
  EXPECT_EQ(r2.samples[2].eigenvalues, r.samples[2].eigenvalues);
}
