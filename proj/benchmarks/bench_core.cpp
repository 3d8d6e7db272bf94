#include <benchmark/benchmark.h>

#include <map>
#include <memory>

#include "tbg/determinant.hpp"
#include "tbg/disorder.hpp"
#include "tbg/linalg.hpp"
#include "tbg/magic.hpp"
#include "tbg/operators.hpp"

using namespace tbg;

namespace {

constexpr double alpha1 = 0.5856635583895583;

const FiniteModel& model(int L) {
  static std::map<int, std::unique_ptr<FiniteModel>> cache;
  auto& m = cache[L];
  if (!m) m = std::make_unique<FiniteModel>(L, 0.2, alpha1, DisorderConfig{}, 3.0);
  return *m;
}

void BM_AssembleT(benchmark::State& st) {
  auto pot = default_potential();
  for (auto _ : st) benchmark::DoNotOptimize(sector_T(pot, default_k, double(st.range(0))).matrix.data());
}
BENCHMARK(BM_AssembleT)->Arg(8)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_EigenvaluesT(benchmark::State& st) {
  auto T = sector_T(default_potential(), default_k, double(st.range(0)));
  eigenvalues(T.matrix);  // first LAPACK call runs the backend self-check
  for (auto _ : st) benchmark::DoNotOptimize(eigenvalues(T.matrix).data());
  st.counters["dim"] = double(T.matrix.rows());
}
BENCHMARK(BM_EigenvaluesT)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_Det4Series(benchmark::State& st) {
  auto T = sector_T(default_potential(), default_k, 8.0);
  auto tr = matrix_traces(T, 48);
  for (auto _ : st) benchmark::DoNotOptimize(det4_series(tr, {0.3, 0.2}, 48).value);
}
BENCHMARK(BM_Det4Series);

void BM_Det4Eig(benchmark::State& st) {
  auto T = sector_T(default_potential(), default_k, 8.0);
  Eigen::VectorXcd ev = eigenvalues(T.matrix);
  for (auto _ : st) benchmark::DoNotOptimize(det4_eig(ev, {0.3, 0.2}).log_abs);
}
BENCHMARK(BM_Det4Eig);

void BM_ShiftedSigmaMin(benchmark::State& st) {
  auto T = sector_T(default_potential(), default_k, 8.0);
  ShiftedSigmaMin s(T.matrix);
  for (auto _ : st) benchmark::DoNotOptimize(s({0.5, 0.1}));
}
BENCHMARK(BM_ShiftedSigmaMin)->Unit(benchmark::kMicrosecond);

void BM_DisorderAssemble(benchmark::State& st) {
  const auto& m = model(int(st.range(0)));
  auto r = sample_realization(m.config(), m.L(), 1);
  for (auto _ : st) benchmark::DoNotOptimize(m.assemble(r).matrix.data());
  st.counters["dim"] = double(m.clean().rows());
}
BENCHMARK(BM_DisorderAssemble)->Arg(3)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_HermitianEigenvalues(benchmark::State& st) {
  const auto& m = model(int(st.range(0)));
  auto H = m.assemble(sample_realization(m.config(), m.L(), 1)).matrix;
  for (auto _ : st) benchmark::DoNotOptimize(hermitian_eigenvalues(H).data());
  st.counters["dim"] = double(H.rows());
}
BENCHMARK(BM_HermitianEigenvalues)->Arg(3)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_HermitianEigensystem(benchmark::State& st) {
  const auto& m = model(int(st.range(0)));
  auto H = m.assemble(sample_realization(m.config(), m.L(), 1)).matrix;
  Eigen::VectorXd e;
  Eigen::MatrixXcd v;
  for (auto _ : st) {
    hermitian_eigensystem(H, e, v);
    benchmark::DoNotOptimize(v.data());
  }
  st.counters["dim"] = double(H.rows());
}
BENCHMARK(BM_HermitianEigensystem)->Arg(3)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
