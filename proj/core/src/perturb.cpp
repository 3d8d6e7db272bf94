#include "tbg/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "tbg/linalg.hpp"
#include "tbg/parallel.hpp"
#include "tbg/rng.hpp"

namespace tbg {

namespace {

int mod3(int n) { return ((n % 3) + 3) % 3; }

// points n1 q0 + n2 q1 with n1 + n2 = cls mod 3 on the lowest `shells` radii
std::vector<std::array<int, 2>> shell_points(int cls, int shells) {
  const auto& lat = lattice();
  std::map<long long, std::vector<std::array<int, 2>>> by_radius;
  const int M = 8;
  for (int a = -M; a <= M; ++a)
    for (int b = -M; b <= M; ++b) {
      if (mod3(a + b) != cls) continue;
      double r = std::abs(double(a) * lat.q[0] + double(b) * lat.q[1]);
      by_radius[std::llround(r * 1e8)].push_back({a, b});
    }
  std::vector<std::array<int, 2>> out;
  int taken = 0;
  for (auto& [r, pts] : by_radius) {
    if (taken++ == shells) break;
    out.insert(out.end(), pts.begin(), pts.end());
  }
  return out;
}

cplx momentum(const std::array<int, 2>& n) {
  const auto& lat = lattice();
  return double(n[0]) * lat.q[0] + double(n[1]) * lat.q[1];
}

std::array<int, 2> coords_of(cplx r) {
  const auto& lat = lattice();
  auto x = lattice_coords(r, lat.q[0], lat.q[1]);
  return {int(std::lround(x[0])), int(std::lround(x[1]))};
}

std::vector<FourierMode> random_modes(int cls, int shells, bool symmetric, std::mt19937_64& gen) {
  auto pts = shell_points(cls, shells);
  std::normal_distribution<double> nd(0.0, 1.0 / std::sqrt(2.0));
  std::map<std::array<int, 2>, cplx> c;
  for (const auto& p : pts) c[p] = cplx(nd(gen), nd(gen));
  if (symmetric) {
    // average over the group generated by c(w r) = w c(r) and c(-conj r) = conj c(r)
    const cplx w = lattice().omega;
    std::map<std::array<int, 2>, cplx> rot;
    for (const auto& p : pts) {
      cplx s = 0;
      for (int j = 0; j < 3; ++j) s += std::pow(std::conj(w), j) * c[coords_of(std::pow(w, j) * momentum(p))];
      rot[p] = s / 3.0;
    }
    for (const auto& p : pts) c[p] = 0.5 * (rot[p] + std::conj(rot[coords_of(-std::conj(momentum(p)))]));
  }
  std::vector<FourierMode> out;
  for (const auto& p : pts) out.push_back({momentum(p), c[p]});
  return out;
}

cplx eval_modes(const std::vector<FourierMode>& m, cplx z) {
  cplx s = 0;
  for (const auto& x : m) s += x.coeff * std::polar(1.0, pairing(z, x.momentum));
  return s;
}

}  // namespace

Eigen::Matrix2cd evaluate(const Perturbation& w, cplx z) {
  Eigen::Matrix2cd W;
  W << eval_modes(w.a_plus, z), eval_modes(w.v_plus, z), eval_modes(w.v_minus, z), eval_modes(w.a_minus, z);
  return W;
}

Perturbation sample_perturbation(const PerturbationSpec& spec, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  Perturbation w;
  w.v_plus = random_modes(1, spec.shells, true, gen);
  w.v_minus = random_modes(2, spec.shells, true, gen);
  if (spec.diagonal) {
    w.a_plus = random_modes(0, spec.shells, false, gen);
    w.a_minus = random_modes(0, spec.shells, false, gen);
  }
  const auto& lat = lattice();
  double sup = 0;
  const int G = spec.sup_grid;
  for (int s = 0; s < G; ++s)
    for (int t = 0; t < G; ++t) {
      cplx z = double(s) / G * lat.gamma3_gens[0] + double(t) / G * lat.gamma3_gens[1];
      Eigen::JacobiSVD<Eigen::Matrix2cd> svd(evaluate(w, z));
      sup = std::max(sup, svd.singularValues()(0));
    }
  for (auto* v : {&w.a_plus, &w.v_plus, &w.v_minus, &w.a_minus})
    for (auto& m : *v) m.coeff /= sup;
  w.sup_norm = 1.0;
  return w;
}

Eigen::MatrixXcd perturbation_operator(const Perturbation& w, const BlockOperator& T) {
  const auto& b = *T.basis;
  std::vector<int> pos(b.size(), -1);
  for (int r = 0; r < T.dim(); ++r) pos[T.support[r]] = r;
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(T.dim(), T.dim());
  struct Block {
    const std::vector<FourierMode>* modes;
    int from, to;
  };
  const Block blocks[] = {{&w.a_plus, 0, 0}, {&w.v_plus, 1, 0}, {&w.v_minus, 0, 1}, {&w.a_minus, 1, 1}};
  for (int col = 0; col < T.dim(); ++col) {
    int f = T.support[col];
    int c = b.component_of(f), i = b.momentum_of(f);
    for (const auto& bl : blocks) {
      if (bl.from != c) continue;
      for (const auto& m : *bl.modes) {
        auto n = coords_of(m.momentum);
        int j = b.find(b.shifts[i][0] + n[0], b.shifts[i][1] + n[1]);
        if (j < 0) continue;
        int row = pos[b.index(bl.to, j)];
        if (row >= 0) M(row, col) += m.coeff / b.momenta[j];
      }
    }
  }
  return M;
}

ScatterResult perturbed_magic_scatter(const PotentialSpec& pot, double lambda, int n_samples, std::uint64_t seed,
                                      const PerturbationSpec& spec, double cutoff, cplx k) {
  if (lambda < 0) throw std::invalid_argument("lambda must be nonnegative");
  if (n_samples < 1) throw std::invalid_argument("n_samples must be positive");
  BlockOperator T = sector_T(pot, k, cutoff, 0);
  ScatterResult res;
  res.unperturbed = eigenvalues(T.matrix);
  ShiftedSigmaMin sm(T.matrix);
  res.samples.resize(n_samples);
  parallel_for(n_samples, [&](int i) {
    ScatterSample& s = res.samples[i];
    s.realization = i;
    s.seed = derive_seed(seed, "perturb", std::uint64_t(i));
    Perturbation w = sample_perturbation(spec, s.seed);
    Eigen::MatrixXcd dT = lambda * perturbation_operator(w, T);
    s.dT_norm = lambda > 0 ? op_norm(dT) : 0.0;
    Eigen::VectorXcd ev = eigenvalues(T.matrix + dT);
    s.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    s.worst_containment = -1e300;
    for (const auto& mu : s.eigenvalues) {
      double excess = sm(mu) - s.dT_norm;
      s.worst_containment = std::max(s.worst_containment, excess);
      if (excess > 1e-9) ++s.containment_violations;
      if (lambda > 0 && std::abs(mu) > 1e-12) {
        cplx a = 1.0 / mu;
        double b = stability_bound(a, det4_eig(res.unperturbed, a));
        if (b > std::log10(s.dT_norm)) ++s.bound_violations;
      }
    }
  });
  return res;
}

}  // namespace tbg
