#include "tbg/disorder.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "tbg/linalg.hpp"
#include "tbg/parallel.hpp"
#include "tbg/rng.hpp"

namespace tbg {

void validate(const DisorderConfig& cfg) {
  if (!std::isfinite(cfg.lambda) || cfg.lambda < 0) throw std::invalid_argument("lambda must be finite and >= 0");
  if (!(cfg.bump_radius > 0)) throw std::invalid_argument("bump radius must be positive");
  if (cfg.relax_radius < 0) throw std::invalid_argument("relaxation radius must be >= 0");
  if (!(cfg.density_scale > 0)) throw std::invalid_argument("density scale must be positive");
  // bumps wider than half a Gamma cell diameter give unbounded overlap counts
  const auto& lat = lattice();
  double diam = std::max(std::abs(lat.gamma_gens[0] + lat.gamma_gens[1]), std::abs(lat.gamma_gens[0] - lat.gamma_gens[1]));
  if (cfg.bump_radius + cfg.relax_radius >= 0.5 * diam) throw std::invalid_argument("bump support exceeds half the cell diameter");
}

double bump_shape(double r, double R) {
  if (r >= R) return 0.0;
  double x = r / R;
  return std::exp(1.0 - 1.0 / (1.0 - x * x));
}

BumpNormalization bump_normalization(const DisorderConfig& cfg, int n) {
  const auto& lat = lattice();
  const cplx A1 = lat.gamma3_gens[0], A2 = lat.gamma3_gens[1];
  const double R = cfg.bump_radius, rho = cfg.relax_radius;
  int reach = int(std::ceil((R + rho) / std::abs(A1))) + 2;
  double hi = 0, lo = 1e300;
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t) {
      cplx z = (double(s) / n) * A1 + (double(t) / n) * A2;
      double up = 0, down = 0;
      for (int i = -reach; i <= reach; ++i)
        for (int j = -reach; j <= reach; ++j) {
          double d = std::abs(z - double(i) * A1 - double(j) * A2);
          up += bump_shape(std::max(d - rho, 0.0), R);
          down += bump_shape(d + rho, R);
        }
      hi = std::max(hi, up);
      lo = std::min(lo, down);
    }
  BumpNormalization out;
  out.constant = 1.0 / hi;
  out.worst_sum_min = lo / hi;
  return out;
}

cplx DisorderRealization::site(int idx) const {
  const auto& lat = lattice();
  return double(idx / L) * lat.gamma3_gens[0] + double(idx % L) * lat.gamma3_gens[1];
}

DisorderRealization sample_realization(const DisorderConfig& cfg, int L, std::uint64_t seed) {
  if (L < 1) throw std::invalid_argument("L must be >= 1");
  validate(cfg);
  DisorderRealization r;
  r.L = L;
  r.seed = seed;
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0), unit(0.0, 1.0), ang(0.0, 2.0 * pi);
  for (int i = 0; i < L * L; ++i) {
    double y = uni(gen);
    double x = cfg.density_scale == 1.0 ? y : std::copysign(std::pow(std::abs(y), cfg.density_scale), y);
    double rad = cfg.relax_radius * std::sqrt(unit(gen));
    double th = ang(gen);
    r.amplitudes.push_back(x);
    r.displacements.push_back(std::polar(rad, th));
  }
  return r;
}

FiniteModel::FiniteModel(int L, double m, cplx alpha, const DisorderConfig& cfg, double cutoff, const PotentialSpec& pot,
                         int grid_points)
    : cfg_(cfg), m_(m), alpha_(alpha) {
  validate(cfg);
  if (m < 0) throw std::invalid_argument("m must be >= 0");
  basis_ = std::make_shared<TorusBasis>(L, cutoff);
  grid_ = make_grid(*basis_, grid_points);
  H0_ = torus_hamiltonian(*basis_, m, alpha, pot);
  norm_ = bump_normalization(cfg);
}

std::vector<double> FiniteModel::potential_grid(const DisorderRealization& r) const {
  if (r.L != L()) throw std::invalid_argument("realization size does not match the torus");
  const auto& lat = lattice();
  const int N = grid_.N, L = grid_.L;
  const cplx P1 = double(L) * lat.gamma3_gens[0], P2 = double(L) * lat.gamma3_gens[1];
  const double R = cfg_.bump_radius;
  std::vector<double> f(std::size_t(N) * N, 0.0);
  for (int idx = 0; idx < L * L; ++idx) {
    cplx c = r.site(idx) + r.displacements[idx];
    double amp = norm_.constant * r.amplitudes[idx];
    for (int i1 = 0; i1 < N; ++i1)
      for (int i2 = 0; i2 < N; ++i2) {
        cplx d = min_image(grid_.z(i1, i2) - c, P1, P2);
        double acc = 0;
        // the minimum image is the only one inside the support once the torus is wide enough
        if (L >= 2) {
          acc = bump_shape(std::abs(d), R);
        } else {
          for (int a = -2; a <= 2; ++a)
            for (int b = -2; b <= 2; ++b) acc += bump_shape(std::abs(d + double(a) * P1 + double(b) * P2), R);
        }
        f[std::size_t(i1) * N + i2] += amp * acc;
      }
  }
  return f;
}

Eigen::MatrixXcd FiniteModel::potential_operator(const DisorderRealization& r, double* correction) const {
  auto f = potential_grid(r);
  std::array<std::array<cplx, 4>, 4> w{};
  if (cfg_.kind == DisorderCase::Case2) {
    for (int c = 0; c < 4; ++c) w[c][c] = 1.0;
  } else {
    double s = 1.0 / std::sqrt(1.0 + cfg_.case1_ratio * cfg_.case1_ratio);
    cplx z = std::polar(cfg_.case1_ratio, cfg_.case1_phase);
    for (int c = 0; c < 2; ++c) {
      w[c][c] = s;
      w[c + 2][c + 2] = -s;
      w[c + 2][c] = s * z;
      w[c][c + 2] = s * std::conj(z);
    }
  }
  Eigen::MatrixXcd V = compress(*basis_, grid_, f, w);
  Eigen::MatrixXcd Vh = V.adjoint();
  if (correction) *correction = (V - Vh).norm();
  return 0.5 * (V + Vh);
}

FiniteHamiltonian FiniteModel::assemble(const DisorderRealization& r) const {
  FiniteHamiltonian out;
  out.L = L();
  out.m = m_;
  out.alpha = alpha_;
  out.lambda = cfg_.lambda;
  out.seed = r.seed;
  out.basis = basis_;
  if (cfg_.lambda == 0.0) {
    out.matrix = H0_;
    return out;
  }
  out.matrix = H0_ + cfg_.lambda * potential_operator(r, &out.hermitian_correction);
  return out;
}

FiniteHamiltonian assemble_finite_H(double m, cplx alpha, const DisorderConfig& cfg, const DisorderRealization& r,
                                    double cutoff, const PotentialSpec& pot) {
  return FiniteModel(r.L, m, alpha, cfg, cutoff, pot).assemble(r);
}

std::vector<Eigen::VectorXd> ensemble_spectra(const FiniteModel& model, int n_real, std::uint64_t seed) {
  if (n_real < 1) throw std::invalid_argument("need at least one realization");
  std::vector<Eigen::VectorXd> out(n_real);
  const std::string tag = "disorder/L" + std::to_string(model.L());
  parallel_for(n_real, [&](int i) {
    auto r = sample_realization(model.config(), model.L(), derive_seed(seed, tag, std::uint64_t(i)));
    out[i] = hermitian_eigenvalues(model.assemble(r).matrix);
  });
  return out;
}

namespace {

long long count_in(const Eigen::VectorXd& e, double lo, double hi) {
  const double* b = e.data();
  const double* end = b + e.size();
  return std::lower_bound(b, end, hi) - std::lower_bound(b, end, lo);
}

double mean_count(const std::vector<Eigen::VectorXd>& spectra, double lo, double hi, double* se = nullptr) {
  double s = 0, s2 = 0;
  for (const auto& e : spectra) {
    double c = double(count_in(e, lo, hi));
    s += c;
    s2 += c * c;
  }
  const double n = double(spectra.size());
  double mean = s / n;
  if (se) *se = n > 1 ? std::sqrt(std::max(s2 / n - mean * mean, 0.0) * n / (n - 1) / n) : 0.0;
  return mean;
}

}  // namespace

EnsembleStats ids_estimate(const std::vector<Eigen::VectorXd>& spectra, double area, const std::vector<Interval>& intervals,
                           int hist_bins) {
  if (spectra.empty()) throw std::invalid_argument("need at least one realization");
  if (hist_bins < 1) throw std::invalid_argument("need at least one histogram bin");
  EnsembleStats st;
  st.n_realizations = int(spectra.size());
  st.dimension = int(spectra[0].size());
  st.area = area;
  double lo = 1e300, hi = -1e300;
  for (const auto& e : spectra) {
    if (e.size() != st.dimension) throw std::invalid_argument("realizations have different dimensions");
    lo = std::min(lo, e.minCoeff());
    hi = std::max(hi, e.maxCoeff());
  }
  if (hi <= lo) hi = lo + 1.0;
  st.hist_edges.resize(hist_bins + 1);
  for (int b = 0; b <= hist_bins; ++b) st.hist_edges[b] = lo + (hi - lo) * b / hist_bins;
  st.hist_counts.assign(hist_bins, 0);
  for (const auto& e : spectra)
    for (int i = 0; i < e.size(); ++i) {
      int b = int((e[i] - lo) / (hi - lo) * hist_bins);
      st.hist_counts[std::clamp(b, 0, hist_bins - 1)]++;
    }
  for (const auto& I : intervals) {
    if (!(I.hi >= I.lo)) throw std::invalid_argument("interval with hi < lo");
    IntervalEstimate est;
    est.I = I;
    double se = 0;
    est.mean_count = mean_count(spectra, I.lo, I.hi, &se);
    est.mean = est.mean_count / area;
    est.std_err = se / area;
    st.ids.push_back(est);
  }
  return st;
}

GapIntervals gap_intervals(const FiniteModel& model, double lambda) {
  Eigen::VectorXd e = hermitian_eigenvalues(model.clean()).cwiseAbs();
  std::sort(e.data(), e.data() + e.size());
  const int nf = 2 * model.L() * model.L();
  if (e.size() <= nf) throw std::invalid_argument("torus basis too small to hold the flat cluster");
  GapIntervals g;
  g.flat_lo = e[0];
  g.flat_hi = e[nf - 1];
  g.K = e[nf];
  g.k_minus = g.flat_lo - lambda;
  g.k_plus = g.flat_hi + lambda;
  g.K_minus = g.K - lambda;
  return g;
}

int count_gap_violations(const GapIntervals& g, const Eigen::VectorXd& spectrum) {
  int v = 0;
  for (int i = 0; i < spectrum.size(); ++i) {
    double a = std::abs(spectrum[i]);
    if (g.k_minus > 0 && a < g.k_minus) ++v;
    if (a > g.k_plus && a < g.K_minus) ++v;
  }
  return v;
}

WegnerFit wegner_scaling(const DisorderConfig& cfg, const WegnerSpec& spec, const PotentialSpec& pot) {
  if (cfg.lambda == 0.0) throw std::invalid_argument("lambda = 0: the flat band makes E tr 1_I discontinuous at zero width");
  if (spec.L_list.size() < 2 || spec.widths.size() < 2) throw std::invalid_argument("need at least two sizes and two widths");
  WegnerFit fit;
  fit.L_list = spec.L_list;
  fit.widths = spec.widths;
  const double center = spec.center < 0 ? spec.m : spec.center;
  const int iw = spec.area_width_index < 0 ? int(spec.widths.size()) / 2 : spec.area_width_index;
  const int nL = int(spec.L_list.size()), nw = int(spec.widths.size());
  std::vector<std::vector<Eigen::VectorXd>> spectra(nL);
  std::vector<double> areas(nL);
  fit.k_minus = 1e300;
  fit.k_plus = -1e300;
  fit.K_minus = 1e300;
  for (int l = 0; l < nL; ++l) {
    FiniteModel model(spec.L_list[l], spec.m, spec.alpha, cfg, spec.cutoff, pot);
    areas[l] = model.area();
    GapIntervals g = gap_intervals(model, cfg.lambda);
    fit.k_minus = std::min(fit.k_minus, g.k_minus);
    fit.k_plus = std::max(fit.k_plus, g.k_plus);
    fit.K_minus = std::min(fit.K_minus, g.K_minus);
    spectra[l] = ensemble_spectra(model, spec.n_real, spec.seed);
    for (const auto& e : spectra[l]) fit.gap_violations += count_gap_violations(g, e);
  }
  double scale = 1.0;
  for (;; scale *= 2.0) {
    fit.mean_counts.resize(nL, nw);
    fit.std_errs.resize(nL, nw);
    bool zero = false;
    for (int l = 0; l < nL; ++l)
      for (int w = 0; w < nw; ++w) {
        double h = 0.5 * spec.widths[w] * scale, se = 0;
        fit.mean_counts(l, w) = mean_count(spectra[l], center - h, center + h, &se);
        fit.std_errs(l, w) = se;
        zero = zero || fit.mean_counts(l, w) == 0.0;
      }
    if (!zero) break;
    if (++fit.widenings > 6) throw std::runtime_error("wegner: zero counts even after widening the intervals");
  }
  for (auto& w : fit.widths) w *= scale;
  std::vector<double> lx, ly;
  for (int w = 0; w < nw; ++w) {
    lx.push_back(std::log(fit.widths[w]));
    ly.push_back(std::log(fit.mean_counts(nL - 1, w)));
  }
  auto wf = fit_line(lx, ly);
  fit.width_exponent = wf.slope;
  fit.width_r2 = wf.r_squared;
  lx.clear();
  ly.clear();
  for (int l = 0; l < nL; ++l) {
    lx.push_back(std::log(areas[l]));
    ly.push_back(std::log(fit.mean_counts(l, iw)));
  }
  auto af = fit_line(lx, ly);
  fit.area_exponent = af.slope;
  fit.area_r2 = af.r_squared;
  return fit;
}

LipschitzFit lipschitz_windows(const std::vector<Eigen::VectorXd>& spectra, double area, const std::vector<double>& widths,
                               double lo, double hi, double step) {
  if (spectra.empty()) throw std::invalid_argument("need at least one realization");
  if (!(step > 0)) throw std::invalid_argument("step must be positive");
  LipschitzFit out;
  out.widths = widths;
  for (double w : widths) {
    if (!(w > 0) || w > hi - lo) throw std::invalid_argument("window width outside (0, hi - lo]");
    double best = 0;
    for (double a = lo; a + w <= hi + 1e-12; a += step) best = std::max(best, mean_count(spectra, a, a + w) / area);
    out.max_mass.push_back(best);
  }
  out.fit = fit_line(out.widths, out.max_mass);
  return out;
}

}  // namespace tbg
