#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "tbg/bands.hpp"
#include "tbg/determinant.hpp"
#include "tbg/disorder.hpp"
#include "tbg/linalg.hpp"
#include "tbg/magic.hpp"
#include "tbg/perturb.hpp"
#include "tbg/rng.hpp"
#include "tbg/topology.hpp"

namespace tbgcli {

namespace {

using tbg::cplx;

double cutoff(const Context& c) { return get_double(c.cfg, "/numerics/cutoff"); }
cplx alpha(const Context& c) { return get_complex(c.cfg, "/model/alpha"); }
double mass(const Context& c) { return get_double(c.cfg, "/model/m"); }

tbg::BlockOperator task_T(const Context& c) {
  return tbg::sector_T(potential_from(c.cfg), get_complex(c.cfg, "/task/k"), cutoff(c), 0);
}

std::vector<double> linspace(double a, double b, int n) {
  if (n < 2) throw ConfigError("need at least two grid points");
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

json fit_json(const tbg::LinearFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}, {"n", f.n}};
}

void cmd_magic(Context& c) {
  auto set = tbg::compute_magic_angles(potential_from(c.cfg), cutoff(c), get_complex(c.cfg, "/task/k"),
                                       get_double(c.cfg, "/task/alpha_max"));
  CsvTable t({"index", "alpha_re", "alpha_im", "abs_alpha", "eigenvalue_re", "eigenvalue_im", "degeneracy", "sector",
              "generic", "residual"});
  long long i = 0;
  for (const auto& a : set.alphas)
    t.add({i++, a.alpha.real(), a.alpha.imag(), std::abs(a.alpha), a.eigenvalue.real(), a.eigenvalue.imag(),
           (long long)a.degeneracy, (long long)a.sector, (long long)a.generic, a.residual});
  c.out.write_csv("alphas", t);
}

void cmd_bands(Context& c) {
  auto pot = potential_from(c.cfg);
  auto path = tbg::default_path(get_int(c.cfg, "/task/n_per_segment"));
  auto res = tbg::bands_on_path(mass(c), alpha(c), pot, path, cutoff(c));
  int nb = std::min<int>(get_int(c.cfg, "/task/bands"), int(res.energies.cols()));
  if (nb < 1) throw ConfigError("/task/bands: must be positive");
  int first = int(res.energies.cols()) / 2 - nb / 2;
  std::vector<std::string> head{"path_coord", "k_re", "k_im"};
  for (int b = 0; b < nb; ++b) head.push_back("E_" + std::to_string(b + 1));
  CsvTable t(head);
  for (int i = 0; i < int(path.size()); ++i) {
    std::vector<Cell> row{res.path_coord[i], res.kpath[i].real(), res.kpath[i].imag()};
    for (int b = 0; b < nb; ++b) row.push_back(res.energies(i, first + b));
    t.add(row);
  }
  c.out.write_csv("bands", t);
  if (get_bool(c.cfg, "/task/gap")) {
    int kg = get_int(c.cfg, "/numerics/kgrid");
    c.summary["spectral_gap"] = tbg::spectral_gap(alpha(c), mass(c), pot, kg, cutoff(c));
    c.summary["flat_band_certificate"] = tbg::flat_band_certificate(alpha(c), mass(c), kg, pot, cutoff(c));
  }
}

void cmd_traces(Context& c) {
  auto tt = tbg::compute_traces(potential_from(c.cfg), get_complex(c.cfg, "/task/k"), cutoff(c),
                                get_int(c.cfg, "/task/pmax"));
  CsvTable t({"p", "sigma_re", "sigma_im", "reference", "rel_err", "conditional"});
  for (const auto& [p, s] : tt.sigma)
    t.add({(long long)p, s.real(), s.imag(), tt.reference.at(p), tt.rel_err.at(p),
           (long long)(p == 1 && tt.sigma1_conditional)});
  c.out.write_csv("traces", t);
}

void cmd_det4(Context& c) {
  auto T = task_T(c);
  const int n = get_int(c.cfg, "/task/n_terms");
  const int np = get_int(c.cfg, "/task/n_points");
  const double radius = get_double(c.cfg, "/task/radius");
  auto tr = tbg::matrix_traces(T, n);
  auto mu = tbg::det4_mu(tr, n);
  Eigen::VectorXcd ev = tbg::eigenvalues(T.matrix);
  CsvTable t({"alpha_re", "alpha_im", "eig_re", "eig_im", "series_re", "series_im", "abs_diff", "tail"});
  const double golden = tbg::pi * (3.0 - std::sqrt(5.0));
  int bad = 0;
  for (int j = 0; j < np; ++j) {
    cplx a = std::polar(radius * std::sqrt((j + 0.5) / np), golden * j);
    cplx e = tbg::det4_eig(ev, a).value();
    auto s = tbg::det4_series(tr, a, n);
    double d = std::abs(e - s.value);
    if (!(d <= s.tail + 1e-8)) ++bad;
    t.add({a.real(), a.imag(), e.real(), e.imag(), s.value.real(), s.value.imag(), d, s.tail});
  }
  c.out.write_csv("det4", t);
  CsvTable m({"j", "mu_re", "mu_im"});
  for (int j = 0; j <= n; ++j) m.add({(long long)j, mu[j].real(), mu[j].imag()});
  c.out.write_csv("mu", m);
  c.summary["points_outside_tail"] = bad;
  c.summary["mu4_plus_6_tr4"] = std::abs(mu[4] + 6.0 * tr.series[4]);
}

void cmd_stability_bound(Context& c) {
  auto T = task_T(c);
  Eigen::VectorXcd ev = tbg::eigenvalues(T.matrix);
  auto xs = linspace(get_double(c.cfg, "/task/alpha_min"), get_double(c.cfg, "/task/alpha_max"), get_int(c.cfg, "/task/n"));
  const double im = get_double(c.cfg, "/task/alpha_imag");
  CsvTable t({"alpha_re", "alpha_im", "log10_bound"});
  for (double x : xs) {
    cplx a(x, im);
    t.add({x, im, tbg::stability_bound(a, tbg::det4_eig(ev, a))});
  }
  c.out.write_csv("bound", t);
}

void cmd_pseudospec(Context& c) {
  auto T = task_T(c);
  auto g = tbg::pseudospectrum_grid(T, get_double(c.cfg, "/task/re_min"), get_double(c.cfg, "/task/re_max"),
                                    get_double(c.cfg, "/task/im_min"), get_double(c.cfg, "/task/im_max"),
                                    get_int(c.cfg, "/task/nx"), get_int(c.cfg, "/task/ny"));
  CsvTable t({"z_re", "z_im", "sigma_min"});
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      cplx z = g.node(ix, iy);
      t.add({z.real(), z.imag(), g.values(ix, iy)});
    }
  c.out.write_csv("grid", t);
  Eigen::VectorXcd ev = tbg::eigenvalues(T.matrix);
  std::vector<int> order(ev.size());
  for (int i = 0; i < int(order.size()); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::make_pair(ev(a).real(), ev(a).imag()) < std::make_pair(ev(b).real(), ev(b).imag());
  });
  CsvTable e({"mu_re", "mu_im"});
  for (int i : order) e.add({ev(i).real(), ev(i).imag()});
  c.out.write_csv("eigenvalues", e);
}

void cmd_instability(Context& c) {
  auto T = task_T(c);
  auto xs = linspace(get_double(c.cfg, "/task/alpha_min"), get_double(c.cfg, "/task/alpha_max"), get_int(c.cfg, "/task/n"));
  auto scan = tbg::instability_scan(T, xs);
  CsvTable t({"alpha", "sigma_min", "log_sigma_min"});
  for (std::size_t i = 0; i < scan.alpha.size(); ++i) t.add({scan.alpha[i], scan.sigma[i], std::log(scan.sigma[i])});
  c.out.write_csv("scan", t);
  c.summary["fit"] = fit_json(scan.fit);
}

void cmd_perturb_scatter(Context& c) {
  tbg::PerturbationSpec ps;
  ps.shells = get_int(c.cfg, "/task/shells");
  ps.sup_grid = get_int(c.cfg, "/task/sup_grid");
  ps.diagonal = get_bool(c.cfg, "/task/diagonal");
  const double amax = get_double(c.cfg, "/task/alpha_max");
  auto pot = potential_from(c.cfg);
  CsvTable t({"lambda", "realization", "seed", "alpha_re", "alpha_im", "dT_norm"});
  json per = json::array();
  int li = 0;
  for (double lam : get_doubles(c.cfg, "/task/lambdas")) {
    auto res = tbg::perturbed_magic_scatter(pot, lam, get_int(c.cfg, "/task/n_samples"),
                                            tbg::derive_seed(c.seed, "perturb-scatter/lambda", li++), ps, cutoff(c),
                                            get_complex(c.cfg, "/task/k"));
    long long cv = 0, bv = 0;
    double worst = -1e300;
    for (const auto& s : res.samples) {
      cv += s.containment_violations;
      bv += s.bound_violations;
      worst = std::max(worst, s.worst_containment);
      std::vector<cplx> as;
      for (const auto& mu : s.eigenvalues)
        if (std::abs(mu) * amax >= 1.0) as.push_back(1.0 / mu);
      std::sort(as.begin(), as.end(), [](cplx a, cplx b) {
        return std::make_pair(a.real(), a.imag()) < std::make_pair(b.real(), b.imag());
      });
      for (const auto& a : as)
        t.add({lam, (long long)s.realization, std::to_string(s.seed), a.real(), a.imag(), s.dT_norm});
    }
    per.push_back({{"lambda", lam},
                   {"realizations", res.samples.size()},
                   {"containment_violations", cv},
                   {"bound_violations", bv},
                   {"worst_containment_excess", worst}});
  }
  c.out.write_csv("scatter", t);
  c.summary["ensembles"] = per;
}

std::string L_tag(const std::string& sub, int L) { return sub + "/L" + std::to_string(L); }

void cmd_disorder_ids(Context& c) {
  auto cfg = disorder_from(c.cfg);
  auto pot = potential_from(c.cfg);
  const int nr = get_int(c.cfg, "/task/n_real");
  auto intervals = get_intervals(c.cfg, "/task/intervals");
  CsvTable hist({"L", "edge_lo", "edge_hi", "count", "density"});
  CsvTable ids({"L", "lo", "hi", "mean_per_area", "std_err", "mean_count"});
  CsvTable spec({"L", "realization", "index", "E"});
  CsvTable reals({"L", "realization", "seed", "site", "amplitude", "xi_re", "xi_im"});
  json per = json::array();
  for (int L : get_ints(c.cfg, "/numerics/L_list")) {
    tbg::FiniteModel model(L, mass(c), alpha(c), cfg, cutoff(c), pot, get_int(c.cfg, "/task/grid_points"));
    std::uint64_t base = tbg::derive_seed(c.seed, "disorder-ids", L);
    auto spectra = tbg::ensemble_spectra(model, nr, base);
    auto st = tbg::ids_estimate(spectra, model.area(), intervals, get_int(c.cfg, "/task/bins"));
    auto gaps = tbg::gap_intervals(model, cfg.lambda);
    long long viol = 0;
    for (const auto& s : spectra) viol += tbg::count_gap_violations(gaps, s);
    for (std::size_t b = 0; b + 1 < st.hist_edges.size(); ++b) {
      double w = st.hist_edges[b + 1] - st.hist_edges[b];
      hist.add({(long long)L, st.hist_edges[b], st.hist_edges[b + 1], st.hist_counts[b],
                double(st.hist_counts[b]) / (nr * model.area() * w)});
    }
    for (const auto& e : st.ids) ids.add({(long long)L, e.I.lo, e.I.hi, e.mean, e.std_err, e.mean_count});
    for (int r = 0; r < nr; ++r)
      for (int i = 0; i < int(spectra[r].size()); ++i) spec.add({(long long)L, (long long)r, (long long)i, spectra[r](i)});
    if (get_bool(c.cfg, "/task/save_realizations")) {
      for (int r = 0; r < nr; ++r) {
        std::uint64_t s = tbg::derive_seed(base, "disorder/L" + std::to_string(L), r);
        auto R = tbg::sample_realization(cfg, L, s);
        for (int i = 0; i < int(R.amplitudes.size()); ++i)
          reals.add({(long long)L, (long long)r, std::to_string(s), (long long)i, R.amplitudes[i],
                     R.displacements[i].real(), R.displacements[i].imag()});
      }
    }
    per.push_back({{"L", L},
                   {"dimension", st.dimension},
                   {"area", st.area},
                   {"normalization", model.normalization()},
                   {"gap", {{"k_minus", gaps.k_minus}, {"k_plus", gaps.k_plus}, {"K_minus", gaps.K_minus}}},
                   {"gap_violations", viol}});
  }
  c.out.write_csv("histogram", hist);
  c.out.write_csv("ids", ids);
  c.out.write_csv("spectra", spec);
  if (get_bool(c.cfg, "/task/save_realizations")) c.out.write_csv("realizations", reals);
  c.summary["ensembles"] = per;
}

void cmd_wegner(Context& c) {
  auto cfg = disorder_from(c.cfg);
  tbg::WegnerSpec ws;
  ws.L_list = get_ints(c.cfg, "/numerics/L_list");
  ws.widths = get_doubles(c.cfg, "/task/widths");
  ws.n_real = get_int(c.cfg, "/task/n_real");
  ws.seed = c.seed;
  ws.m = mass(c);
  ws.alpha = alpha(c);
  ws.cutoff = cutoff(c);
  ws.center = get_double(c.cfg, "/task/center");
  auto f = tbg::wegner_scaling(cfg, ws, potential_from(c.cfg));
  CsvTable t({"L", "width", "mean_count", "std_err"});
  for (int i = 0; i < int(f.L_list.size()); ++i)
    for (int j = 0; j < int(f.widths.size()); ++j)
      t.add({(long long)f.L_list[i], f.widths[j], f.mean_counts(i, j), f.std_errs(i, j)});
  c.out.write_csv("counts", t);
  c.summary = {{"width_exponent", f.width_exponent}, {"width_r2", f.width_r2},
               {"area_exponent", f.area_exponent},   {"area_r2", f.area_r2},
               {"gap_violations", f.gap_violations}, {"widenings", f.widenings},
               {"k_minus", f.k_minus},               {"k_plus", f.k_plus},
               {"K_minus", f.K_minus}};
}

// eigensystem of one realization (the clean model when lambda = 0)
struct Sample {
  Eigen::VectorXd evals;
  Eigen::MatrixXcd evecs;
};

Sample diagonalize(const tbg::FiniteModel& model, std::uint64_t seed) {
  auto R = tbg::sample_realization(model.config(), model.L(), seed);
  auto H = model.assemble(R);
  Sample s;
  tbg::hermitian_eigensystem(H.matrix, s.evals, s.evecs);
  return s;
}

void cmd_chern(Context& c) {
  auto cfg = disorder_from(c.cfg);
  auto pot = potential_from(c.cfg);
  auto windows = get_intervals(c.cfg, "/task/windows");
  tbg::SwitchFunctions sw;
  sw.theta1_offset = get_double(c.cfg, "/task/theta1_offset");
  sw.theta2_offset = get_double(c.cfg, "/task/theta2_offset");
  tbg::TraceRegion tr;
  tr.half_width = get_double(c.cfg, "/task/half_width");
  CsvTable t({"L", "lambda", "window_lo", "window_hi", "rank", "omega_re", "omega_im", "omega1_re", "omega1_im",
              "omega2_re", "omega2_im", "chern_re", "chern_im"});
  CsvTable d({"L", "lambda", "window_lo", "window_hi", "separation", "overlap_norm"});
  json fits = json::array();
  for (int L : get_ints(c.cfg, "/numerics/L_list")) {
    tbg::FiniteModel model(L, mass(c), alpha(c), cfg, cutoff(c), pot);
    Sample s = diagonalize(model, tbg::derive_seed(c.seed, L_tag("chern", L), 0));
    for (const auto& w : windows) {
      auto P = tbg::spectral_projection(s.evals, s.evecs, model.basis_ptr(), model.grid(), w);
      auto h = tbg::hall_conductance(P, sw, tr);
      auto h1 = tbg::partial_chern(P, 1, sw, tr);
      auto h2 = tbg::partial_chern(P, 2, sw, tr);
      t.add({(long long)L, cfg.lambda, w.lo, w.hi, (long long)P.rank(), h.omega.real(), h.omega.imag(), h1.omega.real(),
             h1.omega.imag(), h2.omega.real(), h2.omega.imag(), h.chern.real(), h.chern.imag()});
      if (get_bool(c.cfg, "/task/decay") && P.rank() > 0) {
        auto f = tbg::combes_thomas_decay(P);
        for (std::size_t i = 0; i < f.separation.size(); ++i)
          d.add({(long long)L, cfg.lambda, w.lo, w.hi, f.separation[i], f.norm[i]});
        fits.push_back({{"L", L}, {"window", {w.lo, w.hi}}, {"rate", f.rate}, {"r_squared", f.r_squared},
                        {"rejected", f.rejected}});
      }
    }
  }
  c.out.write_csv("chern", t);
  if (get_bool(c.cfg, "/task/decay")) {
    c.out.write_csv("decay", d);
    c.summary["decay_fits"] = fits;
  }
  if (get_bool(c.cfg, "/task/plaquette")) {
    json pl = json::array();
    for (int b : {1, -1}) {
      auto r = tbg::chern_fhs(alpha(c), mass(c), pot, {b}, get_int(c.cfg, "/numerics/kgrid"));
      pl.push_back({{"band", b}, {"chern", r.chern}, {"raw", r.raw}, {"min_gap", r.min_gap}});
    }
    c.summary["plaquette"] = pl;
  }
}

void cmd_transport(Context& c) {
  auto cfg = disorder_from(c.cfg);
  auto pot = potential_from(c.cfg);
  auto windows = get_intervals(c.cfg, "/task/windows");
  const double p = get_double(c.cfg, "/task/p");
  const double tmax = get_double(c.cfg, "/task/t_max"), dt = get_double(c.cfg, "/task/dt");
  if (!(dt > 0) || !(tmax > dt)) throw ConfigError("/task: need 0 < dt < t_max");
  std::vector<double> times;
  for (int i = 0; i * dt <= tmax * (1 + 1e-12); ++i) times.push_back(i * dt);
  auto T_list = get_doubles(c.cfg, "/task/T_list");
  const int nr = get_int(c.cfg, "/task/n_real");
  CsvTable series({"L", "window_lo", "window_hi", "realization", "t", "M"});
  CsvTable avg({"L", "window_lo", "window_hi", "T", "M_avg"});
  json warn = json::array();
  for (int L : get_ints(c.cfg, "/numerics/L_list")) {
    tbg::FiniteModel model(L, mass(c), alpha(c), cfg, cutoff(c), pot);
    std::vector<std::vector<std::vector<double>>> Ms(windows.size());
    for (int r = 0; r < nr; ++r) {
      Sample s = diagonalize(model, tbg::derive_seed(c.seed, L_tag("transport", L), r));
      for (std::size_t wi = 0; wi < windows.size(); ++wi) {
        tbg::WindowFunction chi{windows[wi].lo, windows[wi].hi};
        auto ts = tbg::transport_moment(model.basis(), model.grid(), s.evals, s.evecs, p, chi, times);
        if (ts.edge_warning) warn.push_back({{"L", L}, {"realization", r}, {"window", {chi.lo, chi.hi}}});
        for (std::size_t i = 0; i < ts.t.size(); ++i)
          series.add({(long long)L, chi.lo, chi.hi, (long long)r, ts.t[i], ts.M[i]});
        Ms[wi].push_back(ts.M);
      }
    }
    for (std::size_t wi = 0; wi < windows.size(); ++wi) {
      auto a = tbg::time_averaged_moment(times, Ms[wi], T_list);
      for (std::size_t i = 0; i < T_list.size(); ++i)
        avg.add({(long long)L, windows[wi].lo, windows[wi].hi, T_list[i], a[i]});
    }
  }
  c.out.write_csv("series", series);
  c.out.write_csv("averaged", avg);
  c.summary["edge_warnings"] = warn;
}

void cmd_wannier(Context& c) {
  CsvTable t({"L", "p", "wannier_moment"});
  auto pot = potential_from(c.cfg);
  auto Ls = get_ints(c.cfg, "/numerics/L_list");
  for (double p : get_doubles(c.cfg, "/task/p")) {
    auto pts = tbg::wannier_moment(alpha(c), p, Ls, pot, cutoff(c), get_int(c.cfg, "/task/cell_points"),
                                   get_double(c.cfg, "/task/check_cutoff"));
    for (const auto& w : pts) t.add({(long long)w.L, p, w.moment});
  }
  c.out.write_csv("moments", t);
}

}  // namespace

void run_subcommand(const std::string& sub, Context& ctx) {
  static const std::map<std::string, std::function<void(Context&)>> table{
      {"magic", cmd_magic},
      {"bands", cmd_bands},
      {"traces", cmd_traces},
      {"det4", cmd_det4},
      {"stability-bound", cmd_stability_bound},
      {"pseudospec", cmd_pseudospec},
      {"instability", cmd_instability},
      {"perturb-scatter", cmd_perturb_scatter},
      {"disorder-ids", cmd_disorder_ids},
      {"wegner", cmd_wegner},
      {"chern", cmd_chern},
      {"transport", cmd_transport},
      {"wannier-moment", cmd_wannier}};
  auto it = table.find(sub);
  if (it == table.end()) throw ConfigError("unknown subcommand '" + sub + "'");
  it->second(ctx);
  if (!ctx.summary.empty()) ctx.out.write_json("summary", ctx.summary);
}

}  // namespace tbgcli
