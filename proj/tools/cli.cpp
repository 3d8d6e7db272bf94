#include "cli.hpp"

#include <Eigen/Core>
#include <chrono>
#include <ctime>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "commands.hpp"
#include "tbg/parallel.hpp"

#ifndef TBG_VERSION
#define TBG_VERSION "0.0.0"
#endif

namespace tbgcli {

namespace {

std::string flag_name(const std::string& key) {
  std::string s = key;
  for (auto& ch : s)
    if (ch == '_') ch = '-';
  return "--" + s;
}

struct SubOptions {
  std::string config_path;
  std::optional<long long> seed;
  std::optional<std::string> out;
  int threads = 0;
  std::map<std::string, std::string> overrides;  // json pointer -> text
};

void add_overrides(CLI::App* app, const json& defaults, SubOptions& o) {
  auto add = [&](const std::string& flag, const std::string& pointer, const std::string& help) {
    app->add_option_function<std::string>(
           flag, [&o, pointer](const std::string& v) { o.overrides[pointer] = v; }, help)
        ->type_name("VALUE");
  };
  add("--m", "/model/m", "mass m");
  add("--alpha", "/model/alpha", "alpha as re or re,im");
  add("--cutoff", "/numerics/cutoff", "momentum cutoff");
  add("--kgrid", "/numerics/kgrid", "k-grid size");
  add("--L-list", "/numerics/L_list", "torus sizes, comma separated");
  if (defaults["disorder"].is_object())
    for (const auto& [k, _] : defaults["disorder"].items()) add(flag_name(k), "/disorder/" + k, "disorder " + k);
  for (const auto& [k, _] : defaults["task"].items()) add(flag_name(k), "/task/" + k, "task " + k);
}

const std::map<std::string, std::string> descriptions{
    {"magic", "magic angles from the spectrum of T_k"},
    {"bands", "band structure on the zone path, gap and flatness"},
    {"traces", "trace table sigma_p"},
    {"det4", "regularized determinant by eigenvalues and by the trace series"},
    {"stability-bound", "log10 of the stability bound along a line of alpha"},
    {"pseudospec", "sigma_min(T - z) on a grid and the eigenvalues of T"},
    {"instability", "sigma_min(T + 1/alpha) along real alpha with a log-linear fit"},
    {"perturb-scatter", "magic angles of randomly perturbed T with containment checks"},
    {"disorder-ids", "disordered torus spectra, histogram and IDS"},
    {"wegner", "Wegner scaling of eigenvalue counts in width and area"},
    {"chern", "Hall conductance, partial Chern numbers and projection decay"},
    {"transport", "transport moments and their time averages"},
    {"wannier-moment", "Wannier localization moments of the flat bands"}};

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

json build_info() {
  return {{"tbg", TBG_VERSION},
          {"compiler", __VERSION__},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                                "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

json effective_config(const std::string& sub, const SubOptions& o) {
  json cfg = default_config(sub);
  if (!o.config_path.empty()) {
    json file = load_config_file(o.config_path);
    // a manifest can be fed back as a config
    if (file.is_object() && file.contains("config") && file.contains("subcommand")) {
      if (file["subcommand"] != sub) throw ConfigError("manifest belongs to subcommand " + file["subcommand"].dump());
      file = file["config"];
    }
    cfg = merge_strict(cfg, file);
  }
  for (const auto& [ptr, text] : o.overrides) apply_override(cfg, ptr, text);
  if (o.seed) cfg["seed"] = *o.seed;
  if (o.out) cfg["output_dir"] = *o.out;
  if (cfg["seed"].get<long long>() < 0) throw ConfigError("/seed: must be nonnegative");
  potential_from(cfg);
  if (cfg["disorder"].is_object()) disorder_from(cfg);
  return cfg;
}

int report(const std::string& sub, const char* kind, const std::string& msg, int code) {
  json e = {{"error", {{"subcommand", sub}, {"kind", kind}, {"message", msg}}}};
  std::cerr << e.dump() << "\n";
  return code;
}

int execute(const std::string& sub, const SubOptions& o) {
  json cfg;
  try {
    cfg = effective_config(sub, o);
  } catch (const std::exception& e) {
    return report(sub, "config", e.what(), 2);
  }
  if (o.threads > 0) tbg::set_threads(o.threads);
  OutputSet out(cfg["output_dir"].get<std::string>(), sub);
  const auto t0 = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  try {
    Context ctx{cfg, out, cfg["seed"].get<std::uint64_t>()};
    run_subcommand(sub, ctx);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.write_manifest({{"subcommand", sub},
                        {"seed", cfg["seed"]},
                        {"config", cfg},
                        {"versions", build_info()},
                        {"threads", tbg::threads()},
                        {"started_utc", started},
                        {"wall_time_s", wall}});
  } catch (const ConfigError& e) {
    out.discard();
    return report(sub, "config", e.what(), 2);
  } catch (const std::domain_error& e) {
    out.discard();
    return report(sub, "domain", e.what(), 3);
  } catch (const std::exception& e) {
    out.discard();
    return report(sub, "runtime", e.what(), 1);
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"chiral twisted bilayer graphene numerics"};
  app.require_subcommand(1);
  std::map<std::string, SubOptions> opts;
  for (const auto& sub : subcommands()) {
    auto* s = app.add_subcommand(sub, descriptions.at(sub));
    SubOptions& o = opts[sub];
    s->add_option("--config", o.config_path, "JSON config file or manifest")->check(CLI::ExistingFile);
    s->add_option("--seed", o.seed, "base seed");
    s->add_option("--out", o.out, "output directory");
    s->add_option("--threads", o.threads, "worker threads (0 = hardware)")->check(CLI::NonNegativeNumber);
    add_overrides(s, default_config(sub), o);
  }
  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  for (const auto& sub : subcommands())
    if (app.got_subcommand(sub)) return execute(sub, opts[sub]);
  return 1;
}

}  // namespace tbgcli
