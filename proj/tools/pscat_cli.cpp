// Command-line front end: pscat <spectrum|scars|stats|dirichlet|oracle> [flags]

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pscat/commands.hpp"
#include "pscat/errors.hpp"

namespace {

struct Flags {
  std::string config;
  std::string gamma, mode, z, tail_mode, out, cache_dir;
  double X = 0, phi = 0, eps = 0, cutoff = 0, clumping = 0, delta_eps = 0;
  int k_max = 0, threads = 0, digits = 0;
  std::uint64_t seed = 0;
  bool oracle = false;
};

void add_flags(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON config file; flags override it");
  app->add_option("--gamma", f.gamma, "golden | sqrt2 | decimal literal");
  app->add_option("--X", f.X, "spectral ceiling");
  app->add_option("--phi", f.phi, "self-adjoint extension parameter");
  app->add_option("--mode", f.mode, "torus | dirichlet");
  app->add_option("--z", f.z, "scatterer as side fractions 'f1,f2' or 'center'");
  app->add_option("--eps", f.eps, "filter exponent in (0,1)");
  app->add_option("--k-max", f.k_max, "largest angular harmonic");
  app->add_option("--cutoff", f.cutoff, "secular tail cutoff");
  app->add_option("--tail-mode", f.tail_mode, "integral_correction | hard_truncate");
  app->add_option("--out", f.out, "output directory");
  app->add_flag("--oracle", f.oracle, "re-run brute-force oracles");
  app->add_option("--threads", f.threads, "OpenMP threads");
  app->add_option("--precision", f.digits, "working precision digits (17-50)");
  app->add_option("--clumping-threshold", f.clumping, "clumping filter threshold");
  app->add_option("--delta-eps", f.delta_eps, "delta-quantile cut for the rectangle");
  app->add_option("--seed", f.seed, "seed for sampled checks");
  app->add_option("--cache-dir", f.cache_dir, "norm table cache directory");
}

nlohmann::json merged_config(CLI::App* app, const Flags& f) {
  nlohmann::json j = nlohmann::json::object();
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw pscat::ConfigError("cannot read config " + f.config);
    j = nlohmann::json::parse(in);
  }
  auto given = [&](const char* name) { return app->count(name) > 0; };
  if (given("--gamma")) j["gamma"] = f.gamma;
  if (given("--X")) j["X"] = f.X;
  if (given("--phi")) j["phi"] = f.phi;
  if (given("--mode")) j["mode"] = f.mode;
  if (given("--z")) {
    if (f.z == "center") {
      j["z"] = "center";
    } else {
      const auto comma = f.z.find(',');
      if (comma == std::string::npos) {
        throw pscat::ConfigError("--z expects f1,f2 or center");
      }
      j["z"] = {std::stod(f.z.substr(0, comma)), std::stod(f.z.substr(comma + 1))};
    }
  }
  if (given("--eps")) j["eps"] = f.eps;
  if (given("--k-max")) j["k_max"] = f.k_max;
  if (given("--cutoff")) j["cutoff"] = f.cutoff;
  if (given("--tail-mode")) j["tail_mode"] = f.tail_mode;
  if (given("--out")) j["out"] = f.out;
  if (given("--oracle")) j["oracle"] = f.oracle;
  if (given("--threads")) j["threads"] = f.threads;
  if (given("--precision")) j["precision_digits"] = f.digits;
  if (given("--clumping-threshold")) j["clumping_threshold"] = f.clumping;
  if (given("--delta-eps")) j["delta_eps"] = f.delta_eps;
  if (given("--seed")) j["seed"] = f.seed;
  if (given("--cache-dir")) j["cache_dir"] = f.cache_dir;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Point scatterer on an irrational torus: spectra, scars, statistics"};
  app.require_subcommand(1);
  Flags flags;
  struct Sub {
    const char* name;
    const char* help;
    pscat::CommandResult (*run)(const pscat::RunConfig&);
  };
  const Sub subs[] = {
      {"spectrum", "norms and new eigenvalues", pscat::cmd_spectrum},
      {"scars", "momentum matrix elements and filters", pscat::cmd_scars},
      {"stats", "pair correlation, gaps, clumping, lemma probes", pscat::cmd_stats},
      {"dirichlet", "rectangle with Dirichlet walls", pscat::cmd_dirichlet},
      {"oracle", "compare against brute-force references", pscat::cmd_oracle},
  };
  std::vector<std::pair<CLI::App*, const Sub*>> apps;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_flags(sub, flags);
    apps.emplace_back(sub, &s);
  }
  CLI11_PARSE(app, argc, argv);

  for (const auto& [sub, s] : apps) {
    if (!sub->parsed()) continue;
    try {
      const auto cfg = pscat::config_from_json(merged_config(sub, flags));
      const auto res = s->run(cfg);
      for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
      for (const auto& f : res.files) std::cout << f.string() << '\n';
      return res.ok ? 0 : 3;
    } catch (...) {
      const auto e = std::current_exception();
      try {
        std::rethrow_exception(e);
      } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
      } catch (...) {
        std::cerr << "error: unknown failure\n";
      }
      return pscat::exit_code(e);
    }
  }
  return 1;
}
