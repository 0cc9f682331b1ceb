#include "pscat/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <numbers>
#include <random>

#include <omp.h>

#include "pscat/errors.hpp"
#include "pscat/oracle.hpp"
#include "pscat/report.hpp"

namespace pscat {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double number(const nlohmann::json& v, const char* key) {
  if (!v.is_number()) throw ConfigError(std::string("config: ") + key + " must be a number");
  return v.get<double>();
}

Point parse_z(const nlohmann::json& v) {
  if (v.is_string()) {
    if (v.get<std::string>() == "center") return {0.5, 0.5};
    throw ConfigError("config: z must be \"center\" or [f1, f2]");
  }
  if (v.is_array() && v.size() == 2) return {number(v[0], "z"), number(v[1], "z")};
  if (v.is_object()) {
    return {number(v.at("z1_frac"), "z1_frac"), number(v.at("z2_frac"), "z2_frac")};
  }
  throw ConfigError("config: z must be \"center\" or [f1, f2]");
}

TorusGeometry geometry_of(const RunConfig& cfg) {
  return TorusGeometry::from_spec(cfg.gamma, cfg.precision_digits);
}

NormTable make_table(const TorusGeometry& geometry, double X,
                     const RunConfig& cfg) {
  if (cfg.cache_dir.empty()) return build_norm_table(geometry, X);
  return load_or_build(geometry, X, cfg.cache_dir);
}

void prepare(const RunConfig& cfg) {
  validate(cfg);
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
  std::filesystem::create_directories(cfg.out);
}

double tail_cutoff(const RunConfig& cfg, double fallback) {
  return cfg.cutoff > 0 ? cfg.cutoff : fallback;
}

std::size_t count_interlacing_failures(std::span<const NewEigenvalue> eigs) {
  std::size_t bad = 0;
  for (const auto& e : eigs) {
    if (e.is_ground()) {
      if (!(e.lambda < e.m)) ++bad;
    } else if (!(e.lower < e.lambda && e.lambda < e.m && e.gap_to_m > 0 &&
                 e.above_lower > 0)) {
      ++bad;
    }
  }
  return bad;
}

double max_residual(std::span<const NewEigenvalue> eigs) {
  double r = 0.0;
  for (const auto& e : eigs) r = std::max(r, e.residual);
  return r;
}

int decade_of(double m) { return static_cast<int>(std::floor(std::log10(m))); }

nlohmann::json median_or_null(std::vector<double> v) {
  if (v.empty()) return nullptr;
  return median(std::move(v));
}

}  // namespace

RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "gamma") {
      c.gamma = v.is_string() ? v.get<std::string>() : v.dump();
    } else if (key == "X") {
      c.X = number(v, "X");
    } else if (key == "phi") {
      c.phi = number(v, "phi");
    } else if (key == "mode") {
      c.mode = v.get<std::string>();
    } else if (key == "z") {
      if (!v.is_null()) c.z = parse_z(v);
    } else if (key == "z1_frac") {
      c.z = Point{number(v, "z1_frac"), c.z ? c.z->x2 : 0.0};
    } else if (key == "z2_frac") {
      c.z = Point{c.z ? c.z->x1 : 0.0, number(v, "z2_frac")};
    } else if (key == "eps") {
      c.eps = number(v, "eps");
    } else if (key == "k_max") {
      c.k_max = static_cast<int>(number(v, "k_max"));
    } else if (key == "cutoff") {
      c.cutoff = number(v, "cutoff");
    } else if (key == "tail_mode") {
      c.tail_mode = parse_tail_mode(v.get<std::string>());
    } else if (key == "out") {
      c.out = v.get<std::string>();
    } else if (key == "oracle") {
      c.oracle = v.get<bool>();
    } else if (key == "threads") {
      c.threads = static_cast<int>(number(v, "threads"));
    } else if (key == "precision_digits") {
      c.precision_digits = static_cast<int>(number(v, "precision_digits"));
    } else if (key == "clumping_threshold") {
      c.clumping_threshold = number(v, "clumping_threshold");
    } else if (key == "delta_eps") {
      c.delta_eps = number(v, "delta_eps");
    } else if (key == "seed") {
      c.seed = v.get<std::uint64_t>();
    } else if (key == "cache_dir") {
      c.cache_dir = v.get<std::string>();
    } else {
      throw ConfigError("config: unknown key " + key);
    }
  }
  return c;
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j = {
      {"gamma", c.gamma},
      {"X", c.X},
      {"phi", c.phi},
      {"mode", c.mode},
      {"eps", c.eps},
      {"k_max", c.k_max},
      {"cutoff", c.cutoff},
      {"tail_mode", to_string(c.tail_mode)},
      {"out", c.out.string()},
      {"oracle", c.oracle},
      {"threads", c.threads},
      {"precision_digits", c.precision_digits},
      {"clumping_threshold", c.clumping_threshold},
      {"delta_eps", c.delta_eps},
      {"seed", c.seed},
      {"cache_dir", c.cache_dir},
  };
  if (c.z) {
    j["z"] = {{"z1_frac", c.z->x1}, {"z2_frac", c.z->x2}};
  } else {
    j["z"] = nullptr;
  }
  return j;
}

void validate(const RunConfig& c) {
  (void)geometry_of(c);  // gamma and precision
  if (!(c.X >= 10) || !std::isfinite(c.X) || c.X > 1e8) {
    throw ConfigError("X must lie in [10, 1e8]");
  }
  if (c.mode != "torus" && c.mode != "dirichlet") {
    throw ConfigError("mode must be torus or dirichlet");
  }
  validate(CouplingConfig{c.phi, 1.0, c.tail_mode});
  if (!(c.eps > 0 && c.eps < 1)) throw ConfigError("eps must lie in (0, 1)");
  if (c.k_max < 0 || c.k_max > 64) throw ConfigError("k_max must lie in [0, 64]");
  if (c.cutoff < 0 || !std::isfinite(c.cutoff)) {
    throw ConfigError("cutoff must be non-negative");
  }
  if (c.threads < 0) throw ConfigError("threads must be non-negative");
  if (!(c.clumping_threshold > 0)) {
    throw ConfigError("clumping_threshold must be positive");
  }
  if (!(c.delta_eps > 0 && c.delta_eps < 1)) {
    throw ConfigError("delta_eps must lie in (0, 1)");
  }
  if (c.z) {
    validate(DirichletConfig{c.z->x1, c.z->x2, c.phi, 1.0, c.tail_mode});
  }
}

Point default_scatterer() {
  return {std::numbers::sqrt2 - 1.0, 1.0 / std::numbers::sqrt3};
}

int exit_code(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const ConfigError&) {
    return 2;
  } catch (const RangeError&) {
    return 2;
  } catch (const CapacityError&) {
    return 4;
  } catch (const Error&) {
    return 3;
  } catch (const nlohmann::json::exception&) {
    return 2;
  } catch (...) {
    return 1;
  }
}

// ---------------------------------------------------------------- scars

double scar_table_ceiling(double m_hi) {
  return std::max(2.0 * m_hi, default_mixed_cutoff(m_hi));
}

ScarExperiment run_scar_experiment(const NormTable& table,
                                   const ScarOptions& opt) {
  if (table.X() < scar_table_ceiling(opt.m_hi) * (1 - 1e-12)) {
    throw ConfigError("scar experiment needs a norm table up to " +
                      std::to_string(scar_table_ceiling(opt.m_hi)));
  }
  if (opt.k_max < 2) throw ConfigError("k_max must be at least 2");
  ScarExperiment ex;
  ex.tail_cutoff = 2.0 * opt.m_hi;
  const CouplingConfig cc{opt.phi, ex.tail_cutoff, opt.tail_mode};
  SolverOptions so;
  so.exec = opt.exec;
  const auto eigs = solve_new_eigenvalues(table, cc, {0.0, opt.m_hi}, so);
  ex.interlacing_failures = count_interlacing_failures(eigs);
  ex.max_residual = max_residual(eigs);

  ex.n0 = gap_filter_N0(table, opt.eps, opt.m_hi);
  ex.n1 = inverse_square_filter_N1(table.norms(), ex.n0, opt.eps,
                                   2.0 * opt.m_hi, opt.exec);
  ex.clumping = clumping_filter(eigs, table.size(), opt.clumping_threshold);
  ex.combined = intersect(ex.n1, ex.clumping, "N0 & N1 & clumping");

  std::vector<const NewEigenvalue*> chosen;
  for (const auto& e : eigs) {
    if (!e.is_ground() && e.m >= opt.m_lo) chosen.push_back(&e);
  }
  ex.rows.resize(chosen.size());
  static const ObservableIndex kMixed[4] = {
      {1, 0, 0}, {1, 0, 2}, {0, 1, 0}, {0, 1, 2}};

  auto one = [&](std::size_t r) {
    const NewEigenvalue& e = *chosen[r];
    const NormItem& item = table[e.index];
    ScarRow& row = ex.rows[r];
    row.index = e.index;
    row.m = e.m;
    row.theta = item.theta;
    row.lambda = e.lambda;
    row.gap = e.gap_to_m;
    const double cut = std::min(table.X(), default_mixed_cutoff(e.lambda));
    const GreenCoefficients gc = green_coefficients(e, table, cut);
    row.pure = pure_momentum_elements(gc, opt.k_max);
    for (int k = 2; k <= opt.k_max; k += 2) {
      row.even_deviation =
          std::max(row.even_deviation,
                   std::abs(row.pure[static_cast<std::size_t>(k)] -
                            predicted_scar_value(item, k)));
    }
    for (int k = 1; k <= opt.k_max; k += 2) {
      row.pure[static_cast<std::size_t>(k)] =
          pure_momentum_element(gc, k).value.real();
      row.odd_max = std::max(row.odd_max,
                             std::abs(row.pure[static_cast<std::size_t>(k)]));
    }
    std::fill(std::begin(row.mixed), std::end(row.mixed), kNaN);
    if (opt.mixed && e.m >= opt.mixed_lo) {
      const auto els = mixed_elements(gc, kMixed);
      for (int i = 0; i < 4; ++i) row.mixed[i] = std::abs(els[static_cast<std::size_t>(i)].value);
      row.mixed_truncation = els.front().truncation_bound;
    }
    row.in_n0 = ex.n0.keep[e.index];
    row.in_n1 = ex.n1.keep[e.index];
    row.in_clumping = ex.clumping.keep[e.index];
    row.kept = ex.combined.keep[e.index];
  };

  std::vector<std::exception_ptr> errors(chosen.size());
  auto guarded = [&](std::size_t r) {
    try {
      one(r);
    } catch (...) {
      errors[r] = std::current_exception();
    }
  };
  if (opt.exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::size_t r = 0; r < chosen.size(); ++r) guarded(r);
  } else {
    for (std::size_t r = 0; r < chosen.size(); ++r) guarded(r);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return ex;
}

nlohmann::json scar_summary(const ScarExperiment& ex, const ScarOptions& opt) {
  struct Bin {
    std::vector<double> dev_all, dev_kept, odd_kept;
    std::vector<double> mixed[4];
    std::size_t total = 0, kept = 0;
  };
  std::map<int, Bin> bins;
  for (const auto& r : ex.rows) {
    Bin& b = bins[decade_of(r.m)];
    ++b.total;
    b.dev_all.push_back(r.even_deviation);
    if (r.kept) {
      ++b.kept;
      b.dev_kept.push_back(r.even_deviation);
      b.odd_kept.push_back(r.odd_max);
    }
    for (int i = 0; i < 4; ++i) {
      if (!std::isnan(r.mixed[i])) b.mixed[i].push_back(r.mixed[i]);
    }
  }
  static const char* kMixedNames[4] = {"zeta10_k0", "zeta10_k2", "zeta01_k0",
                                       "zeta01_k2"};
  nlohmann::json decades = nlohmann::json::array();
  for (auto& [d, b] : bins) {
    nlohmann::json mixed;
    for (int i = 0; i < 4; ++i) mixed[kMixedNames[i]] = median_or_null(b.mixed[i]);
    decades.push_back({{"decade_lo", std::pow(10.0, d)},
                       {"decade_hi", std::pow(10.0, d + 1)},
                       {"count", b.total},
                       {"kept", b.kept},
                       {"median_deviation_all", median_or_null(b.dev_all)},
                       {"median_deviation_kept", median_or_null(b.dev_kept)},
                       {"median_odd_kept", median_or_null(b.odd_kept)},
                       {"median_mixed_abs", mixed}});
  }
  // Headline window [10^3, 10^4] and the mixed-mode decay across decades.
  std::vector<double> dev, odd;
  for (const auto& r : ex.rows) {
    if (r.kept && r.m >= 1e3 && r.m <= 1e4) {
      dev.push_back(r.even_deviation);
      odd.push_back(r.odd_max);
    }
  }
  nlohmann::json decay;
  if (bins.count(2) && bins.count(3)) {
    for (int i = 0; i < 4; ++i) {
      const auto& lo = bins[2].mixed[i];
      const auto& hi = bins[3].mixed[i];
      if (lo.empty() || hi.empty()) continue;
      const double a = median(lo), b = median(hi);
      decay[kMixedNames[i]] = {{"median_1e2_1e3", a},
                               {"median_1e3_1e4", b},
                               {"decreasing", b < a}};
    }
  }
  return {{"phi", opt.phi},
          {"eps", opt.eps},
          {"k_max", opt.k_max},
          {"clumping_threshold", opt.clumping_threshold},
          {"tail_cutoff", ex.tail_cutoff},
          {"interlacing_failures", ex.interlacing_failures},
          {"max_residual", ex.max_residual},
          {"filters",
           {{"N0_density", ex.n0.density},
            {"N1_density", ex.n1.density},
            {"clumping_density", ex.clumping.density},
            {"combined_density", ex.combined.density},
            {"combined_kept", ex.combined.kept}}},
          {"window_1e3_1e4",
           {{"count", dev.size()},
            {"median_even_deviation", median_or_null(dev)},
            {"median_odd_magnitude", median_or_null(odd)},
            {"deviation_target", 0.05},
            {"target_note",
             "the limit statement is asymptotic (o(1)); 0.05 is an "
             "implementation target, not a proven bound"}}},
          {"mixed_decay", decay},
          {"decades", decades}};
}

StrongCouplingCheck run_strong_coupling(const NormTable& table, double m_max,
                                        double D) {
  if (table.X() < 2 * m_max * (1 - 1e-12)) {
    throw ConfigError("strong coupling check needs a table up to 2 m_max");
  }
  const auto seq = strong_coupling_sequence(table, Midpoint{}, m_max);
  std::vector<double> masses(seq.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto& e = seq[i];
    const double cut = std::min(table.X(), default_mixed_cutoff(e.lambda));
    const auto gc = green_coefficients(e, table, cut);
    masses[i] = localized_mass(momentum_measure(gc), e.m, D);
  }
  const auto counts = neighbour_counts(table.norms(), table.X(), D);
  StrongCouplingCheck out;
  out.count = seq.size();
  std::size_t loc = 0, few = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (masses[i] >= 0.5) ++loc;
    if (counts[seq[i].index] - 1 <= 16) ++few;
  }
  if (!seq.empty()) {
    out.fraction_localized = static_cast<double>(loc) / seq.size();
    out.fraction_few_neighbours = static_cast<double>(few) / seq.size();
    out.median_mass = median(masses);
  }
  return out;
}

// ------------------------------------------------------------- dirichlet

double character_identity_error(const TorusGeometry& geometry, double X,
                                std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  const double a = geometry.a_d();
  const auto kmax = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::sqrt(X) * a));
  const auto lmax = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::sqrt(X) / a));
  std::uniform_int_distribution<std::int64_t> dk(1, kmax), dl(1, lmax);
  std::uniform_real_distribution<double> u1(0.0, 2 * std::numbers::pi * a);
  std::uniform_real_distribution<double> u2(0.0, 2 * std::numbers::pi / a);
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    const double xi1 = static_cast<double>(dk(rng)) / a;
    const double xi2 = static_cast<double>(dl(rng)) * a;
    const Point x{u1(rng), u2(rng)};
    const auto ce = character_expansion(xi1, xi2, x);
    worst = std::max({worst, std::abs(dirichlet_basis(xi1, xi2, x) - ce.real()),
                      std::abs(ce.imag())});
  }
  return worst;
}

DirichletExperiment run_dirichlet_experiment(const NormTable& table,
                                             const DirichletOptions& opt) {
  const double lam = 2.0 * opt.m_hi;
  if (table.X() < lam * (1 - 1e-12)) {
    throw ConfigError("rectangle experiment needs a norm table up to 2 m_hi");
  }
  if (opt.k_max < 2) throw ConfigError("k_max must be at least 2");
  const DirichletConfig cfg{opt.f1, opt.f2, opt.phi, lam, opt.tail_mode};
  DirichletExperiment ex;
  ex.weights = delta_weights(cfg, table);
  ex.lattice_constant = lattice_constant(table.geometry());
  SolverOptions so;
  so.exec = opt.exec;
  const auto eigs =
      dirichlet_secular_solve(cfg, table, ex.weights, {0.0, opt.m_hi}, so);
  ex.interlacing_failures = count_interlacing_failures(eigs);
  ex.max_residual = max_residual(eigs);

  // Gap filters over the delta-active norms, mapped back to table indices.
  std::vector<double> active;
  std::vector<std::size_t> where;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (ex.weights.delta[i] > 0) {
      active.push_back(table[i].n);
      where.push_back(i);
    }
  }
  FilterReport gaps;
  gaps.keep.assign(table.size(), false);
  gaps.considered.assign(table.size(), false);
  if (!active.empty()) {
    const auto n0 = gap_filter_N0(active, opt.gap_eps, opt.m_hi);
    const auto n1 =
        inverse_square_filter_N1(active, n0, opt.gap_eps, lam, opt.exec);
    for (std::size_t j = 0; j < active.size(); ++j) {
      gaps.considered[where[j]] = n1.considered[j];
      gaps.keep[where[j]] = n1.keep[j];
    }
    gaps.total = n1.total;
    gaps.kept = n1.kept;
  }
  const auto dq = delta_quantile_filter(table, ex.weights, opt.delta_eps, opt.m_hi);
  const auto clump = clumping_filter(eigs, table.size(), opt.clumping_threshold);
  ex.filter = intersect(intersect(gaps, dq, "gaps & delta"), clump,
                        "N0 & N1 & delta-quantile & clumping");

  ex.rows.resize(eigs.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t r = 0; r < eigs.size(); ++r) {
    const auto& e = eigs[r];
    const NormItem& item = table[e.index];
    DirichletRow& row = ex.rows[r];
    row.index = e.index;
    row.m = e.m;
    row.theta = item.theta;
    row.lambda = e.lambda;
    row.gap = e.gap_to_m;
    row.delta = ex.weights.delta[e.index];
    const double cut = std::min(table.X(), default_mixed_cutoff(e.lambda));
    const auto gc = dirichlet_green_coefficients(e, table, ex.weights, cut);
    row.pure = pure_momentum_elements(gc, opt.k_max);
    for (int k = 1; k <= opt.k_max; k += 2) {
      row.pure[static_cast<std::size_t>(k)] = pure_momentum_element(gc, k).value.real();
    }
    row.deviation2 = std::abs(row.pure[2] - predicted_scar_value(item, 2));
    row.kept = ex.filter.keep[e.index];
  }
  ex.character_error =
      character_identity_error(table.geometry(), opt.m_hi, opt.seed);
  ex.discrepancy = phase_discrepancy(cfg, table, std::min(1e4, table.X()));
  return ex;
}

nlohmann::json dirichlet_summary(const DirichletExperiment& ex) {
  std::vector<double> kept, all, odd;
  for (const auto& r : ex.rows) {
    all.push_back(r.deviation2);
    if (r.kept) {
      kept.push_back(r.deviation2);
      odd.push_back(std::abs(r.pure[1]));
    }
  }
  const auto& w = ex.weights;
  return {{"generic", w.generic},
          {"warnings", w.warnings},
          {"interior_norms", w.interior},
          {"active_norms", w.active},
          {"vanishing_norms", w.vanishing},
          {"fraction_vanishing",
           w.interior ? static_cast<double>(w.vanishing) / w.interior : 0.0},
          {"lattice_constant", ex.lattice_constant},
          {"eigenvalues", ex.rows.size()},
          {"interlacing_failures", ex.interlacing_failures},
          {"max_residual", ex.max_residual},
          {"character_identity_max_error", ex.character_error},
          {"phase_discrepancy", ex.discrepancy},
          {"filter_density", ex.filter.density},
          {"filter_kept", ex.filter.kept},
          {"median_k2_deviation_kept", median_or_null(kept)},
          {"median_k2_deviation_all", median_or_null(all)},
          {"median_k1_magnitude_kept", median_or_null(odd)},
          {"deviation_target", 0.08}};
}

// --------------------------------------------------------------- commands

CommandResult cmd_spectrum(const RunConfig& cfg) {
  prepare(cfg);
  const Manifest manifest(to_json(cfg));
  const auto geometry = geometry_of(cfg);
  const double lam = tail_cutoff(cfg, cfg.X);
  const NormTable table = make_table(geometry, std::max(cfg.X, lam), cfg);
  CommandResult res;
  nlohmann::json info = manifest.to_json();
  info["command"] = "spectrum";

  std::vector<NewEigenvalue> eigs;
  std::optional<DeltaWeights> weights;
  Point z{};
  if (cfg.mode == "torus") {
    eigs = solve_new_eigenvalues(table, {cfg.phi, lam, cfg.tail_mode},
                                 {0.0, cfg.X / 2});
  } else {
    const Point f = cfg.z.value_or(default_scatterer());
    const DirichletConfig dc{f.x1, f.x2, cfg.phi, lam, cfg.tail_mode};
    z = dc.z(geometry);
    weights = delta_weights(dc, table);
    res.warnings = weights->warnings;
    eigs = dirichlet_secular_solve(dc, table, *weights, {0.0, cfg.X / 2});
    info["generic"] = weights->generic;
    info["active_norms"] = weights->active;
    info["vanishing_norms"] = weights->vanishing;
  }

  {
    std::vector<std::string> head = {"k", "l", "n", "r", "theta"};
    if (weights) head.push_back("delta");
    CsvWriter csv(cfg.out / "norms.csv", manifest, head);
    for (std::size_t i = 0; i < table.size() && table[i].n <= cfg.X; ++i) {
      const auto& it = table[i];
      csv.cell(it.k).cell(it.l).cell(it.n).cell(it.r).cell(it.theta);
      if (weights) csv.cell(weights->delta[i]);
      csv.end_row();
    }
    res.files.push_back(cfg.out / "norms.csv");
  }
  {
    std::vector<std::string> head = {"index", "m", "lower", "lambda",
                                     "gap_to_m", "residual"};
    if (weights) {
      head.push_back("z1");
      head.push_back("z2");
    }
    CsvWriter csv(cfg.out / "eigenvalues.csv", manifest, head);
    for (const auto& e : eigs) {
      if (e.is_ground()) {
        info["ground_state"] = {{"lambda", e.lambda}, {"residual", e.residual}};
        continue;
      }
      csv.cell(e.index).cell(e.m).cell(e.lower).cell(e.lambda)
          .cell(e.gap_to_m).cell(e.residual);
      if (weights) csv.cell(z.x1).cell(z.x2);
      csv.end_row();
    }
    res.files.push_back(cfg.out / "eigenvalues.csv");
  }
  info["tail_cutoff"] = lam;
  info["norms_le_X"] = table.count_le(cfg.X);
  info["eigenvalue_rows"] = eigs.size() - (eigs.empty() || !eigs.front().is_ground() ? 0 : 1);
  info["interlacing_failures"] = count_interlacing_failures(eigs);
  info["max_residual"] = max_residual(eigs);
  info["warnings"] = res.warnings;
  write_json(cfg.out / "manifest.json", manifest, info);
  res.files.push_back(cfg.out / "manifest.json");
  return res;
}

CommandResult cmd_dirichlet(const RunConfig& cfg) {
  prepare(cfg);
  const Manifest manifest(to_json(cfg));
  const auto geometry = geometry_of(cfg);
  DirichletOptions opt;
  const Point f = cfg.z.value_or(default_scatterer());
  opt.f1 = f.x1;
  opt.f2 = f.x2;
  opt.phi = cfg.phi;
  opt.delta_eps = cfg.delta_eps;
  opt.gap_eps = cfg.eps;
  opt.clumping_threshold = cfg.clumping_threshold;
  opt.m_hi = cfg.X;
  opt.k_max = std::max(cfg.k_max, 2);
  opt.tail_mode = cfg.tail_mode;
  opt.seed = cfg.seed;
  const NormTable table = make_table(geometry, 2.0 * cfg.X, cfg);
  const auto ex = run_dirichlet_experiment(table, opt);
  const Point z = DirichletConfig{f.x1, f.x2, cfg.phi, 1.0, cfg.tail_mode}.z(geometry);

  CommandResult res;
  res.warnings = ex.weights.warnings;
  {
    std::vector<std::string> head = {"index", "m", "theta", "lambda", "gap",
                                     "delta", "z1", "z2"};
    for (int k = 0; k <= opt.k_max; ++k) head.push_back("elem_k" + std::to_string(k));
    head.push_back("deviation_k2");
    head.push_back("kept");
    CsvWriter csv(cfg.out / "dirichlet_scars.csv", manifest, head);
    for (const auto& r : ex.rows) {
      csv.cell(r.index).cell(r.m).cell(r.theta).cell(r.lambda).cell(r.gap)
          .cell(r.delta).cell(z.x1).cell(z.x2);
      for (double v : r.pure) csv.cell(v);
      csv.cell(r.deviation2).cell(r.kept);
      csv.end_row();
    }
    res.files.push_back(cfg.out / "dirichlet_scars.csv");
  }
  auto summary = dirichlet_summary(ex);
  summary["command"] = "dirichlet";
  summary["manifest"] = manifest.to_json();
  summary["z"] = {z.x1, z.x2};
  summary["z_fractions"] = {f.x1, f.x2};
  write_json(cfg.out / "dirichlet_summary.json", manifest, summary);
  res.files.push_back(cfg.out / "dirichlet_summary.json");
  return res;
}

CommandResult cmd_scars(const RunConfig& cfg) {
  if (cfg.mode == "dirichlet") return cmd_dirichlet(cfg);
  prepare(cfg);
  const Manifest manifest(to_json(cfg));
  const auto geometry = geometry_of(cfg);
  ScarOptions opt;
  opt.phi = cfg.phi;
  opt.eps = cfg.eps;
  opt.k_max = std::max(cfg.k_max, 2);
  opt.clumping_threshold = cfg.clumping_threshold;
  opt.m_hi = cfg.X;
  opt.tail_mode = cfg.tail_mode;
  const NormTable table = make_table(geometry, scar_table_ceiling(cfg.X), cfg);
  const auto ex = run_scar_experiment(table, opt);

  CommandResult res;
  {
    std::vector<std::string> head = {"index", "m", "theta", "lambda", "gap"};
    for (int k = 0; k <= opt.k_max; ++k) head.push_back("elem_k" + std::to_string(k));
    for (const char* h :
         {"even_deviation", "odd_max", "mixed_10_k0", "mixed_10_k2",
          "mixed_01_k0", "mixed_01_k2", "mixed_truncation", "in_N0", "in_N1",
          "in_clumping", "kept"}) {
      head.push_back(h);
    }
    CsvWriter csv(cfg.out / "scar_deviation.csv", manifest, head);
    for (const auto& r : ex.rows) {
      csv.cell(r.index).cell(r.m).cell(r.theta).cell(r.lambda).cell(r.gap);
      for (double v : r.pure) csv.cell(v);
      csv.cell(r.even_deviation).cell(r.odd_max);
      for (double v : r.mixed) csv.cell(v);
      csv.cell(r.mixed_truncation).cell(r.in_n0).cell(r.in_n1)
          .cell(r.in_clumping).cell(r.kept);
      csv.end_row();
    }
    res.files.push_back(cfg.out / "scar_deviation.csv");
  }
  auto summary = scar_summary(ex, opt);
  summary["command"] = "scars";
  summary["manifest"] = manifest.to_json();
  write_json(cfg.out / "scar_summary.json", manifest, summary);
  res.files.push_back(cfg.out / "scar_summary.json");
  return res;
}

CommandResult cmd_stats(const RunConfig& cfg) {
  prepare(cfg);
  const Manifest manifest(to_json(cfg));
  const auto geometry = geometry_of(cfg);
  const double X = cfg.X;
  const NormTable table = make_table(geometry, X + 4.0, cfg);
  const auto norms = table.norms();
  CommandResult res;
  const double pi = std::numbers::pi;
  const double weyl_ratio = static_cast<double>(weyl_count(table, X)) / X;

  {
    CsvWriter csv(cfg.out / "paircorr.csv", manifest,
                  {"b", "c", "X", "raw_count", "raw_normalized", "raw_target",
                   "raw_ratio", "distinct_count", "distinct_normalized",
                   "distinct_target", "distinct_ratio", "per_level",
                   "per_level_target", "weyl_ratio", "weyl_target"});
    for (Window w : {Window{0.25, 0.75}, Window{0.5, 1.5}, Window{1.0, 2.0},
                     Window{2.0, 4.0}}) {
      const auto raw = pair_correlation_raw(table, X, w);
      const auto dis = pair_correlation_distinct(table, X, w);
      const double len = w.c - w.b;
      csv.cell(w.b).cell(w.c).cell(X).cell(raw.count).cell(raw.normalized)
          .cell(pi * pi * len).cell(raw.normalized / (pi * pi * len))
          .cell(dis.count).cell(dis.normalized).cell(pi * pi / 16 * len)
          .cell(dis.normalized / (pi * pi / 16 * len)).cell(dis.per_level)
          .cell(pi / 4 * len).cell(weyl_ratio).cell(pi / 4);
      csv.end_row();
    }
    res.files.push_back(cfg.out / "paircorr.csv");
  }

  std::vector<double> Ts;
  for (double T = X; T >= 100 && Ts.size() < 3; T /= 10) Ts.insert(Ts.begin(), T);
  nlohmann::json short_intervals = nlohmann::json::array();
  {
    CsvWriter csv(cfg.out / "gaps.csv", manifest,
                  {"T", "G", "count", "bound", "ratio"});
    for (double T : Ts) {
      for (double G : {1.0, 2.0, 4.0, 8.0}) {
        const double cnt = static_cast<double>(gap_exceedance(norms, T, G));
        const double bound = 4.0 / pi * T / G;
        csv.cell(T).cell(G).cell(cnt).cell(bound).cell(cnt / bound);
        csv.end_row();
      }
      const auto rep = short_interval_counts(norms, T);
      short_intervals.push_back({{"T", T}, {"values", rep.values}});
    }
    res.files.push_back(cfg.out / "gaps.csv");
  }

  // Weak-coupling clumping below X/2 and the two gap filters.
  const auto eigs = solve_new_eigenvalues(table, {cfg.phi, X, cfg.tail_mode},
                                          {0.0, X / 2});
  const auto n0 = gap_filter_N0(table, cfg.eps, X / 2);
  const auto n1 = inverse_square_filter_N1(norms, n0, cfg.eps, X);
  const auto clump = clumping_stats(eigs);
  const auto clump_f = clumping_filter(eigs, table.size(), cfg.clumping_threshold);
  {
    CsvWriter csv(cfg.out / "clumping.csv", manifest,
                  {"index", "m", "lambda", "gap", "statistic", "in_N0", "in_N1",
                   "in_clumping"});
    for (std::size_t i = 0; i < eigs.size(); ++i) {
      const auto& e = eigs[i];
      if (e.is_ground()) continue;
      csv.cell(e.index).cell(e.m).cell(e.lambda).cell(e.gap_to_m)
          .cell(clump.statistic[i]).cell(static_cast<bool>(n0.keep[e.index]))
          .cell(static_cast<bool>(n1.keep[e.index]))
          .cell(static_cast<bool>(clump_f.keep[e.index]));
      csv.end_row();
    }
    res.files.push_back(cfg.out / "clumping.csv");
  }

  nlohmann::json far = nlohmann::json::array();
  for (double A : {3.0, 10.0, 30.0}) {
    const auto fc = far_pair_check(norms, std::min(X, 2e4), A);
    far.push_back({{"x", fc.x}, {"A", A}, {"sum", fc.sum},
                   {"fitted_constant", fc.fitted_constant}});
  }
  auto decade_json = [](const std::map<int, double>& m) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [d, v] : m) j["1e" + std::to_string(d)] = v;
    return j;
  };
  const double strong_max = std::min(X / 2, 1e4);
  const auto strong = run_strong_coupling(table, strong_max);
  nlohmann::json body = {
      {"command", "stats"},
      {"manifest", manifest.to_json()},
      {"weyl", {{"X", X}, {"count", weyl_count(table, X)}, {"ratio", weyl_ratio},
                {"target", pi / 4}}},
      {"mean_spacing", {{"value", mean_spacing(norms, X)}, {"target", 4 / pi}}},
      {"max_angle_gap", max_angle_gap(table, X)},
      {"short_intervals", short_intervals},
      {"far_pairs", far},
      {"filters",
       {{"eps", cfg.eps},
        {"N0_density", n0.density},
        {"N1_density", n1.density},
        {"N0_by_decade", decade_json(density_by_decade(norms, n0))},
        {"N1_by_decade", decade_json(density_by_decade(norms, n1))},
        {"clumping_density", clump_f.density},
        {"clumping_threshold", cfg.clumping_threshold}}},
      {"clumping", clump.report.values},
      {"strong_coupling",
       {{"m_max", strong_max},
        {"count", strong.count},
        {"fraction_localized_mass_ge_half", strong.fraction_localized},
        {"fraction_neighbours_le_16", strong.fraction_few_neighbours},
        {"median_localized_mass", strong.median_mass}}},
  };
  if (cfg.oracle) {
    const double Xo = std::min(X, 1e3);
    const auto checks = oracle::run_oracle_checks(geometry, Xo, cfg.phi, cfg.tail_mode);
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks) {
      arr.push_back({{"name", c.name}, {"pass", c.pass}, {"diff", c.diff},
                     {"library", c.library}, {"oracle", c.oracle}});
      if (!c.pass) res.ok = false;
    }
    body["oracle"] = {{"X", Xo}, {"all_pass", res.ok}, {"checks", arr}};
  }
  write_json(cfg.out / "lemma_checks.json", manifest, body);
  res.files.push_back(cfg.out / "lemma_checks.json");
  return res;
}

CommandResult cmd_oracle(const RunConfig& cfg) {
  prepare(cfg);
  if (cfg.X > 5e3) throw ConfigError("oracle runs are limited to X <= 5000");
  const Manifest manifest(to_json(cfg));
  const auto geometry = geometry_of(cfg);
  const auto checks =
      oracle::run_oracle_checks(geometry, cfg.X, cfg.phi, cfg.tail_mode);
  CommandResult res;
  CsvWriter csv(cfg.out / "oracle.csv", manifest,
                {"check", "exact", "library", "oracle", "diff", "pass"});
  for (const auto& c : checks) {
    csv.cell(c.name).cell(c.exact).cell(c.library).cell(c.oracle).cell(c.diff)
        .cell(c.pass);
    csv.end_row();
    if (!c.pass) {
      res.ok = false;
      res.warnings.push_back("oracle mismatch: " + c.name);
    }
  }
  res.files.push_back(cfg.out / "oracle.csv");
  return res;
}

}  // namespace pscat
