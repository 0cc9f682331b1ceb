#include "pscat/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "pscat/errors.hpp"

namespace pscat {

namespace {

constexpr double kPi = std::numbers::pi;
// First-quadrant points per unit norm (pi/4) times the mean of delta
// (1/(4 pi^4)).
constexpr double kDeltaDensity = 1.0 / (16.0 * kPi * kPi * kPi);
// All lattice points per unit norm (pi) times the mean of delta.
constexpr double kWeightTailDensity = 1.0 / (4.0 * kPi * kPi * kPi);
constexpr double kLatticeConstantCutoff = 1e6;
constexpr double kVanishing = 1e-24;

// sin(2 pi j f) with the argument reduced mod 1 first.
double sin_turns(std::int64_t j, double f) {
  const double t = static_cast<double>(j) * f;
  return std::sin(2.0 * kPi * (t - std::floor(t)));
}

}  // namespace

Point DirichletConfig::z(const TorusGeometry& geometry) const {
  return {f1 * 2.0 * kPi * geometry.a_d(), f2 * 2.0 * kPi / geometry.a_d()};
}

void validate(const DirichletConfig& cfg) {
  if (!(cfg.f1 > 0 && cfg.f1 < 1 && cfg.f2 > 0 && cfg.f2 < 1)) {
    throw ConfigError("scatterer must lie strictly inside the rectangle");
  }
  validate(CouplingConfig{cfg.phi, cfg.tail_cutoff, cfg.tail_mode});
}

bool is_generic(const DirichletConfig& cfg) {
  const Real tol("1e-10");
  return !near_rational(Real(cfg.f1), 10'000, tol) &&
         !near_rational(Real(cfg.f2), 10'000, tol);
}

double dirichlet_basis(double xi1, double xi2, Point x) {
  return std::sin(xi1 * x.x1) * std::sin(xi2 * x.x2) / (kPi * kPi);
}

std::complex<double> character_expansion(double xi1, double xi2, Point x) {
  auto sgn = [](double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); };
  std::complex<double> s = 0.0;
  const double etas[4][2] = {{xi1, xi2}, {-xi1, -xi2}, {xi1, -xi2}, {-xi1, xi2}};
  for (const auto& e : etas) {
    s += sgn(e[0]) * sgn(e[1]) * std::polar(1.0, e[0] * x.x1 + e[1] * x.x2);
  }
  return -s / (4.0 * kPi * kPi);
}

DeltaWeights delta_weights(const DirichletConfig& cfg, const NormTable& table) {
  validate(cfg);
  DeltaWeights w;
  w.delta.assign(table.size(), 0.0);
  w.generic = is_generic(cfg);
  const double pi4 = kPi * kPi * kPi * kPi;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& it = table[i];
    if (it.k == 0 || it.l == 0) continue;
    ++w.interior;
    const double s1 = sin_turns(it.k, cfg.f1);
    const double s2 = sin_turns(it.l, cfg.f2);
    const double d = s1 * s1 * s2 * s2 / pi4;
    if (d < kVanishing) {
      ++w.vanishing;
      continue;
    }
    w.delta[i] = d;
    ++w.active;
  }
  if (!w.generic) {
    w.warnings.push_back(
        "scatterer position is non-generic (rational fraction of a side); "
        "some delta_n vanish or nearly vanish");
  }
  if (w.vanishing > 0) {
    w.warnings.push_back(std::to_string(w.vanishing) + " of " +
                         std::to_string(w.interior) +
                         " interior norms have delta_n = 0 and are old "
                         "eigenvalues");
  }
  return w;
}

double lattice_constant(const TorusGeometry& geometry) {
  static std::mutex mu;
  static std::map<std::string, double> cache;
  const std::string key = geometry.gamma_digits();
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const double L = kLatticeConstantCutoff;
  const double a2 = geometry.a2_d();
  const auto kmax = static_cast<std::int64_t>(std::sqrt(L * a2)) + 1;
  double s = 0.0;
  for (std::int64_t k = kmax; k >= 0; --k) {
    const double kk = static_cast<double>(k) * static_cast<double>(k) / a2;
    if (kk > L) continue;
    const auto lmax = static_cast<std::int64_t>(std::sqrt((L - kk) / a2)) + 1;
    double row = 0.0;
    for (std::int64_t l = lmax; l >= 0; --l) {
      const double n = kk + a2 * static_cast<double>(l) * static_cast<double>(l);
      if (n > L) continue;
      row += multiplicity(k, l) / (n * n + 1.0);
    }
    s += row;
  }
  s += kPi * (kPi / 2 - std::atan(L));
  std::lock_guard<std::mutex> lock(mu);
  cache[key] = s;
  return s;
}

SecularSystem dirichlet_secular_system(const DirichletConfig& cfg,
                                       const NormTable& table,
                                       const DeltaWeights& weights) {
  validate(cfg);
  if (cfg.tail_cutoff > table.X() * (1 + 1e-12)) {
    throw ConfigError("tail_cutoff exceeds norm table ceiling");
  }
  if (weights.delta.size() != table.size()) {
    throw ConfigError("delta weights were built for a different table");
  }
  const std::size_t n = table.count_le(cfg.tail_cutoff);
  std::vector<double> poles, w;
  std::vector<std::size_t> index;
  double regular = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = weights.delta[i];
    if (d <= 0) continue;
    poles.push_back(table[i].n);
    w.push_back(d);
    index.push_back(i);
    regular += d / (table[i].n + 1.0);
  }
  SecularSystem::Tail tail;
  tail.enabled = cfg.tail_mode == TailMode::integral_correction;
  tail.density = kDeltaDensity;
  // int_L^inf (1/(t-x) - 1/(t+1)) dt = log(L+1) - log(L-x)
  tail.constant = std::log(cfg.tail_cutoff + 1.0);
  const double rhs =
      std::tan(cfg.phi / 2) * lattice_constant(table.geometry());
  return SecularSystem(std::move(poles), std::move(w), std::move(index),
                       regular, cfg.tail_cutoff, tail, rhs);
}

std::vector<NewEigenvalue> dirichlet_secular_solve(
    const DirichletConfig& cfg, const NormTable& table,
    const DeltaWeights& weights, SolveRange range,
    const SolverOptions& options) {
  if (!(range.lo >= 0) || !(range.hi > range.lo) ||
      range.hi > 0.5 * table.X() * (1 + 1e-12)) {
    throw ConfigError("solve range must satisfy 0 <= lo < hi <= X/2");
  }
  if (cfg.tail_cutoff < 2 * range.hi * (1 - 1e-12)) {
    throw ConfigError("tail_cutoff must be at least twice the largest "
                      "eigenvalue sought");
  }
  const SecularSystem sys = dirichlet_secular_system(cfg, table, weights);
  SolverOptions opt = options;
  opt.include_ground = false;
  return solve_secular(sys, range, opt);
}

GreenCoefficients dirichlet_green_coefficients(const NewEigenvalue& eig,
                                               const NormTable& table,
                                               const DeltaWeights& weights,
                                               double cutoff) {
  if (cutoff > table.X() * (1 + 1e-12)) {
    throw ConfigError("green cutoff exceeds the norm table ceiling");
  }
  const SpectralValue lambda = eig.spectral_value();
  if (!(lambda.value() < 0.5 * cutoff)) {
    throw ConfigError("lambda must lie below cutoff/2");
  }
  GreenCoefficients gc;
  gc.lambda = lambda;
  gc.cutoff = cutoff;
  gc.a = table.geometry().a_d();
  gc.dirichlet = true;
  const std::size_t n = table.count_le(cutoff);
  gc.items = std::span<const NormItem>(table.items()).first(n);
  gc.weights.assign(n, 0.0);
  double best = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = weights.delta[i];
    if (d <= 0) continue;
    const double diff = lambda.diff(gc.items[i].n);
    if (std::abs(diff) < 1e-14 * std::max(1.0, gc.items[i].n)) {
      throw PoleError(lambda.value(), gc.items[i].n);
    }
    const double w = d * gc.items[i].r / (diff * diff);
    gc.weights[i] = w;
    gc.explicit_sum += w;
    if (w > best) {
      best = w;
      gc.dominant = i;
    }
  }
  gc.tail = kWeightTailDensity / (cutoff - lambda.value());
  gc.norm_sq = gc.explicit_sum + gc.tail;
  return gc;
}

MatrixElement dirichlet_pure_momentum_element(const NewEigenvalue& eig,
                                              const DeltaWeights& weights,
                                              const NormTable& table, int k,
                                              double cutoff) {
  return pure_momentum_element(
      dirichlet_green_coefficients(eig, table, weights, cutoff), k);
}

double phase_discrepancy(const DirichletConfig& cfg, const NormTable& table,
                         double X) {
  constexpr int kGrid = 64;
  std::vector<double> hist(kGrid * kGrid, 0.0);
  double total = 0.0;
  for (const auto& it : table) {
    if (it.n > X) break;
    if (it.k == 0 || it.l == 0) continue;
    const double u = static_cast<double>(it.k) * cfg.f1;
    const double v = static_cast<double>(it.l) * cfg.f2;
    const int i = std::min(kGrid - 1, static_cast<int>((u - std::floor(u)) * kGrid));
    const int j = std::min(kGrid - 1, static_cast<int>((v - std::floor(v)) * kGrid));
    hist[static_cast<std::size_t>(i * kGrid + j)] += 1.0;
    total += 1.0;
  }
  if (total == 0) return 1.0;
  // Cumulative counts over boxes [0, (i+1)/G) x [0, (j+1)/G).
  std::vector<double> cum(hist.size(), 0.0);
  double worst = 0.0;
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < kGrid; ++j) {
      double c = hist[static_cast<std::size_t>(i * kGrid + j)];
      if (i > 0) c += cum[static_cast<std::size_t>((i - 1) * kGrid + j)];
      if (j > 0) c += cum[static_cast<std::size_t>(i * kGrid + j - 1)];
      if (i > 0 && j > 0) c -= cum[static_cast<std::size_t>((i - 1) * kGrid + j - 1)];
      cum[static_cast<std::size_t>(i * kGrid + j)] = c;
      const double area = (i + 1.0) * (j + 1.0) / (kGrid * kGrid);
      worst = std::max(worst, std::abs(c / total - area));
    }
  }
  return worst;
}

FilterReport delta_quantile_filter(const NormTable& table,
                                   const DeltaWeights& weights, double eps,
                                   double m_max) {
  if (!(eps > 0 && eps < 1)) throw ConfigError("eps must lie in (0, 1)");
  FilterReport rep;
  rep.criterion = "delta_n >= eps-quantile of delta, eps=" + std::to_string(eps);
  rep.keep.assign(table.size(), false);
  rep.considered.assign(table.size(), false);
  std::vector<double> pool;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i].n > m_max) break;
    if (table[i].n < 3.0 || weights.delta[i] <= 0) continue;
    rep.considered[i] = true;
    pool.push_back(weights.delta[i]);
  }
  rep.total = pool.size();
  if (pool.empty()) return rep;
  std::sort(pool.begin(), pool.end());
  const double q =
      pool[static_cast<std::size_t>(eps * static_cast<double>(pool.size() - 1))];
  for (std::size_t i = 0; i < rep.considered.size(); ++i) {
    if (rep.considered[i] && weights.delta[i] >= q) {
      rep.keep[i] = true;
      ++rep.kept;
    }
  }
  rep.density = static_cast<double>(rep.kept) / static_cast<double>(rep.total);
  return rep;
}

}  // namespace pscat
