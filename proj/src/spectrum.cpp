#include "pscat/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <tuple>

#include "pscat/errors.hpp"

namespace pscat {

TailMode parse_tail_mode(const std::string& s) {
  if (s == "integral_correction" || s == "integral") {
    return TailMode::integral_correction;
  }
  if (s == "hard_truncate" || s == "hard") return TailMode::hard_truncate;
  throw ConfigError("unknown tail mode: " + s);
}

std::string to_string(TailMode mode) {
  return mode == TailMode::integral_correction ? "integral_correction"
                                               : "hard_truncate";
}

void validate(const CouplingConfig& cfg) {
  if (!std::isfinite(cfg.phi) ||
      std::abs(cfg.phi) >= std::numbers::pi - 1e-6) {
    throw ConfigError("phi must satisfy |phi| < pi - 1e-6 (phi = pi is the "
                      "unperturbed Laplacian)");
  }
  if (!(cfg.tail_cutoff > 0) || !std::isfinite(cfg.tail_cutoff)) {
    throw ConfigError("tail_cutoff must be positive and finite");
  }
}

SpectralValue NewEigenvalue::spectral_value() const {
  if (above_lower < gap_to_m) return {lower, above_lower};
  return {m, -gap_to_m};
}

SecularSystem::SecularSystem(std::vector<double> poles,
                             std::vector<double> weights,
                             std::vector<std::size_t> table_index,
                             double regular_sum, double cutoff, Tail tail,
                             double rhs)
    : poles_(std::move(poles)),
      weights_(std::move(weights)),
      table_index_(std::move(table_index)),
      regular_sum_(regular_sum),
      cutoff_(cutoff),
      tail_(tail),
      rhs_(rhs) {}

double SecularSystem::tail(double x) const {
  if (!tail_.enabled) return 0.0;
  return tail_.density * (tail_.constant - std::log(cutoff_ - x));
}

double SecularSystem::value(const SpectralValue& x) const {
  return kernels::pole_sum(poles_, weights_, x) - regular_sum_ +
         tail(x.value());
}

double SecularSystem::derivative(const SpectralValue& x) const {
  double d = kernels::pole_sums(poles_, weights_, x).second;
  if (tail_.enabled) d += tail_.density / (cutoff_ - x.value());
  return d;
}

std::pair<double, double> SecularSystem::residual_and_slope(
    const SpectralValue& x) const {
  const auto ps = kernels::pole_sums(poles_, weights_, x);
  double d = ps.second;
  if (tail_.enabled) d += tail_.density / (cutoff_ - x.value());
  return {ps.first - regular_sum_ + tail(x.value()) - rhs_, d};
}

namespace {

void check_table_covers(const NormTable& table, const CouplingConfig& cfg) {
  validate(cfg);
  if (cfg.tail_cutoff > table.X() * (1 + 1e-12)) {
    throw ConfigError("tail_cutoff " + std::to_string(cfg.tail_cutoff) +
                      " exceeds norm table ceiling " +
                      std::to_string(table.X()));
  }
}

void check_pole(const NormTable& table, const SpectralValue& x) {
  const auto norms = table.norms();
  const double v = x.value();
  auto it = std::lower_bound(norms.begin(), norms.end(), v);
  for (auto j : {it, it == norms.begin() ? it : it - 1}) {
    if (j == norms.end()) continue;
    if (std::abs(x.diff(*j)) < 1e-14 * std::max(1.0, *j)) {
      throw PoleError(v, *j);
    }
  }
}

// Weyl density of lattice points per unit norm: area(T^2) / 4 pi = pi.
constexpr double kTorusDensity = std::numbers::pi;

double torus_rhs_series(const NormTable& table, const CouplingConfig& cfg) {
  const std::size_t n = table.count_le(cfg.tail_cutoff);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = table[i].n;
    s += table[i].r / (v * v + 1.0);
  }
  if (cfg.tail_mode == TailMode::integral_correction) {
    s += kTorusDensity * (std::numbers::pi / 2 - std::atan(cfg.tail_cutoff));
  }
  return s;
}

}  // namespace

SecularSystem torus_secular_system(const NormTable& table,
                                   const CouplingConfig& cfg) {
  check_table_covers(table, cfg);
  const std::size_t n = table.count_le(cfg.tail_cutoff);
  std::vector<double> poles(n), weights(n);
  std::vector<std::size_t> index(n);
  double regular = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    poles[i] = table[i].n;
    weights[i] = table[i].r;
    index[i] = i;
    regular += table[i].r * poles[i] / (poles[i] * poles[i] + 1.0);
  }
  SecularSystem::Tail tail;
  tail.enabled = cfg.tail_mode == TailMode::integral_correction;
  tail.density = kTorusDensity;
  // pi * int_L^inf (1/(t-x) - t/(t^2+1)) dt = pi (log(L^2+1)/2 - log(L-x))
  tail.constant = 0.5 * std::log(cfg.tail_cutoff * cfg.tail_cutoff + 1.0);
  return SecularSystem(std::move(poles), std::move(weights), std::move(index),
                       regular, cfg.tail_cutoff, tail,
                       coupling_rhs(cfg, table));
}

double secular_lhs(const SpectralValue& lambda, const NormTable& table,
                   const CouplingConfig& cfg) {
  check_table_covers(table, cfg);
  check_pole(table, lambda);
  const std::size_t n = table.count_le(cfg.tail_cutoff);
  const auto norms = table.norms().first(n);
  const auto r = table.multiplicities().first(n);
  double regular = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    regular += r[i] * norms[i] / (norms[i] * norms[i] + 1.0);
  }
  double s = kernels::pole_sum(norms, r, lambda) - regular;
  if (cfg.tail_mode == TailMode::integral_correction) {
    s += kTorusDensity *
         (0.5 * std::log(cfg.tail_cutoff * cfg.tail_cutoff + 1.0) -
          std::log(cfg.tail_cutoff - lambda.value()));
  }
  return s;
}

double secular_lhs(double lambda, const NormTable& table,
                   const CouplingConfig& cfg) {
  return secular_lhs(SpectralValue{lambda, 0.0}, table, cfg);
}

double secular_derivative(const SpectralValue& lambda, const NormTable& table,
                          const CouplingConfig& cfg) {
  check_table_covers(table, cfg);
  check_pole(table, lambda);
  const std::size_t n = table.count_le(cfg.tail_cutoff);
  double d = kernels::pole_sums(table.norms().first(n),
                                table.multiplicities().first(n), lambda)
                 .second;
  if (cfg.tail_mode == TailMode::integral_correction) {
    d += kTorusDensity / (cfg.tail_cutoff - lambda.value());
  }
  return d;
}

double coupling_rhs(const CouplingConfig& cfg, const NormTable& table) {
  check_table_covers(table, cfg);
  return std::tan(cfg.phi / 2) * torus_rhs_series(table, cfg);
}

namespace {

struct Root {
  SpectralValue x;
  double residual;
};

// Newton polish in the anchored offset, kept inside [off_lo, off_hi].
Root polish(const SecularSystem& sys, SpectralValue x, double off_lo,
            double off_hi, int steps) {
  auto [f, d] = sys.residual_and_slope(x);
  for (int s = 0; s < steps; ++s) {
    if (!(d > 0) || f == 0.0) break;
    const double next = x.offset - f / d;
    if (!(next > off_lo && next < off_hi)) break;
    const SpectralValue y{x.anchor, next};
    const auto [fy, dy] = sys.residual_and_slope(y);
    if (std::abs(fy) > std::abs(f)) break;
    x = y;
    f = fy;
    d = dy;
  }
  return {x, std::abs(f)};
}

// Root in (lower, upper) where the secular function runs from -inf to +inf.
Root solve_interval(const SecularSystem& sys, double lower, double upper,
                    const SolverOptions& opt) {
  const double c = sys.rhs();
  const double g = upper - lower;
  auto at = [&](double u) -> SpectralValue {
    return u <= 0.5 * g ? SpectralValue{lower, u}
                        : SpectralValue{upper, -(g - u)};
  };
  auto f = [&](double u) { return sys.value(at(u)) - c; };
  const double floor_delta = 1e-15 * std::max(1.0, upper);

  double a = 0.25 * g;
  double b = 0.75 * g;
  double fa = f(a);
  if (fa >= 0) {
    b = a;
    double delta = a;
    do {
      delta /= 16;
      if (delta < floor_delta) throw BracketError(lower, upper);
      a = delta;
      fa = f(a);
      if (fa >= 0) b = a;
    } while (fa >= 0);
  } else {
    double fb = f(b);
    if (fb <= 0) {
      a = b;
      double delta = g - b;
      do {
        delta /= 16;
        if (delta < floor_delta) throw BracketError(lower, upper);
        b = g - delta;
        fb = f(b);
        if (fb <= 0) a = b;
      } while (fb <= 0);
    }
  }

  // Safeguarded Newton: a Newton step when it stays inside the bracket
  // and shrinks fast enough, bisection otherwise. Stops once the step is
  // small relative to the distance from the nearer endpoint.
  auto eval = [&](double u) { return sys.residual_and_slope(at(u)); };
  double u = 0.5 * (a + b);
  auto [fu, du] = eval(u);
  double step_old = b - a, step = step_old;
  for (int it = 0; it < 200 && fu != 0.0; ++it) {
    if (fu < 0) {
      a = u;
    } else {
      b = u;
    }
    const bool newton = du > 0 && ((u - b) * du - fu) * ((u - a) * du - fu) < 0 &&
                        std::abs(2.0 * fu) <= std::abs(step_old * du);
    step_old = step;
    const double prev = u;
    if (newton) {
      step = fu / du;
      u -= step;
    } else {
      step = 0.5 * (b - a);
      u = a + step;
    }
    if (u <= a || u >= b) {
      // The step fell below the spacing of doubles around the bracket.
      u = prev;
      break;
    }
    const double dist = std::min(u, g - u);
    if (std::abs(step) <= opt.bisection_rtol * dist ||
        b - a <= opt.bisection_rtol * dist) {
      break;
    }
    std::tie(fu, du) = eval(u);
  }
  if (u <= 0.5 * g) {
    return polish(sys, {lower, u}, a, b, opt.newton_steps);
  }
  return polish(sys, {upper, -(g - u)}, -(g - a), -(g - b),
                opt.newton_steps);
}

// Root below the first pole, where the function rises from -inf to +inf.
Root solve_ground(const SecularSystem& sys, double pole,
                  const SolverOptions& opt) {
  const double c = sys.rhs();
  auto f = [&](double off) { return sys.value({pole, off}) - c; };
  const double scale = std::max(1.0, std::abs(pole));
  double b = -1e-3 * scale;
  while (f(b) <= 0) {
    b /= 16;
    if (-b < 1e-15 * scale) throw BracketError(-HUGE_VAL, pole);
  }
  double a = -scale;
  while (f(a) >= 0) {
    b = a;
    a *= 2;
    if (pole + a <= -0.5 * sys.cutoff() || -a > 1e15) {
      throw BracketError(-HUGE_VAL, pole);
    }
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    if (b - a <= opt.bisection_rtol * std::abs(mid)) break;
    if (f(mid) < 0) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return polish(sys, {pole, 0.5 * (a + b)}, a, b, opt.newton_steps);
}

NewEigenvalue make_eigenvalue(const SecularSystem& sys, std::size_t hi_pole,
                              const Root& root) {
  NewEigenvalue e;
  e.m = sys.poles()[hi_pole];
  e.index = sys.table_index(hi_pole);
  e.residual = root.residual;
  if (hi_pole == 0) {
    e.gap_to_m = -root.x.offset;
    e.lambda = root.x.value();
    return e;
  }
  e.lower = sys.poles()[hi_pole - 1];
  const double g = e.m - e.lower;
  if (root.x.anchor == e.m) {
    e.gap_to_m = -root.x.offset;
    e.above_lower = g - e.gap_to_m;
  } else {
    e.above_lower = root.x.offset;
    e.gap_to_m = g - e.above_lower;
  }
  e.lambda = root.x.value();
  return e;
}

}  // namespace

std::vector<NewEigenvalue> solve_secular(const SecularSystem& sys,
                                         SolveRange range,
                                         const SolverOptions& options) {
  const auto poles = sys.poles();
  if (poles.empty()) return {};
  // Right endpoints to solve for: pole index j means interval (p_{j-1}, p_j).
  std::vector<std::size_t> targets;
  if (options.include_ground && range.lo <= poles[0] && poles[0] <= range.hi) {
    targets.push_back(0);
  }
  for (std::size_t j = 1; j < poles.size(); ++j) {
    if (poles[j] > range.hi) break;
    if (poles[j - 1] >= range.lo) targets.push_back(j);
  }
  std::vector<NewEigenvalue> out(targets.size());
  std::vector<std::exception_ptr> errors(targets.size());
  auto solve_one = [&](std::size_t t) {
    try {
      const std::size_t j = targets[t];
      const Root root = j == 0 ? solve_ground(sys, poles[0], options)
                               : solve_interval(sys, poles[j - 1], poles[j],
                                                options);
      out[t] = make_eigenvalue(sys, j, root);
    } catch (...) {
      errors[t] = std::current_exception();
    }
  };
  if (options.exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (std::size_t t = 0; t < targets.size(); ++t) solve_one(t);
  } else {
    for (std::size_t t = 0; t < targets.size(); ++t) solve_one(t);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<NewEigenvalue> solve_new_eigenvalues(const NormTable& table,
                                                 const CouplingConfig& cfg,
                                                 SolveRange range,
                                                 const SolverOptions& options) {
  check_table_covers(table, cfg);
  if (!(range.lo >= 0) || !(range.hi > range.lo) ||
      range.hi > 0.5 * table.X() * (1 + 1e-12)) {
    throw ConfigError("solve range must satisfy 0 <= lo < hi <= X/2");
  }
  if (cfg.tail_cutoff < 2 * range.hi * (1 - 1e-12)) {
    throw ConfigError("tail_cutoff must be at least twice the largest "
                      "eigenvalue sought");
  }
  const SecularSystem sys = torus_secular_system(table, cfg);
  return solve_secular(sys, range, options);
}

std::vector<NewEigenvalue> strong_coupling_sequence(
    const NormTable& table, const StrongCouplingStrategy& strategy,
    double m_max) {
  std::size_t count = 0;
  while (count + 1 < table.size() && table[count + 1].n <= m_max) ++count;

  std::vector<NewEigenvalue> out;
  out.reserve(count);
  auto base = [&](std::size_t i) {
    NewEigenvalue e;
    e.lower = table[i].n;
    e.m = table[i + 1].n;
    e.index = i + 1;
    return e;
  };

  if (std::holds_alternative<Midpoint>(strategy)) {
    for (std::size_t i = 0; i < count; ++i) {
      NewEigenvalue e = base(i);
      const double g = e.m - e.lower;
      e.gap_to_m = 0.5 * g;
      e.above_lower = g - e.gap_to_m;
      e.lambda = e.lower + e.above_lower;
      out.push_back(e);
    }
  } else if (const auto* fixed = std::get_if<FixedOffset>(&strategy)) {
    double min_gap = HUGE_VAL;
    for (std::size_t i = 0; i < count; ++i) {
      min_gap = std::min(min_gap, table[i + 1].n - table[i].n);
    }
    if (!(fixed->c > 0) || !(fixed->c < min_gap)) {
      throw ConfigError("fixed offset must lie in (0, min gap = " +
                        std::to_string(min_gap) + ")");
    }
    for (std::size_t i = 0; i < count; ++i) {
      NewEigenvalue e = base(i);
      e.gap_to_m = fixed->c;
      e.above_lower = (e.m - e.lower) - fixed->c;
      e.lambda = e.m - fixed->c;
      out.push_back(e);
    }
  } else {
    const auto& list = std::get<CustomList>(strategy).lambdas;
    const std::size_t n = std::min(count, list.size());
    for (std::size_t i = 0; i < n; ++i) {
      NewEigenvalue e = base(i);
      e.lambda = list[i];
      if (!(e.lower < e.lambda && e.lambda < e.m)) {
        throw InterlacingError(i, "lambda=" + std::to_string(e.lambda) +
                                      " not inside (" +
                                      std::to_string(e.lower) + ", " +
                                      std::to_string(e.m) + ")");
      }
      e.gap_to_m = e.m - e.lambda;
      e.above_lower = e.lambda - e.lower;
      out.push_back(e);
    }
  }
  return out;
}

std::size_t first_interlacing_violation(std::span<const NewEigenvalue> eigs) {
  for (std::size_t i = 0; i < eigs.size(); ++i) {
    const auto& e = eigs[i];
    const bool ok = e.lambda < e.m && e.gap_to_m > 0 &&
                    (e.is_ground() || (e.lower < e.lambda && e.above_lower > 0));
    if (!ok) return i;
  }
  return eigs.size();
}

}  // namespace pscat
