#include "pscat/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "pscat/errors.hpp"
#include "pscat/statistics.hpp"

namespace pscat::oracle {

std::vector<LatticePoint> lattice_points(const TorusGeometry& geometry,
                                         double X) {
  const double a = geometry.a_d();
  const auto imax = static_cast<std::int64_t>(std::sqrt(X) * a) + 2;
  const auto jmax = static_cast<std::int64_t>(std::sqrt(X) / a) + 2;
  const Real Xr(X);
  std::vector<LatticePoint> pts;
  for (std::int64_t i = -imax; i <= imax; ++i) {
    for (std::int64_t j = -jmax; j <= jmax; ++j) {
      Real n = geometry.norm_hp(i, j);
      if (n > Xr) continue;
      pts.push_back({i, j, n, static_cast<double>(n)});
    }
  }
  return pts;
}

std::vector<DistinctNorm> distinct_norms(const TorusGeometry& geometry,
                                         double X) {
  auto pts = lattice_points(geometry, X);
  std::sort(pts.begin(), pts.end(),
            [](const LatticePoint& p, const LatticePoint& q) {
              return p.n_hp < q.n_hp;
            });
  const Real tol("1e-30");
  std::vector<DistinctNorm> out;
  for (const auto& p : pts) {
    if (!out.empty() && p.n_hp - out.back().n_hp < tol) {
      ++out.back().r;
    } else {
      out.push_back({p.n_hp, p.n, 1});
    }
  }
  return out;
}

std::vector<double> norm_values(const std::vector<DistinctNorm>& norms) {
  std::vector<double> v;
  v.reserve(norms.size());
  for (const auto& d : norms) v.push_back(d.n);
  return v;
}

std::int64_t pair_count_points(const TorusGeometry& geometry, double X,
                               double b, double c) {
  const auto pts = lattice_points(geometry, X);
  std::int64_t count = 0;
  for (const auto& p : pts) {
    for (const auto& q : pts) {
      const double d = p.n - q.n;
      if (d > b && d < c) ++count;
    }
  }
  return count;
}

std::int64_t pair_count_distinct(const std::vector<double>& norms, double X,
                                 double b, double c) {
  std::int64_t count = 0;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    if (norms[i] > X) continue;
    for (std::size_t j = 0; j < norms.size(); ++j) {
      if (i == j || norms[j] > X) continue;
      const double d = norms[i] - norms[j];
      if (d > b && d < c) ++count;
    }
  }
  return count;
}

std::size_t gap_count(const std::vector<double>& norms, double T, double G) {
  std::size_t count = 0;
  for (std::size_t i = 1; i < norms.size(); ++i) {
    if (norms[i] > T) break;
    if (norms[i] - norms[i - 1] > G) ++count;
  }
  return count;
}

std::vector<int> unit_interval_counts(const std::vector<double>& norms,
                                      double T) {
  const auto K = static_cast<int>(std::floor(T));
  std::vector<int> M(static_cast<std::size_t>(K) + 1, 0);
  for (int k = 0; k <= K; ++k) {
    for (double n : norms) {
      if (n >= k && n <= k + 1.0) ++M[static_cast<std::size_t>(k)];
    }
  }
  return M;
}

double inverse_square_F(const std::vector<double>& norms, std::size_t m_index,
                        double cap) {
  double s = 0.0;
  for (std::size_t j = 0; j < norms.size(); ++j) {
    if (j == m_index || norms[j] > cap) continue;
    const double d = norms[j] - norms[m_index];
    s += 1.0 / (d * d);
  }
  return s;
}

std::vector<int> neighbour_counts(const std::vector<double>& norms, double T,
                                  double D) {
  std::vector<int> out;
  for (double m : norms) {
    if (m > T) break;
    int c = 0;
    for (double n : norms) {
      if (n <= T && std::abs(n - m) <= D) ++c;
    }
    out.push_back(c);
  }
  return out;
}

double far_pair_sum(const std::vector<double>& norms, double x, double A) {
  double s = 0.0;
  for (double m : norms) {
    if (m > x) continue;
    for (double n : norms) {
      if (n > x) continue;
      const double d = m - n;
      if (std::abs(d) > A) s += 1.0 / (d * d);
    }
  }
  return s;
}

long double secular_value(const std::vector<LatticePoint>& points,
                          long double lambda, double cutoff, TailMode mode) {
  long double s = 0.0L;
  for (const auto& p : points) {
    if (p.n > cutoff) continue;
    const long double n = static_cast<long double>(p.n_hp);
    s += 1.0L / (n - lambda) - n / (n * n + 1.0L);
  }
  if (mode == TailMode::integral_correction) {
    const long double L = cutoff;
    s += std::numbers::pi_v<long double> *
         (0.5L * std::log(L * L + 1.0L) - std::log(L - lambda));
  }
  return s;
}

long double coupling_rhs(const std::vector<LatticePoint>& points, double phi,
                         double cutoff, TailMode mode) {
  long double s = 0.0L;
  for (const auto& p : points) {
    if (p.n > cutoff) continue;
    const long double n = static_cast<long double>(p.n_hp);
    s += 1.0L / (n * n + 1.0L);
  }
  if (mode == TailMode::integral_correction) {
    const long double pi = std::numbers::pi_v<long double>;
    s += pi * (pi / 2 - std::atan(static_cast<long double>(cutoff)));
  }
  return std::tan(static_cast<long double>(phi) / 2) * s;
}

namespace {

template <class F>
long double bisect(F&& f, long double lo, long double hi) {
  for (int it = 0; it < 200; ++it) {
    const long double mid = 0.5L * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5L * (lo + hi);
}

}  // namespace

std::vector<double> first_eigenvalues(const TorusGeometry& geometry,
                                      double phi, double cutoff,
                                      std::size_t count, TailMode mode,
                                      int grid) {
  const auto pts = lattice_points(geometry, cutoff);
  const auto poles = norm_values(distinct_norms(geometry, cutoff));
  const long double c = coupling_rhs(pts, phi, cutoff, mode);
  auto f = [&](long double x) { return secular_value(pts, x, cutoff, mode) - c; };

  std::vector<double> out;
  if (count == 0 || poles.empty()) return out;
  // Below the lowest norm: step down until the function is negative.
  long double lo = poles[0] - 1.0L;
  while (f(lo) >= 0) {
    lo = poles[0] - 2.0L * (poles[0] - lo);
    if (lo < -0.5L * cutoff) throw BracketError(-HUGE_VAL, poles[0]);
  }
  long double hi = poles[0];
  for (int k = 1; k <= grid; ++k) {
    const long double x = poles[0] - (poles[0] - lo) * k / (grid + 1.0L);
    if (f(x) >= 0) hi = x;
  }
  out.push_back(static_cast<double>(bisect(f, lo, hi)));

  for (std::size_t j = 1; j < poles.size() && out.size() < count; ++j) {
    const long double p0 = poles[j - 1], p1 = poles[j];
    long double a = p0, b = p1;
    long double prev = p0;
    for (int k = 1; k <= grid; ++k) {
      const long double x = p0 + (p1 - p0) * k / (grid + 1.0L);
      if (f(x) >= 0) {
        a = prev;
        b = x;
        break;
      }
      prev = x;
      a = x;
    }
    out.push_back(static_cast<double>(bisect(f, a, b)));
  }
  return out;
}

std::complex<double> pure_element(const TorusGeometry& geometry,
                                  const std::vector<LatticePoint>& points,
                                  const SpectralValue& lambda, double cutoff,
                                  int k) {
  const double a = geometry.a_d();
  std::complex<double> num = 0.0;
  double den = 0.0;
  for (const auto& p : points) {
    if (p.n > cutoff) continue;
    const double d = lambda.diff(p.n);
    const double w = 1.0 / (d * d);
    den += w;
    if (p.i == 0 && p.j == 0) {
      if (k % 2 == 0) num += w;
      continue;
    }
    const double ang = std::atan2(static_cast<double>(p.j) * a,
                                  static_cast<double>(p.i) / a);
    num += w * std::polar(1.0, k * ang);
  }
  const double tail = std::numbers::pi / (cutoff - lambda.value());
  if (k == 0) num += tail;
  return num / (den + tail);
}

std::complex<double> mixed_element(const TorusGeometry& geometry,
                                   const std::vector<LatticePoint>& points,
                                   const SpectralValue& lambda, double cutoff,
                                   const ObservableIndex& index, Point x0) {
  const double a = geometry.a_d();
  std::map<std::pair<std::int64_t, std::int64_t>, double> coeff;
  double den = 0.0;
  for (const auto& p : points) {
    if (p.n > cutoff) continue;
    const double c = 1.0 / lambda.diff(p.n);
    coeff[{p.i, p.j}] = c;
    den += c * c;
  }
  den += std::numbers::pi / (cutoff - lambda.value());
  std::complex<double> num = 0.0;
  for (const auto& [eta, c_eta] : coeff) {
    auto it = coeff.find({eta.first + index.p, eta.second + index.q});
    if (it == coeff.end()) continue;
    std::complex<double> u = 1.0;
    if (eta.first != 0 || eta.second != 0) {
      const double ang = std::atan2(static_cast<double>(eta.second) * a,
                                    static_cast<double>(eta.first) / a);
      u = std::polar(1.0, index.k * ang);
    }
    num += c_eta * it->second * u;
  }
  const double phase = x0.x1 * static_cast<double>(index.p) / a +
                       x0.x2 * static_cast<double>(index.q) * a;
  return std::polar(1.0, phase) * num / den;
}

namespace {

OracleCheck exact_check(std::string name, double lib, double ref) {
  OracleCheck c;
  c.name = std::move(name);
  c.exact = true;
  c.library = lib;
  c.oracle = ref;
  c.diff = std::abs(lib - ref);
  c.pass = lib == ref;
  return c;
}

OracleCheck real_check(std::string name, double diff, double tol = 1e-6) {
  OracleCheck c;
  c.name = std::move(name);
  c.diff = diff;
  c.pass = diff <= tol;
  return c;
}

}  // namespace

std::vector<OracleCheck> run_oracle_checks(const TorusGeometry& geometry,
                                           double X, double phi,
                                           TailMode mode,
                                           std::size_t eig_count) {
  std::vector<OracleCheck> out;
  const NormTable table = build_norm_table(geometry, X + 2.0);
  const auto ref = distinct_norms(geometry, X + 2.0);
  const auto ref_n = norm_values(ref);
  const auto norms = table.norms();

  out.push_back(exact_check("norm_count", static_cast<double>(table.size()),
                            static_cast<double>(ref.size())));
  {
    double worst = 0.0;
    bool mult_ok = table.size() == ref.size();
    for (std::size_t i = 0; mult_ok && i < ref.size(); ++i) {
      worst = std::max(worst, std::abs(norms[i] - ref_n[i]));
      if (table[i].r != ref[i].r) mult_ok = false;
    }
    out.push_back(real_check("norm_values", mult_ok ? worst : HUGE_VAL, 1e-9));
  }
  out.push_back(exact_check("weyl_count",
                            static_cast<double>(weyl_count(table, X)),
                            static_cast<double>(std::count_if(
                                ref_n.begin(), ref_n.end(),
                                [&](double n) { return n <= X; }))));

  for (Window w : {Window{0.5, 1.5}, Window{1.0, 2.0}, Window{-2.0, -0.25}}) {
    const std::string tag =
        "(" + std::to_string(w.b) + "," + std::to_string(w.c) + ")";
    const auto rp = pair_count_points(geometry, X, w.b, w.c);
    const auto dp = pair_count_distinct(ref_n, X, w.b, w.c);
    for (Exec e : {Exec::serial, Exec::parallel}) {
      const std::string ex = e == Exec::serial ? "serial" : "parallel";
      out.push_back(exact_check(
          "pair_raw" + tag + "_" + ex,
          static_cast<double>(pair_correlation_raw(table, X, w, e).count),
          static_cast<double>(rp)));
      out.push_back(exact_check(
          "pair_distinct" + tag + "_" + ex,
          static_cast<double>(pair_correlation_distinct(table, X, w, e).count),
          static_cast<double>(dp)));
    }
  }

  for (double G : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    out.push_back(exact_check(
        "gaps_above_" + std::to_string(G),
        static_cast<double>(gap_exceedance(norms, X, G)),
        static_cast<double>(gap_count(ref_n, X, G))));
  }

  {
    const auto M = pscat::unit_interval_counts(norms, X);
    const auto Mr = unit_interval_counts(ref_n, X);
    double s1 = 0, s2 = 0, r1 = 0, r2 = 0;
    for (int v : M) {
      s1 += v;
      s2 += double(v) * v;
    }
    for (int v : Mr) {
      r1 += v;
      r2 += double(v) * v;
    }
    out.push_back(exact_check("sum_M", s1, r1));
    out.push_back(exact_check("sum_M2", s2, r2));
  }

  for (Exec e : {Exec::serial, Exec::parallel}) {
    const auto nc = pscat::neighbour_counts(norms, X, 3.0, e);
    const auto rc = neighbour_counts(ref_n, X, 3.0);
    double mism = nc.size() == rc.size() ? 0.0 : 1.0;
    for (std::size_t i = 0; mism == 0.0 && i < nc.size(); ++i) {
      if (nc[i] != rc[i]) mism += 1.0;
    }
    out.push_back(exact_check(
        std::string("neighbour_counts_D3_") +
            (e == Exec::serial ? "serial" : "parallel"),
        mism, 0.0));
  }

  {
    // F(m) for every m in [3, X/2] with cap X.
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < ref_n.size(); ++i) {
      if (ref_n[i] >= 3 && ref_n[i] <= X / 2) idx.push_back(i);
    }
    for (Exec e : {Exec::serial, Exec::parallel}) {
      const auto F = inverse_square_sums(norms, idx, X, e);
      double worst = 0.0;
      for (std::size_t q = 0; q < idx.size(); ++q) {
        const double r = inverse_square_F(ref_n, idx[q], X);
        worst = std::max(worst, std::abs(F[q] - r) / std::max(1.0, std::abs(r)));
      }
      out.push_back(real_check(
          std::string("F_values_") + (e == Exec::serial ? "serial" : "parallel"),
          worst));
    }
    const double lib = far_pair_check(norms, X, 3.0, Exec::parallel).sum;
    const double rf = far_pair_sum(ref_n, X, 3.0);
    out.push_back(real_check("far_pair_sum_A3",
                             std::abs(lib - rf) / std::max(1.0, std::abs(rf))));
  }

  if (eig_count > 0) {
    CouplingConfig cc{phi, X, mode};
    const auto eigs = solve_new_eigenvalues(table, cc, {0.0, X / 2});
    const auto refe = first_eigenvalues(geometry, phi, X, eig_count, mode);
    double worst = eigs.size() >= eig_count ? 0.0 : HUGE_VAL;
    for (std::size_t i = 0; i < std::min(eig_count, eigs.size()); ++i) {
      worst = std::max(worst, std::abs(eigs[i].lambda - refe[i]));
    }
    auto c = real_check("first_" + std::to_string(eig_count) + "_eigenvalues",
                        worst);
    c.library = eigs.empty() ? 0.0 : eigs.front().lambda;
    c.oracle = refe.empty() ? 0.0 : refe.front();
    out.push_back(c);
  }
  return out;
}

}  // namespace pscat::oracle
