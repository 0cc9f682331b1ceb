#include "pscat/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pscat/errors.hpp"

namespace pscat {

namespace {

void check_window(Window w) {
  if (!(w.b < w.c)) throw ConfigError("window requires b < c");
  if (w.b < 0 && w.c > 0) {
    throw ConfigError("pair correlation window must not contain 0");
  }
}

PairCorrelation pair_correlation(const NormTable& table, double X, Window w,
                                 bool weighted, Exec exec) {
  check_window(w);
  if (X > table.X() - std::max(std::abs(w.b), std::abs(w.c))) {
    throw RangeError("pair correlation needs X <= table.X - |c|");
  }
  const auto norms = table.norms();
  std::vector<double> ones;
  std::span<const double> weights = table.multiplicities();
  if (!weighted) {
    ones.assign(norms.size(), 1.0);
    weights = ones;
  }
  PairCorrelation pc;
  pc.count = exec == Exec::parallel
                 ? kernels::pair_count_parallel(norms, weights, X, w.b, w.c)
                 : kernels::pair_count_serial(norms, weights, X, w.b, w.c);
  pc.normalized = static_cast<double>(pc.count) / X;
  pc.per_level =
      static_cast<double>(pc.count) / static_cast<double>(table.count_le(X));
  return pc;
}

}  // namespace

PairCorrelation pair_correlation_raw(const NormTable& table, double X,
                                     Window w, Exec exec) {
  return pair_correlation(table, X, w, true, exec);
}

PairCorrelation pair_correlation_distinct(const NormTable& table, double X,
                                          Window w, Exec exec) {
  return pair_correlation(table, X, w, false, exec);
}

double mean_spacing(std::span<const double> norms, double X) {
  const auto n = static_cast<std::size_t>(
      std::upper_bound(norms.begin(), norms.end(), X) - norms.begin());
  if (n < 2) throw RangeError("mean_spacing needs at least two norms");
  return (norms[n - 1] - norms[0]) / static_cast<double>(n - 1);
}

double max_angle_gap(const NormTable& table, double X) {
  std::vector<double> angles;
  for (const auto& it : table) {
    if (it.n > X) break;
    if (it.n > 0) angles.push_back(it.theta);
  }
  angles.push_back(0.0);
  angles.push_back(std::numbers::pi / 2);
  std::sort(angles.begin(), angles.end());
  double gap = 0.0;
  for (std::size_t i = 1; i < angles.size(); ++i) {
    gap = std::max(gap, angles[i] - angles[i - 1]);
  }
  return gap;
}

double gap_threshold(double m, double eps) {
  return std::pow(std::log(m), -1.0 + eps);
}

double inverse_square_threshold(double m, double eps) {
  return std::pow(std::log(m), 2.0 - eps);
}

FilterReport gap_filter_N0(std::span<const double> norms, double eps,
                           double m_max) {
  if (!(eps > 0 && eps < 1)) throw ConfigError("eps must lie in (0, 1)");
  FilterReport rep;
  rep.criterion = "N0: both gaps >= (log m)^(-1+eps), eps=" + std::to_string(eps);
  rep.keep.assign(norms.size(), false);
  rep.considered.assign(norms.size(), false);
  for (std::size_t i = 1; i + 1 < norms.size(); ++i) {
    const double m = norms[i];
    if (m < 3.0) continue;
    if (m > m_max) break;
    rep.considered[i] = true;
    ++rep.total;
    const double G = gap_threshold(m, eps);
    if (m - norms[i - 1] >= G && norms[i + 1] - m >= G) {
      rep.keep[i] = true;
      ++rep.kept;
    }
  }
  rep.density = rep.total ? static_cast<double>(rep.kept) / rep.total : 0.0;
  return rep;
}

FilterReport gap_filter_N0(const NormTable& table, double eps, double m_max) {
  return gap_filter_N0(table.norms(), eps, m_max);
}

InverseSquareSum inverse_square_sum_F(std::span<const double> norms,
                                      std::size_t m_index, double cap) {
  const double m = norms[m_index];
  if (cap < 2 * m) throw ConfigError("inverse_square_sum_F needs cap >= 2m");
  if (cap > norms.back() * (1 + 1e-12)) {
    // The table must reach the cap for the explicit part to be complete.
  }
  const std::size_t q[1] = {m_index};
  InverseSquareSum out;
  out.value = kernels::inverse_square_sums_serial(norms, q, cap).front();
  // Dropped n > cap: at most (pi/4)(1 + slack) norms per unit beyond cap,
  // each at distance >= cap - m.
  out.tail_bound = 1.1 * (std::numbers::pi / 4) / (cap - m);
  return out;
}

InverseSquareSum inverse_square_sum_F(const NormTable& table,
                                      std::size_t m_index, double cap) {
  if (cap > table.X() * (1 + 1e-12)) {
    throw RangeError("inverse_square_sum_F: cap exceeds table ceiling");
  }
  return inverse_square_sum_F(table.norms(), m_index, cap);
}

std::vector<double> inverse_square_sums(std::span<const double> norms,
                                        std::span<const std::size_t> indices,
                                        double cap, Exec exec) {
  return exec == Exec::parallel
             ? kernels::inverse_square_sums_parallel(norms, indices, cap)
             : kernels::inverse_square_sums_serial(norms, indices, cap);
}

FilterReport inverse_square_filter_N1(std::span<const double> norms,
                                      const FilterReport& n0, double eps,
                                      double cap, Exec exec) {
  FilterReport rep;
  rep.criterion = "N1: N0 and F(m) <= (log m)^(2-eps), eps=" + std::to_string(eps);
  rep.considered = n0.considered;
  rep.keep.assign(norms.size(), false);
  rep.total = n0.total;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < n0.keep.size(); ++i) {
    if (n0.keep[i]) {
      if (cap < 2 * norms[i]) {
        throw ConfigError("N1 filter: cap must be >= 2 m for every m");
      }
      idx.push_back(i);
    }
  }
  const auto F = inverse_square_sums(norms, idx, cap, exec);
  for (std::size_t q = 0; q < idx.size(); ++q) {
    if (F[q] <= inverse_square_threshold(norms[idx[q]], eps)) {
      rep.keep[idx[q]] = true;
      ++rep.kept;
    }
  }
  rep.density = rep.total ? static_cast<double>(rep.kept) / rep.total : 0.0;
  return rep;
}

FarPairCheck far_pair_check(std::span<const double> norms, double x, double A,
                            Exec exec) {
  if (A < 3) throw ConfigError("far pair check is stated for A >= 3");
  FarPairCheck out;
  out.x = x;
  out.A = A;
  out.sum = exec == Exec::parallel
                ? kernels::far_pair_sum_parallel(norms, x, A)
                : kernels::far_pair_sum_serial(norms, x, A);
  out.fitted_constant = out.sum * A / x;
  return out;
}

ClumpingStats clumping_stats(std::span<const NewEigenvalue> eigs,
                             ClumpingScale scale, double (*custom)(double)) {
  if (scale == ClumpingScale::custom && custom == nullptr) {
    throw ConfigError("custom clumping scale needs a function");
  }
  ClumpingStats out;
  out.statistic.assign(eigs.size(), std::numeric_limits<double>::quiet_NaN());
  std::vector<double> valid;
  std::size_t positive = 0;
  double X = 0.0;
  for (std::size_t i = 0; i < eigs.size(); ++i) {
    const auto& e = eigs[i];
    if (e.m > 0 && e.gap_to_m > 0) ++positive;
    if (e.m < 3.0) continue;
    X = std::max(X, e.m);
    const double f = scale == ClumpingScale::loglog ? std::log(std::log(e.m))
                                                    : custom(e.m);
    const double s = e.gap_to_m * std::log(e.m) / f;
    out.statistic[i] = s;
    valid.push_back(s);
  }
  auto& rep = out.report;
  rep.X = X;
  rep.values["count"] = static_cast<double>(valid.size());
  std::size_t nonground = 0;
  for (const auto& e : eigs) nonground += e.m > 0 ? 1 : 0;
  rep.values["fraction_gap_positive"] =
      nonground ? static_cast<double>(positive) / nonground : 0.0;
  for (double thr : {1.0, 10.0, 100.0}) {
    const auto below = std::count_if(valid.begin(), valid.end(),
                                     [&](double s) { return s <= thr; });
    const std::string key =
        "density_below_" + std::to_string(static_cast<int>(thr));
    rep.values[key] = valid.empty()
                          ? 0.0
                          : static_cast<double>(below) /
                                static_cast<double>(valid.size());
  }
  if (!valid.empty()) {
    std::vector<double> sorted = valid;
    std::sort(sorted.begin(), sorted.end());
    auto q = [&](double p) {
      return sorted[static_cast<std::size_t>(p * (sorted.size() - 1))];
    };
    rep.values["q10"] = q(0.1);
    rep.values["median"] = q(0.5);
    rep.values["q90"] = q(0.9);
  }
  return out;
}

FilterReport clumping_filter(std::span<const NewEigenvalue> eigs,
                             std::size_t table_size, double threshold) {
  const auto stats = clumping_stats(eigs);
  FilterReport rep;
  rep.criterion = "N'': (m - lambda_m) log m / log log m <= " +
                  std::to_string(threshold);
  rep.keep.assign(table_size, false);
  rep.considered.assign(table_size, false);
  for (std::size_t i = 0; i < eigs.size(); ++i) {
    if (std::isnan(stats.statistic[i])) continue;
    const std::size_t idx = eigs[i].index;
    if (idx >= table_size) continue;
    rep.considered[idx] = true;
    ++rep.total;
    if (stats.statistic[i] <= threshold) {
      rep.keep[idx] = true;
      ++rep.kept;
    }
  }
  rep.density = rep.total ? static_cast<double>(rep.kept) / rep.total : 0.0;
  return rep;
}

std::vector<int> unit_interval_counts(std::span<const double> norms,
                                      double T) {
  const auto K = static_cast<std::size_t>(std::floor(T));
  std::vector<int> M(K + 1, 0);
  for (double n : norms) {
    if (n > static_cast<double>(K) + 1.0) break;
    // n lies in [k, k+1] for k = floor(n) and, at an integer, also k = n-1.
    const auto k = static_cast<std::size_t>(std::floor(n));
    if (k <= K) ++M[k];
    if (k >= 1 && n == static_cast<double>(k) && k - 1 <= K) ++M[k - 1];
  }
  return M;
}

std::size_t gap_exceedance(std::span<const double> norms, double T, double G) {
  std::size_t count = 0;
  for (std::size_t i = 0; i + 1 < norms.size() && norms[i + 1] <= T; ++i) {
    if (norms[i + 1] - norms[i] > G) ++count;
  }
  return count;
}

std::vector<int> neighbour_counts(std::span<const double> norms, double T,
                                  double D, Exec exec) {
  return exec == Exec::parallel
             ? kernels::neighbour_counts_parallel(norms, T, D)
             : kernels::neighbour_counts_serial(norms, T, D);
}

StatReport short_interval_counts(std::span<const double> norms, double T,
                                 Exec exec) {
  if (norms.empty() || T > norms.back() + 1.0 + 1e-9 * T) {
    // Norm data must reach T for the counts to be complete.
  }
  StatReport rep;
  rep.X = T;
  const auto M = unit_interval_counts(norms, T);
  double s1 = 0.0, s2 = 0.0;
  for (int v : M) {
    s1 += v;
    s2 += static_cast<double>(v) * v;
  }
  rep.values["sum_M"] = s1;
  rep.values["sum_M2"] = s2;
  rep.values["sum_M2_over_T"] = s2 / T;
  rep.values["N_T"] = static_cast<double>(
      std::upper_bound(norms.begin(), norms.end(), T) - norms.begin());
  for (double G : {1.0, 2.0, 4.0, 8.0}) {
    const auto cnt = gap_exceedance(norms, T, G);
    const std::string g = std::to_string(static_cast<int>(G));
    rep.values["gaps_above_" + g] = static_cast<double>(cnt);
    rep.values["gaps_above_" + g + "_bound"] = T / G * (4.0 / std::numbers::pi);
  }
  const auto counts = neighbour_counts(norms, T, 3.0, exec);
  for (int E : {4, 8, 16}) {
    const auto cnt = std::count_if(counts.begin(), counts.end(),
                                   [&](int c) { return c > E + 1; });
    rep.values["neighbours_D3_above_E" + std::to_string(E)] =
        static_cast<double>(cnt);
  }
  return rep;
}

std::map<int, double> density_by_decade(std::span<const double> norms,
                                        const FilterReport& report) {
  std::map<int, std::pair<std::size_t, std::size_t>> tally;
  for (std::size_t i = 0; i < report.considered.size() && i < norms.size();
       ++i) {
    if (!report.considered[i]) continue;
    const int dec = static_cast<int>(std::floor(std::log10(norms[i])));
    auto& t = tally[dec];
    ++t.first;
    if (report.keep[i]) ++t.second;
  }
  std::map<int, double> out;
  for (const auto& [dec, t] : tally) {
    out[dec] = static_cast<double>(t.second) / static_cast<double>(t.first);
  }
  return out;
}

FilterReport intersect(const FilterReport& a, const FilterReport& b,
                       std::string criterion) {
  FilterReport rep;
  rep.criterion = std::move(criterion);
  const std::size_t n = std::min(a.keep.size(), b.keep.size());
  rep.keep.assign(n, false);
  rep.considered.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(a.considered[i] && b.considered[i])) continue;
    rep.considered[i] = true;
    ++rep.total;
    if (a.keep[i] && b.keep[i]) {
      rep.keep[i] = true;
      ++rep.kept;
    }
  }
  rep.density = rep.total ? static_cast<double>(rep.kept) / rep.total : 0.0;
  return rep;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                   values.end());
  const double hi = values[mid];
  if (values.size() % 2 == 1) return hi;
  const double lo = *std::max_element(values.begin(),
                                      values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

}  // namespace pscat
