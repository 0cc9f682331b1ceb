#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pscat/kernels.hpp"
#include "pscat/lattice.hpp"
#include "pscat/spectrum.hpp"

namespace pscat {

// Open window (b, c).
struct Window {
  double b = 0.0;
  double c = 0.0;
};

struct FilterReport {
  std::size_t total = 0;
  std::size_t kept = 0;
  double density = 0.0;
  std::string criterion;
  // Parallel to the evaluated table prefix; items outside the evaluated
  // range are false and do not count towards `total`.
  std::vector<bool> keep;
  std::vector<bool> considered;
};

struct WindowCount {
  Window window;
  std::int64_t count = 0;
  double normalized = 0.0;
};

struct StatReport {
  double X = 0.0;
  std::map<std::string, double> values;
  std::vector<WindowCount> windows;
};

struct PairCorrelation {
  std::int64_t count = 0;
  double normalized = 0.0;            // count / X
  double per_level = 0.0;             // count / |N(X)| (distinct variant)
};

// Multiplicity-weighted ordered pairs of eigenvalues <= X whose difference
// lies in (b, c); count / X tends to pi^2 (c - b).
PairCorrelation pair_correlation_raw(const NormTable& table, double X,
                                     Window w, Exec exec = Exec::parallel);
// Same over distinct norms; count / X tends to pi^2/16 (c - b) and
// count / |N(X)| to pi/4 (c - b).
PairCorrelation pair_correlation_distinct(const NormTable& table, double X,
                                          Window w,
                                          Exec exec = Exec::parallel);

// Mean nearest-neighbour spacing of the distinct norms <= X.
double mean_spacing(std::span<const double> norms, double X);

// Widest gap between consecutive angles theta_m (m <= X) on [0, pi/2],
// including the gaps to both ends of the interval.
double max_angle_gap(const NormTable& table, double X);

// G(m) = (log m)^(-1+eps)
double gap_threshold(double m, double eps);
// T(m) = (log m)^(2-eps)
double inverse_square_threshold(double m, double eps);

// N_0: norms 3 <= m <= m_max (with a right neighbour) whose gaps to both
// neighbours are at least G(m).
FilterReport gap_filter_N0(std::span<const double> norms, double eps,
                           double m_max = HUGE_VAL);
FilterReport gap_filter_N0(const NormTable& table, double eps,
                           double m_max = HUGE_VAL);

struct InverseSquareSum {
  double value = 0.0;
  double tail_bound = 0.0;  // bound on the dropped n > cap part
};

// F(m) = sum over n <= cap, n != m of 1/(n - m)^2. Requires cap >= 2m.
InverseSquareSum inverse_square_sum_F(std::span<const double> norms,
                                      std::size_t m_index, double cap);
InverseSquareSum inverse_square_sum_F(const NormTable& table,
                                      std::size_t m_index, double cap);
// F for every index in `indices`, with cap = 2 * max m.
std::vector<double> inverse_square_sums(std::span<const double> norms,
                                        std::span<const std::size_t> indices,
                                        double cap, Exec exec = Exec::parallel);

// N_1 inside N_0: F(m) <= T(m), with F capped at cap (>= 2 m_max).
FilterReport inverse_square_filter_N1(std::span<const double> norms,
                                      const FilterReport& n0, double eps,
                                      double cap, Exec exec = Exec::parallel);

// sum over ordered m != n <= x with |m - n| > A of 1/(m - n)^2, and the
// ratio sum * A / x (bounded by the lemma's implied constant).
struct FarPairCheck {
  double x = 0.0;
  double A = 0.0;
  double sum = 0.0;
  double fitted_constant = 0.0;
};
FarPairCheck far_pair_check(std::span<const double> norms, double x, double A,
                            Exec exec = Exec::parallel);

enum class ClumpingScale { loglog, custom };

// (m - lambda_m) log m / f(m) for each eigenvalue with m >= 3; f = log log m
// unless a custom scale is given.
struct ClumpingStats {
  std::vector<double> statistic;  // parallel to the input, NaN if m < 3
  StatReport report;
};
ClumpingStats clumping_stats(std::span<const NewEigenvalue> eigs,
                             ClumpingScale scale = ClumpingScale::loglog,
                             double (*custom)(double) = nullptr);

// N'' on the table index space: m is considered when it has an eigenvalue
// in `eigs` with m >= 3, and kept when its statistic is <= threshold.
FilterReport clumping_filter(std::span<const NewEigenvalue> eigs,
                             std::size_t table_size, double threshold = 1.0);

// M(k) = |{n : n in [k, k+1]}| for integer 0 <= k <= T.
std::vector<int> unit_interval_counts(std::span<const double> norms, double T);

// Sums of M(k) and M(k)^2, gap exceedance counts for G in {1,2,4,8} and
// neighbour-excess counts |{n : |N(T) cap [n-D, n+D]| > E+1}| for D = 3,
// E in {4,8,16}.
StatReport short_interval_counts(std::span<const double> norms, double T,
                                 Exec exec = Exec::parallel);

// Counts of consecutive gaps s_i = n_{i+1} - n_i > G among n_{i+1} <= T.
std::size_t gap_exceedance(std::span<const double> norms, double T, double G);

// Per-norm count of other norms within distance D (n <= T).
std::vector<int> neighbour_counts(std::span<const double> norms, double T,
                                  double D, Exec exec = Exec::parallel);

// Fraction kept per decade [10^j, 10^(j+1)) of the considered norms.
std::map<int, double> density_by_decade(std::span<const double> norms,
                                        const FilterReport& report);

FilterReport intersect(const FilterReport& a, const FilterReport& b,
                       std::string criterion);

double median(std::vector<double> values);

}  // namespace pscat
