#pragma once

// Hot loops of the toolkit. Each data-parallel kernel comes as a pair: a
// plain serial reference that is easy to read and audit, and an OpenMP
// version that is the production path. Tests require the two to agree and
// bench/ times them against each other.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pscat {

enum class Exec { serial, parallel };

// A real number close to a pole, stored as anchor + offset. Differences
// n - value are formed as (n - anchor) - offset so they keep full relative
// precision when the value sits within rounding distance of the anchor.
struct SpectralValue {
  double anchor = 0.0;
  double offset = 0.0;

  double value() const { return anchor + offset; }
  double diff(double n) const { return (n - anchor) - offset; }
};

namespace kernels {

// sum_j w_j / (p_j - x)
double pole_sum(std::span<const double> poles, std::span<const double> weights,
                const SpectralValue& x);

struct PoleSums {
  double first = 0.0;   // sum w / (p - x)
  double second = 0.0;  // sum w / (p - x)^2
};
PoleSums pole_sums(std::span<const double> poles,
                   std::span<const double> weights, const SpectralValue& x);

// Weighted ordered-pair count: sum of w_i w_j over i != j with
// norms[i], norms[j] <= X and norms[i] - norms[j] in the open window (b, c).
// norms must be sorted ascending. Pairs with i == j never count since the
// window is required to exclude 0.
std::int64_t pair_count_serial(std::span<const double> norms,
                               std::span<const double> weights, double X,
                               double b, double c);
std::int64_t pair_count_parallel(std::span<const double> norms,
                                 std::span<const double> weights, double X,
                                 double b, double c);

// For each query index q: sum over j != q with norms[j] <= cap of
// 1 / (norms[j] - norms[q])^2.
std::vector<double> inverse_square_sums_serial(
    std::span<const double> norms, std::span<const std::size_t> queries,
    double cap);
std::vector<double> inverse_square_sums_parallel(
    std::span<const double> norms, std::span<const std::size_t> queries,
    double cap);

// sum over ordered pairs m != n, both <= x, |m - n| > A of 1/(m - n)^2.
double far_pair_sum_serial(std::span<const double> norms, double x, double A);
double far_pair_sum_parallel(std::span<const double> norms, double x,
                             double A);

// For each i with norms[i] <= T: |{ j : norms[j] <= T, |norms[j]-norms[i]| <= D }|
// (including i itself).
std::vector<int> neighbour_counts_serial(std::span<const double> norms,
                                         double T, double D);
std::vector<int> neighbour_counts_parallel(std::span<const double> norms,
                                           double T, double D);

}  // namespace kernels
}  // namespace pscat
