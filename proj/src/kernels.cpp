#include "pscat/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace pscat::kernels {

double pole_sum(std::span<const double> poles, std::span<const double> weights,
                const SpectralValue& x) {
  const double anchor = x.anchor;
  const double offset = x.offset;
  const double* p = poles.data();
  const double* w = weights.data();
  const std::size_t n = poles.size();
  // Four independent partial sums keep the dependency chain short.
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    s0 += w[j] / ((p[j] - anchor) - offset);
    s1 += w[j + 1] / ((p[j + 1] - anchor) - offset);
    s2 += w[j + 2] / ((p[j + 2] - anchor) - offset);
    s3 += w[j + 3] / ((p[j + 3] - anchor) - offset);
  }
  for (; j < n; ++j) s0 += w[j] / ((p[j] - anchor) - offset);
  return (s0 + s1) + (s2 + s3);
}

PoleSums pole_sums(std::span<const double> poles,
                   std::span<const double> weights, const SpectralValue& x) {
  PoleSums out;
  for (std::size_t j = 0; j < poles.size(); ++j) {
    const double inv = 1.0 / x.diff(poles[j]);
    out.first += weights[j] * inv;
    out.second += weights[j] * inv * inv;
  }
  return out;
}

namespace {

std::size_t count_le(std::span<const double> norms, double x) {
  return static_cast<std::size_t>(
      std::upper_bound(norms.begin(), norms.end(), x) - norms.begin());
}

}  // namespace

std::int64_t pair_count_serial(std::span<const double> norms,
                               std::span<const double> weights, double X,
                               double b, double c) {
  const std::size_t n = count_le(norms, X);
  std::int64_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = norms[i] - norms[j];
      if (d > b && d < c) {
        total += static_cast<std::int64_t>(weights[i]) *
                 static_cast<std::int64_t>(weights[j]);
      }
    }
  }
  return total;
}

std::int64_t pair_count_parallel(std::span<const double> norms,
                                 std::span<const double> weights, double X,
                                 double b, double c) {
  const std::size_t n = count_le(norms, X);
  std::vector<std::int64_t> prefix(n + 1, 0);
  for (std::size_t j = 0; j < n; ++j) {
    prefix[j + 1] = prefix[j] + static_cast<std::int64_t>(weights[j]);
  }
  const auto first = norms.begin();
  const auto last = norms.begin() + static_cast<std::ptrdiff_t>(n);
  std::int64_t total = 0;
#pragma omp parallel for schedule(static) reduction(+ : total)
  for (std::size_t i = 0; i < n; ++i) {
    const double ni = norms[i];
    // ni - n_j is non-increasing in j, also after rounding.
    const auto lo = std::partition_point(
        first, last, [&](double nj) { return ni - nj >= c; });
    const auto hi = std::partition_point(
        lo, last, [&](double nj) { return ni - nj > b; });
    const auto jl = static_cast<std::size_t>(lo - first);
    const auto jh = static_cast<std::size_t>(hi - first);
    std::int64_t s = prefix[jh] - prefix[jl];
    if (i >= jl && i < jh) s -= static_cast<std::int64_t>(weights[i]);
    total += static_cast<std::int64_t>(weights[i]) * s;
  }
  return total;
}

std::vector<double> inverse_square_sums_serial(
    std::span<const double> norms, std::span<const std::size_t> queries,
    double cap) {
  const std::size_t n = count_le(norms, cap);
  std::vector<double> out(queries.size(), 0.0);
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const double m = norms[queries[q]];
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == queries[q]) continue;
      const double d = norms[j] - m;
      s += 1.0 / (d * d);
    }
    out[q] = s;
  }
  return out;
}

std::vector<double> inverse_square_sums_parallel(
    std::span<const double> norms, std::span<const std::size_t> queries,
    double cap) {
  const std::size_t n = count_le(norms, cap);
  std::vector<double> out(queries.size(), 0.0);
  const double* p = norms.data();
#pragma omp parallel for schedule(dynamic, 64)
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const std::size_t self = queries[q];
    const double m = p[self];
    double s = 0.0;
    const std::size_t split = std::min(self, n);
    for (std::size_t j = 0; j < split; ++j) {
      const double d = p[j] - m;
      s += 1.0 / (d * d);
    }
    for (std::size_t j = self + 1; j < n; ++j) {
      const double d = p[j] - m;
      s += 1.0 / (d * d);
    }
    out[q] = s;
  }
  return out;
}

double far_pair_sum_serial(std::span<const double> norms, double x, double A) {
  const std::size_t n = count_le(norms, x);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = norms[i] - norms[j];
      if (std::abs(d) > A) total += 1.0 / (d * d);
    }
  }
  return total;
}

double far_pair_sum_parallel(std::span<const double> norms, double x,
                             double A) {
  const std::size_t n = count_le(norms, x);
  const double* p = norms.data();
  double total = 0.0;
#pragma omp parallel for schedule(dynamic, 256) reduction(+ : total)
  for (std::size_t i = 0; i < n; ++i) {
    const double ni = p[i];
    // First j > i with n_j - n_i > A; the pair sum is symmetric.
    const auto start = std::partition_point(
        norms.begin() + static_cast<std::ptrdiff_t>(i) + 1,
        norms.begin() + static_cast<std::ptrdiff_t>(n),
        [&](double nj) { return !(nj - ni > A); });
    double s = 0.0;
    for (std::size_t j = static_cast<std::size_t>(start - norms.begin()); j < n;
         ++j) {
      const double d = p[j] - ni;
      s += 1.0 / (d * d);
    }
    total += 2.0 * s;
  }
  return total;
}

std::vector<int> neighbour_counts_serial(std::span<const double> norms,
                                         double T, double D) {
  const std::size_t n = count_le(norms, T);
  std::vector<int> out(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(norms[j] - norms[i]) <= D) ++out[i];
    }
  }
  return out;
}

std::vector<int> neighbour_counts_parallel(std::span<const double> norms,
                                           double T, double D) {
  const std::size_t n = count_le(norms, T);
  std::vector<int> out(n, 0);
  const auto first = norms.begin();
  const auto last = norms.begin() + static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    const double ni = norms[i];
    const auto lo = std::partition_point(
        first, last, [&](double nj) { return std::abs(nj - ni) > D && nj < ni; });
    const auto hi = std::partition_point(
        lo, last, [&](double nj) { return !(nj > ni && std::abs(nj - ni) > D); });
    out[i] = static_cast<int>(hi - lo);
  }
  return out;
}

}  // namespace pscat::kernels
