#include "pscat/eigenfunction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "pscat/errors.hpp"

namespace pscat {

GreenCoefficients green_coefficients(const SpectralValue& lambda,
                                     const NormTable& table, double cutoff) {
  if (cutoff > table.X() * (1 + 1e-12)) {
    throw ConfigError("green cutoff exceeds the norm table ceiling");
  }
  if (!(lambda.value() < 0.5 * cutoff)) {
    throw ConfigError("lambda must lie below cutoff/2");
  }
  GreenCoefficients gc;
  gc.lambda = lambda;
  gc.cutoff = cutoff;
  gc.a = table.geometry().a_d();
  const std::size_t n = table.count_le(cutoff);
  gc.items = std::span<const NormItem>(table.items()).first(n);
  gc.weights.resize(n);
  double best = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = lambda.diff(gc.items[i].n);
    if (std::abs(d) < 1e-14 * std::max(1.0, gc.items[i].n)) {
      throw PoleError(lambda.value(), gc.items[i].n);
    }
    const double w = gc.items[i].r / (d * d);
    gc.weights[i] = w;
    gc.explicit_sum += w;
    if (w > best) {
      best = w;
      gc.dominant = i;
    }
  }
  // int_cutoff^inf pi dt / (t - lambda)^2
  gc.tail = std::numbers::pi / (cutoff - lambda.value());
  gc.norm_sq = gc.explicit_sum + gc.tail;
  return gc;
}

GreenCoefficients green_coefficients(double lambda, const NormTable& table,
                                     double cutoff) {
  return green_coefficients(SpectralValue{lambda, 0.0}, table, cutoff);
}

GreenCoefficients green_coefficients(const NewEigenvalue& eig,
                                     const NormTable& table, double cutoff) {
  return green_coefficients(eig.spectral_value(), table, cutoff);
}

MomentumMeasure momentum_measure(const GreenCoefficients& gc) {
  MomentumMeasure mm;
  mm.items = gc.items;
  mm.masses.resize(gc.weights.size());
  const double inv = 1.0 / gc.explicit_sum;
  for (std::size_t i = 0; i < gc.weights.size(); ++i) {
    mm.masses[i] = gc.weights[i] * inv;
  }
  mm.total = std::accumulate(mm.masses.begin(), mm.masses.end(), 0.0);
  return mm;
}

double localized_mass(const MomentumMeasure& mm, double m, double D) {
  if (!(D > 0)) throw ConfigError("localized_mass: D must be positive");
  auto lo = std::lower_bound(
      mm.items.begin(), mm.items.end(), m - D,
      [](const NormItem& it, double v) { return it.n < v; });
  double s = 0.0;
  for (auto it = lo; it != mm.items.end() && it->n <= m + D; ++it) {
    s += mm.masses[static_cast<std::size_t>(it - mm.items.begin())];
  }
  return s;
}

std::vector<std::size_t> top_masses(const MomentumMeasure& mm,
                                    std::size_t count) {
  std::vector<std::size_t> idx(mm.masses.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  count = std::min(count, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(count),
                    idx.end(), [&](std::size_t a, std::size_t b) {
                      if (mm.masses[a] != mm.masses[b]) {
                        return mm.masses[a] > mm.masses[b];
                      }
                      return a < b;
                    });
  idx.resize(count);
  return idx;
}

}  // namespace pscat
