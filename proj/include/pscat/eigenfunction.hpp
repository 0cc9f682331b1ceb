#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pscat/kernels.hpp"
#include "pscat/lattice.hpp"
#include "pscat/spectrum.hpp"

namespace pscat {

// Norm-aggregated Fourier weights of the Green's function
// G_lambda(x) ~ sum_xi c(xi) e^{i<x - x0, xi>}, c(xi) = 1/(|xi|^2 - lambda).
// The global factor -1/(4 pi^2) and the x0 phases drop out of every
// normalised quantity and are not stored.
//
// `items` is a view into the NormTable the coefficients were built from and
// is valid only while that table is alive.
struct GreenCoefficients {
  SpectralValue lambda;
  double cutoff = 0.0;
  double a = 1.0;                   // lattice scale, xi = (k/a, l*a)
  std::span<const NormItem> items;  // items with n <= cutoff
  std::vector<double> weights;      // r(n) / (n - lambda)^2
  double explicit_sum = 0.0;        // sum of weights
  double tail = 0.0;                // pi / (cutoff - lambda)
  double norm_sq = 0.0;             // explicit_sum + tail (unnormalised)
  std::size_t dominant = 0;         // index of the largest weight
  // Set for the rectangle, where weights carry the delta factor and the
  // position-space coefficient grid is not available.
  bool dirichlet = false;
};

// Requires cutoff <= table.X and lambda < cutoff/2.
GreenCoefficients green_coefficients(const SpectralValue& lambda,
                                     const NormTable& table, double cutoff);
GreenCoefficients green_coefficients(double lambda, const NormTable& table,
                                     double cutoff);
GreenCoefficients green_coefficients(const NewEigenvalue& eig,
                                     const NormTable& table, double cutoff);

// Probability masses p_n proportional to r(n)/(n - lambda)^2 over the
// explicit range; each p_n sits on the four directions {+-theta_n, pi +- theta_n}.
struct MomentumMeasure {
  std::span<const NormItem> items;
  std::vector<double> masses;
  double total = 0.0;
};

MomentumMeasure momentum_measure(const GreenCoefficients& gc);

// sum of p_n over |n - m| <= D.
double localized_mass(const MomentumMeasure& mm, double m, double D);

// Index into mm.items of the `count` heaviest norms, heaviest first.
std::vector<std::size_t> top_masses(const MomentumMeasure& mm,
                                    std::size_t count);

}  // namespace pscat
