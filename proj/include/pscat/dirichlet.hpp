#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "pscat/eigenfunction.hpp"
#include "pscat/lattice.hpp"
#include "pscat/observables.hpp"
#include "pscat/spectrum.hpp"
#include "pscat/statistics.hpp"

namespace pscat {

// Rectangle [0, 2 pi a] x [0, 2 pi / a] with Dirichlet walls and a
// scatterer at z = (f1 * 2 pi a, f2 * 2 pi / a). The eigenbasis is indexed by
// the same dual lattice as the torus, restricted to k, l >= 1.
struct DirichletConfig {
  double f1 = 0.0;  // scatterer position as fractions of the side lengths
  double f2 = 0.0;
  double phi = 0.0;
  double tail_cutoff = 0.0;
  TailMode tail_mode = TailMode::integral_correction;

  Point z(const TorusGeometry& geometry) const;
};

// Throws ConfigError unless 0 < f1, f2 < 1 and the coupling is valid.
void validate(const DirichletConfig& cfg);

// True iff neither fraction lies within 1e-10 of a rational with
// denominator <= 10^4. delta_n > 0 for every n exactly when both are
// irrational.
bool is_generic(const DirichletConfig& cfg);

// psi_xi(x) = sin(xi1 x1) sin(xi2 x2) / pi^2
double dirichlet_basis(double xi1, double xi2, Point x);
// -(1/4 pi^2) sum over eta in {xi, -xi, xibar, -xibar} of
// sgn(eta1) sgn(eta2) e^{i<eta, x>}
std::complex<double> character_expansion(double xi1, double xi2, Point x);

struct DeltaWeights {
  std::vector<double> delta;  // per table item; 0 off the open quadrant
  std::size_t active = 0;     // items with delta > 0
  std::size_t interior = 0;   // items with k, l >= 1
  std::size_t vanishing = 0;  // interior items with delta below 1e-24
  bool generic = true;
  std::vector<std::string> warnings;
};

// delta_n = |psi_{xi(n)}(z)|^2 = sin^2(2 pi k f1) sin^2(2 pi l f2) / pi^4.
DeltaWeights delta_weights(const DirichletConfig& cfg, const NormTable& table);

// sum over the whole lattice of 1/(|xi|^4 + 1), summed directly up to
// norm 10^6 plus the integral tail. Cached per geometry.
double lattice_constant(const TorusGeometry& geometry);

SecularSystem dirichlet_secular_system(const DirichletConfig& cfg,
                                       const NormTable& table,
                                       const DeltaWeights& weights);

// Roots in every interval between consecutive delta-active norms inside
// range. The root below the first active norm is not sought.
std::vector<NewEigenvalue> dirichlet_secular_solve(
    const DirichletConfig& cfg, const NormTable& table,
    const DeltaWeights& weights, SolveRange range,
    const SolverOptions& options = {});

// Coefficients with weights delta_n r(n)/(n - lambda)^2; usable with
// pure_momentum_element and scar_deviation.
GreenCoefficients dirichlet_green_coefficients(const NewEigenvalue& eig,
                                               const NormTable& table,
                                               const DeltaWeights& weights,
                                               double cutoff);

MatrixElement dirichlet_pure_momentum_element(const NewEigenvalue& eig,
                                              const DeltaWeights& weights,
                                              const NormTable& table, int k,
                                              double cutoff);

// Star discrepancy of the phases (k f1, l f2) mod 1 over interior items
// with n <= X, sampled on a 64 x 64 grid of anchored boxes.
double phase_discrepancy(const DirichletConfig& cfg, const NormTable& table,
                         double X);

// Keeps active norms 3 <= m <= m_max whose delta is at least the
// eps-quantile of delta over the same range.
FilterReport delta_quantile_filter(const NormTable& table,
                                   const DeltaWeights& weights, double eps,
                                   double m_max);

}  // namespace pscat
