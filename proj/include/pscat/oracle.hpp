#pragma once

// Brute-force references. Everything here works from individual lattice
// points enumerated afresh at working precision and shares no code path with
// the table builder, the kernels or the solver. Slow by design; meant for
// X around 10^3.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pscat/kernels.hpp"
#include "pscat/lattice.hpp"
#include "pscat/observables.hpp"
#include "pscat/spectrum.hpp"

namespace pscat::oracle {

struct LatticePoint {
  std::int64_t i = 0;
  std::int64_t j = 0;
  Real n_hp;
  double n = 0.0;
};

// Every dual-lattice point (all four quadrants) with norm <= X.
std::vector<LatticePoint> lattice_points(const TorusGeometry& geometry,
                                         double X);

struct DistinctNorm {
  Real n_hp;
  double n = 0.0;
  int r = 0;
};

// Points grouped by norm: sorted at working precision, merged when closer
// than 1e-30.
std::vector<DistinctNorm> distinct_norms(const TorusGeometry& geometry,
                                         double X);
std::vector<double> norm_values(const std::vector<DistinctNorm>& norms);

// Ordered point pairs (xi, eta), both of norm <= X, with
// |xi|^2 - |eta|^2 in (b, c).
std::int64_t pair_count_points(const TorusGeometry& geometry, double X,
                               double b, double c);
// Ordered pairs of distinct norms <= X with difference in (b, c).
std::int64_t pair_count_distinct(const std::vector<double>& norms, double X,
                                 double b, double c);

std::size_t gap_count(const std::vector<double>& norms, double T, double G);
std::vector<int> unit_interval_counts(const std::vector<double>& norms,
                                      double T);
double inverse_square_F(const std::vector<double>& norms, std::size_t m_index,
                        double cap);
std::vector<int> neighbour_counts(const std::vector<double>& norms, double T,
                                  double D);
double far_pair_sum(const std::vector<double>& norms, double x, double A);

// Secular function summed point by point in long double.
long double secular_value(const std::vector<LatticePoint>& points,
                          long double lambda, double cutoff, TailMode mode);
long double coupling_rhs(const std::vector<LatticePoint>& points, double phi,
                         double cutoff, TailMode mode);

// The first `count` new eigenvalues (ground root first) by sign scan on a
// uniform grid of each interval followed by bisection.
std::vector<double> first_eigenvalues(const TorusGeometry& geometry,
                                      double phi, double cutoff,
                                      std::size_t count, TailMode mode,
                                      int grid = 400);

// <Op(e_{0,k})> summed over individual points with e^{ik arg xi}; the origin
// contributes to even k only.
std::complex<double> pure_element(const TorusGeometry& geometry,
                                  const std::vector<LatticePoint>& points,
                                  const SpectralValue& lambda, double cutoff,
                                  int k);

// <Op(e_{zeta,k})> summed over points eta with eta + zeta in range, using
// direct norm evaluation and explicit phases.
std::complex<double> mixed_element(const TorusGeometry& geometry,
                                   const std::vector<LatticePoint>& points,
                                   const SpectralValue& lambda, double cutoff,
                                   const ObservableIndex& index, Point x0);

struct OracleCheck {
  std::string name;
  bool exact = false;  // integer quantity, must agree exactly
  double library = 0.0;
  double oracle = 0.0;
  double diff = 0.0;  // absolute for exact, max abs (or rel for F) otherwise
  bool pass = false;
};

// Library results (serial and parallel paths) against the references above
// at ceiling X: norm list, Weyl count, pair counts, gap counts, M(k) sums,
// F(m), neighbour counts and the first `eig_count` eigenvalues. Reals must
// agree to 1e-6.
std::vector<OracleCheck> run_oracle_checks(const TorusGeometry& geometry,
                                           double X, double phi,
                                           TailMode mode,
                                           std::size_t eig_count = 20);

}  // namespace pscat::oracle
