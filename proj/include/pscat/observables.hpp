#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "pscat/eigenfunction.hpp"
#include "pscat/lattice.hpp"

namespace pscat {

// Fourier mode e_{zeta,k}(x, phi) = exp(i<zeta, x> + i k phi) with
// zeta = (p/a, q*a) in the dual lattice.
struct ObservableIndex {
  std::int64_t p = 0;
  std::int64_t q = 0;
  int k = 0;

  bool pure() const { return p == 0 && q == 0; }
};

struct Point {
  double x1 = 0.0;
  double x2 = 0.0;
};

struct MatrixElement {
  std::complex<double> value;
  double truncation_bound = 0.0;
  double lambda = 0.0;
  ObservableIndex index;
  // sum |c(xi)||c(xi - zeta)| / sum |c|^2; the a priori bound on |value|
  // for mixed modes (zero for pure modes).
  double cauchy_schwarz = 0.0;
};

// <Op(e_{0,k}) g, g> = sum_n w_k(n)/(n-lambda)^2 / sum_n r(n)/(n-lambda)^2.
// The tail beyond the cutoff enters the denominator (and the numerator for
// k = 0, where w_0 = r); its worst-case numerator share for k != 0 is the
// truncation bound.
MatrixElement pure_momentum_element(const GreenCoefficients& gc, int k);
// Real parts of the pure elements for k = 0..k_max in one pass over the
// coefficients, cos(k theta) by recurrence.
std::vector<double> pure_momentum_elements(const GreenCoefficients& gc,
                                           int k_max);

// Right quantization: momentum first, then position. Throws ConfigError for
// zeta = 0 and when the truncation bound exceeds 0.1.
MatrixElement mixed_element(const GreenCoefficients& gc,
                            const ObservableIndex& index, Point x0 = {});
// Several modes for one eigenfunction; shares the coefficient grid.
std::vector<MatrixElement> mixed_elements(
    const GreenCoefficients& gc, std::span<const ObservableIndex> indices,
    Point x0 = {});

// Truncation-free default cutoff for mixed elements: 4 lambda + 10^4.
inline double default_mixed_cutoff(double lambda) {
  return 4.0 * (lambda > 0 ? lambda : 0.0) + 1e4;
}

// w_k(m)/r(m): cos(k theta_m) for even k, 0 for odd k.
double predicted_scar_value(const NormItem& item, int k);

// max over even 2 <= k <= k_max of |<Op(e_{0,k})> - cos(k theta_m)| plus
// max over odd k <= k_max of |<Op(e_{0,k})>|.
double scar_deviation(const GreenCoefficients& gc, const NormItem& item,
                      int k_max = 8);

// Trigonometric polynomial symbol sum coeff * e_{zeta,k}.
struct TrigTerm {
  ObservableIndex index;
  std::complex<double> coeff;
};

std::complex<double> trig_polynomial_element(const GreenCoefficients& gc,
                                             std::span<const TrigTerm> terms,
                                             Point x0 = {});
// Limit value sum over pure even-k terms of coeff * cos(k theta_m).
std::complex<double> predicted_limit(const NormItem& item,
                                     std::span<const TrigTerm> terms);

}  // namespace pscat
