#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pscat/kernels.hpp"
#include "pscat/lattice.hpp"

namespace pscat {

enum class TailMode { integral_correction, hard_truncate };

TailMode parse_tail_mode(const std::string& s);
std::string to_string(TailMode mode);

struct CouplingConfig {
  double phi = 0.0;  // self-adjoint extension parameter, |phi| < pi
  double tail_cutoff = 0.0;  // explicit-sum ceiling Lambda
  TailMode tail_mode = TailMode::integral_correction;
};

// Throws ConfigError unless |phi| < pi - 1e-6 and tail_cutoff > 0.
void validate(const CouplingConfig& cfg);

// A new eigenvalue lambda in the interlacing interval (lower, m).
struct NewEigenvalue {
  double lower = -std::numeric_limits<double>::infinity();
  double m = 0.0;
  double lambda = 0.0;
  double gap_to_m = 0.0;     // m - lambda, at full relative precision
  double above_lower = std::numeric_limits<double>::infinity();  // lambda - lower
  double residual = 0.0;     // |S(lambda) - c| at the returned root
  std::size_t index = 0;     // table index of m

  bool is_ground() const { return !(lower > -std::numeric_limits<double>::infinity()); }
  // Anchored at whichever endpoint is nearer.
  SpectralValue spectral_value() const;
};

// Secular function sum_j w_j (1/(p_j - x) - g(p_j)) + tail(x) together with
// the right-hand side it is solved against. The torus and the Dirichlet
// rectangle differ only in weights, regulariser g and tail density.
class SecularSystem {
 public:
  struct Tail {
    bool enabled = true;
    double density = 0.0;   // weight per unit norm beyond the cutoff
    double constant = 0.0;  // tail(x) = density * (constant - log(cutoff - x))
  };

  SecularSystem(std::vector<double> poles, std::vector<double> weights,
                std::vector<std::size_t> table_index, double regular_sum,
                double cutoff, Tail tail, double rhs);

  std::span<const double> poles() const { return poles_; }
  std::span<const double> weights() const { return weights_; }
  std::size_t table_index(std::size_t pole) const { return table_index_[pole]; }
  double cutoff() const { return cutoff_; }
  double rhs() const { return rhs_; }

  double value(const SpectralValue& x) const;
  double derivative(const SpectralValue& x) const;
  // value - rhs and derivative from a single pass over the poles.
  std::pair<double, double> residual_and_slope(const SpectralValue& x) const;
  double tail(double x) const;

 private:
  std::vector<double> poles_;
  std::vector<double> weights_;
  std::vector<std::size_t> table_index_;
  double regular_sum_;
  double cutoff_;
  Tail tail_;
  double rhs_;
};

SecularSystem torus_secular_system(const NormTable& table,
                                   const CouplingConfig& cfg);

// S(lambda) = sum_{n <= Lambda} r(n) (1/(n - lambda) - n/(n^2+1)) + tail.
// Throws PoleError within 1e-14 max(1, n) of a norm.
double secular_lhs(double lambda, const NormTable& table,
                   const CouplingConfig& cfg);
double secular_lhs(const SpectralValue& lambda, const NormTable& table,
                   const CouplingConfig& cfg);
double secular_derivative(const SpectralValue& lambda, const NormTable& table,
                          const CouplingConfig& cfg);

// c_phi = tan(phi/2) (sum_{n <= Lambda} r(n)/(n^2+1) + tail).
double coupling_rhs(const CouplingConfig& cfg, const NormTable& table);

struct SolveRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct SolverOptions {
  Exec exec = Exec::parallel;
  double bisection_rtol = 1e-12;
  int newton_steps = 3;
  bool include_ground = true;  // the root below the first pole
};

// Roots of sys.value(x) = sys.rhs() in every interval between consecutive
// poles with lo <= pole_i and pole_{i+1} <= hi, plus the root below the
// first pole when lo <= poles[0].
std::vector<NewEigenvalue> solve_secular(const SecularSystem& sys,
                                         SolveRange range,
                                         const SolverOptions& options = {});

// Weak-coupling spectrum in range. Requires range inside [0, table.X/2],
// tail_cutoff <= table.X and tail_cutoff >= 2 range.hi. The ground root
// (lambda < 0) is first when range.lo <= 0.
std::vector<NewEigenvalue> solve_new_eigenvalues(
    const NormTable& table, const CouplingConfig& cfg, SolveRange range,
    const SolverOptions& options = {});

struct Midpoint {};
struct FixedOffset {
  double c = 0.0;
};
struct CustomList {
  std::vector<double> lambdas;  // one per interval, starting at (n_0, n_1)
};
using StrongCouplingStrategy = std::variant<Midpoint, FixedOffset, CustomList>;

// An interlacing sequence for the intervals (n_i, n_{i+1}) with
// n_{i+1} <= m_max; no secular equation is solved.
std::vector<NewEigenvalue> strong_coupling_sequence(
    const NormTable& table, const StrongCouplingStrategy& strategy,
    double m_max = std::numeric_limits<double>::infinity());

// Checks lower < lambda < m for every entry; returns the index of the first
// violation or size() when all interlace.
std::size_t first_interlacing_violation(std::span<const NewEigenvalue> eigs);

}  // namespace pscat
