#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pscat/precision.hpp"

namespace pscat {

// Rectangular torus R^2 / 2*pi*L0 with L0 = Z(a,0) + Z(0,1/a). The dual
// lattice is Z(1/a,0) + Z(0,a) and gamma = a^4.
class TorusGeometry {
 public:
  // Rejects gamma <= 0 and gamma within working precision of a rational
  // with denominator <= 10^6.
  explicit TorusGeometry(const Real& gamma,
                         int precision_digits = kMaxPrecisionDigits,
                         std::string label = {});

  static TorusGeometry from_spec(const std::string& spec,
                                 int precision_digits = kMaxPrecisionDigits);

  const Real& gamma() const { return gamma_; }
  const Real& a() const { return a_; }
  const Real& sqrt_gamma() const { return sqrt_gamma_; }
  int precision_digits() const { return precision_digits_; }
  const std::string& label() const { return label_; }

  double gamma_d() const { return gamma_d_; }
  double a_d() const { return a_d_; }
  // a^2, the scale between the two axes of the norm form.
  double a2_d() const { return a2_d_; }

  // (k^2 + gamma l^2) / sqrt(gamma) = k^2/a^2 + a^2 l^2
  Real norm_hp(std::int64_t k, std::int64_t l) const;
  double norm(std::int64_t k, std::int64_t l) const {
    const double kd = static_cast<double>(k);
    const double ld = static_cast<double>(l);
    return kd * kd / a2_d_ + a2_d_ * ld * ld;
  }
  // Angle of xi = (k/a, l*a) in [0, pi/2] for k, l >= 0.
  double angle(std::int64_t k, std::int64_t l) const;

  // gamma printed at working precision; the cache key for norm tables.
  std::string gamma_digits() const;

 private:
  Real gamma_;
  Real a_;
  Real sqrt_gamma_;
  int precision_digits_;
  std::string label_;
  double gamma_d_;
  double a_d_;
  double a2_d_;
};

struct NormItem {
  std::int64_t k = 0;  // first-quadrant representative xi = (k/a, l*a)
  std::int64_t l = 0;
  double n = 0.0;
  int r = 1;
  double theta = 0.0;
};

inline int multiplicity(std::int64_t k, std::int64_t l) {
  if (k == 0 && l == 0) return 1;
  return (k > 0 && l > 0) ? 4 : 2;
}

struct NormTableOptions {
  std::size_t memory_cap = 50'000'000;
};

// Distinct Laplace eigenvalues n <= X with multiplicities, strictly
// increasing. Immutable after construction.
class NormTable {
 public:
  NormTable(TorusGeometry geometry, double X, std::vector<NormItem> items,
            std::vector<Real> norms_hp);

  const TorusGeometry& geometry() const { return geometry_; }
  double X() const { return X_; }
  std::size_t size() const { return items_.size(); }
  const NormItem& operator[](std::size_t i) const { return items_[i]; }
  const std::vector<NormItem>& items() const { return items_; }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  // Contiguous columns for the numeric kernels.
  std::span<const double> norms() const { return n_; }
  std::span<const double> multiplicities() const { return r_; }
  const Real& norm_hp(std::size_t i) const { return n_hp_[i]; }

  // Number of items with n <= x.
  std::size_t count_le(double x) const;
  // Index of the item with representative (|k|, |l|), or size() if absent.
  std::size_t find(std::int64_t k, std::int64_t l) const;

 private:
  TorusGeometry geometry_;
  double X_;
  std::vector<NormItem> items_;
  std::vector<Real> n_hp_;
  std::vector<double> n_;
  std::vector<double> r_;
};

NormTable build_norm_table(const TorusGeometry& geometry, double X,
                           const NormTableOptions& options = {});

// Upper bound on the number of first-quadrant lattice points with norm <= X.
std::size_t estimate_item_count(const TorusGeometry& geometry, double X);

// w_k(n) = sum over |xi|^2 = n of (xi~/|xi|)^k, in closed form:
// r cos(k theta) for even k and 0 for odd k. The origin has w_k(0) = 1 for
// even k and follows the odd-k vanishing otherwise.
double exp_sum_w(const NormItem& item, int k);

// |N(X)|; throws RangeError when X exceeds the table ceiling.
std::size_t weyl_count(const NormTable& table, double X);

// Columnar CSV: k,l,n,r,theta with 17 significant digits.
void write_csv(const NormTable& table, std::ostream& out);

void save_binary(const NormTable& table, const std::filesystem::path& path);
NormTable load_binary(const TorusGeometry& geometry,
                      const std::filesystem::path& path);
std::filesystem::path cache_path(const std::filesystem::path& dir,
                                 const TorusGeometry& geometry, double X);
// Reads the cached table if present, otherwise builds and stores it.
NormTable load_or_build(const TorusGeometry& geometry, double X,
                        const std::filesystem::path& cache_dir,
                        const NormTableOptions& options = {});

}  // namespace pscat
