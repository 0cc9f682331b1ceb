#include "pscat/observables.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "pscat/errors.hpp"

namespace pscat {

MatrixElement pure_momentum_element(const GreenCoefficients& gc, int k) {
  MatrixElement me;
  me.lambda = gc.lambda.value();
  me.index = ObservableIndex{0, 0, k};
  // w_k/r is even in k, so e_{0,-k} gives the same real value.
  double num = 0.0;
  if (k == 0) {
    for (double w : gc.weights) num += w;
  } else if (k % 2 == 0) {
    for (std::size_t i = 0; i < gc.weights.size(); ++i) {
      num += gc.weights[i] * (exp_sum_w(gc.items[i], k) / gc.items[i].r);
    }
  }
  // Odd k: every w_k vanishes, the origin included.
  if (k == 0) {
    me.value = (num + gc.tail) / gc.norm_sq;
  } else {
    me.value = num / gc.norm_sq;
    me.truncation_bound = gc.tail / gc.norm_sq;
  }
  return me;
}

std::vector<double> pure_momentum_elements(const GreenCoefficients& gc,
                                           int k_max) {
  if (k_max < 0) throw ConfigError("k_max must be non-negative");
  const auto nk = static_cast<std::size_t>(k_max) + 1;
  std::vector<double> num(nk, 0.0);
  for (std::size_t i = 0; i < gc.weights.size(); ++i) {
    const double w = gc.weights[i];
    if (w == 0.0) continue;
    num[0] += w;
    const NormItem& it = gc.items[i];
    if (it.k == 0 && it.l == 0) {
      for (std::size_t k = 2; k < nk; k += 2) num[k] += w;
      continue;
    }
    const double c2 = std::cos(2.0 * it.theta);
    double prev = 1.0, cur = c2;
    for (std::size_t k = 2; k < nk; k += 2) {
      num[k] += w * cur;
      const double next = 2.0 * c2 * cur - prev;
      prev = cur;
      cur = next;
    }
  }
  std::vector<double> out(nk, 0.0);
  out[0] = (num[0] + gc.tail) / gc.norm_sq;
  for (std::size_t k = 2; k < nk; k += 2) out[k] = num[k] / gc.norm_sq;
  return out;
}

namespace {

// Dense grid of c(xi) = 1/(|xi|^2 - lambda) over integer coordinates
// (i, j) in [-K, K] x [-L, L], zero outside the cutoff ellipse.
class CoefficientGrid {
 public:
  explicit CoefficientGrid(const GreenCoefficients& gc) {
    for (const auto& it : gc.items) {
      K_ = std::max(K_, it.k);
      L_ = std::max(L_, it.l);
    }
    width_ = 2 * L_ + 1;
    values_.assign(static_cast<std::size_t>((2 * K_ + 1) * width_), 0.0);
    for (const auto& it : gc.items) {
      const double c = 1.0 / gc.lambda.diff(it.n);
      for (int si : {1, -1}) {
        for (int sj : {1, -1}) {
          at(si * it.k, sj * it.l) = c;
        }
      }
    }
  }

  std::int64_t K() const { return K_; }
  std::int64_t L() const { return L_; }
  const double* row(std::int64_t i) const {
    return values_.data() + offset(i, -L_);
  }

 private:
  std::size_t offset(std::int64_t i, std::int64_t j) const {
    return static_cast<std::size_t>((i + K_) * width_ + (j + L_));
  }
  double& at(std::int64_t i, std::int64_t j) { return values_[offset(i, j)]; }

  std::int64_t K_ = 0;
  std::int64_t L_ = 0;
  std::int64_t width_ = 1;
  std::vector<double> values_;
};

}  // namespace

std::vector<MatrixElement> mixed_elements(
    const GreenCoefficients& gc, std::span<const ObservableIndex> indices,
    Point x0) {
  if (gc.dirichlet) {
    throw ConfigError("mixed elements are implemented for the torus only");
  }
  for (const auto& ix : indices) {
    if (ix.pure()) {
      throw ConfigError("mixed_element requires zeta != 0; use "
                        "pure_momentum_element");
    }
  }
  const double bound = 2.0 * std::sqrt(gc.tail / gc.norm_sq);
  if (bound > 0.1) {
    throw ConfigError("mixed_element: cutoff too small, truncation bound " +
                      std::to_string(bound));
  }
  const CoefficientGrid grid(gc);
  const double a = gc.a;
  const double inv_a = 1.0 / a;

  std::vector<MatrixElement> out(indices.size());
  // Group requested harmonics by zeta so each shift is swept once.
  std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::size_t>>
      by_zeta;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    by_zeta[{indices[i].p, indices[i].q}].push_back(i);
  }

  for (const auto& [zeta, slots] : by_zeta) {
    const auto [p, q] = zeta;
    int k_max = 0;
    for (std::size_t s : slots) k_max = std::max(k_max, std::abs(indices[s].k));
    std::vector<std::complex<double>> acc(static_cast<std::size_t>(k_max) + 1);
    double abs_sum = 0.0;

    // eta = xi - zeta runs over the grid with eta + zeta inside it.
    const std::int64_t i_lo = std::max(-grid.K(), -grid.K() - p);
    const std::int64_t i_hi = std::min(grid.K(), grid.K() - p);
    const std::int64_t j_lo = std::max(-grid.L(), -grid.L() - q);
    const std::int64_t j_hi = std::min(grid.L(), grid.L() - q);
    for (std::int64_t i = i_lo; i <= i_hi; ++i) {
      const double* row_eta = grid.row(i);
      const double* row_xi = grid.row(i + p);
      const double ex = static_cast<double>(i) * inv_a;
      for (std::int64_t j = j_lo; j <= j_hi; ++j) {
        const double c_eta = row_eta[j + grid.L()];
        if (c_eta == 0.0) continue;
        const double c_xi = row_xi[j + q + grid.L()];
        if (c_xi == 0.0) continue;
        const double prod = c_eta * c_xi;
        abs_sum += std::abs(prod);
        if (i == 0 && j == 0) {
          // xi = zeta: the diagonal term conj(f(zeta)) f(0), no angle.
          for (auto& v : acc) v += prod;
          continue;
        }
        const double ey = static_cast<double>(j) * a;
        const double inv_len = 1.0 / std::sqrt(ex * ex + ey * ey);
        const std::complex<double> u(ex * inv_len, ey * inv_len);
        std::complex<double> z(1.0, 0.0);
        acc[0] += prod;
        for (int kk = 1; kk <= k_max; ++kk) {
          z *= u;
          acc[static_cast<std::size_t>(kk)] += prod * z;
        }
      }
    }

    const double phase_arg =
        x0.x1 * static_cast<double>(p) * inv_a + x0.x2 * static_cast<double>(q) * a;
    const std::complex<double> phase = std::polar(1.0, phase_arg);
    for (std::size_t s : slots) {
      const int k = indices[s].k;
      std::complex<double> v = acc[static_cast<std::size_t>(std::abs(k))];
      // c is real, so the u^-k sum is the conjugate of the u^k sum.
      if (k < 0) v = std::conj(v);
      MatrixElement& me = out[s];
      me.value = phase * v / gc.norm_sq;
      me.truncation_bound = bound;
      me.lambda = gc.lambda.value();
      me.index = indices[s];
      me.cauchy_schwarz = abs_sum / gc.norm_sq;
    }
  }
  return out;
}

MatrixElement mixed_element(const GreenCoefficients& gc,
                            const ObservableIndex& index, Point x0) {
  return mixed_elements(gc, std::span<const ObservableIndex>(&index, 1), x0)
      .front();
}

double predicted_scar_value(const NormItem& item, int k) {
  if (k % 2 != 0) return 0.0;
  return std::cos(k * item.theta);
}

double scar_deviation(const GreenCoefficients& gc, const NormItem& item,
                      int k_max) {
  double even = 0.0;
  double odd = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    const double v = pure_momentum_element(gc, k).value.real();
    if (k % 2 == 0) {
      even = std::max(even, std::abs(v - predicted_scar_value(item, k)));
    } else {
      odd = std::max(odd, std::abs(v));
    }
  }
  return even + odd;
}

std::complex<double> trig_polynomial_element(const GreenCoefficients& gc,
                                             std::span<const TrigTerm> terms,
                                             Point x0) {
  std::complex<double> total = 0.0;
  std::vector<ObservableIndex> mixed;
  std::vector<std::complex<double>> mixed_coeff;
  for (const auto& t : terms) {
    if (t.index.pure()) {
      total += t.coeff * pure_momentum_element(gc, t.index.k).value;
    } else {
      mixed.push_back(t.index);
      mixed_coeff.push_back(t.coeff);
    }
  }
  if (!mixed.empty()) {
    const auto els = mixed_elements(gc, mixed, x0);
    for (std::size_t i = 0; i < els.size(); ++i) {
      total += mixed_coeff[i] * els[i].value;
    }
  }
  return total;
}

std::complex<double> predicted_limit(const NormItem& item,
                                     std::span<const TrigTerm> terms) {
  std::complex<double> total = 0.0;
  for (const auto& t : terms) {
    if (t.index.pure() && t.index.k % 2 == 0) {
      total += t.coeff * std::cos(t.index.k * item.theta);
    }
  }
  return total;
}

}  // namespace pscat
