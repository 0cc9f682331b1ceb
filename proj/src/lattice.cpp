#include "pscat/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <ostream>

#include <omp.h>

#include "pscat/errors.hpp"

namespace pscat {

namespace {

constexpr std::int64_t kRationalMaxDen = 1'000'000;

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

TorusGeometry::TorusGeometry(const Real& gamma, int precision_digits,
                             std::string label)
    : gamma_(gamma),
      precision_digits_(precision_digits),
      label_(std::move(label)) {
  if (precision_digits < 17 || precision_digits > kMaxPrecisionDigits) {
    throw ConfigError("precision_digits must lie in [17, " +
                      std::to_string(kMaxPrecisionDigits) + "]");
  }
  if (!(gamma_ > 0)) throw ConfigError("gamma must be positive");
  // Round gamma to the requested number of digits so the whole pipeline
  // sees one value.
  gamma_ = Real(gamma_.str(precision_digits, std::ios_base::scientific));
  const Real tol = boost::multiprecision::pow(Real(10), -(precision_digits - 5)) *
                   (gamma_ > 1 ? gamma_ : Real(1));
  if (auto pq = near_rational(gamma_, kRationalMaxDen, tol)) {
    throw ConfigError("gamma is numerically rational (" +
                      std::to_string(pq->first) + "/" +
                      std::to_string(pq->second) + ")");
  }
  sqrt_gamma_ = boost::multiprecision::sqrt(gamma_);
  a_ = boost::multiprecision::sqrt(sqrt_gamma_);
  gamma_d_ = static_cast<double>(gamma_);
  a_d_ = static_cast<double>(a_);
  a2_d_ = static_cast<double>(sqrt_gamma_);
  if (label_.empty()) label_ = to_string(gamma_, 20);
}

TorusGeometry TorusGeometry::from_spec(const std::string& spec,
                                       int precision_digits) {
  return TorusGeometry(parse_gamma(spec), precision_digits, spec);
}

Real TorusGeometry::norm_hp(std::int64_t k, std::int64_t l) const {
  const Real kk = Real(k) * Real(k);
  const Real ll = Real(l) * Real(l);
  return (kk + gamma_ * ll) / sqrt_gamma_;
}

double TorusGeometry::angle(std::int64_t k, std::int64_t l) const {
  if (k == 0 && l == 0) return 0.0;
  if (k == 0) return std::numbers::pi / 2;
  if (l == 0) return 0.0;
  return std::atan2(static_cast<double>(l) * a2_d_, static_cast<double>(k));
}

std::string TorusGeometry::gamma_digits() const {
  return to_string(gamma_, precision_digits_);
}

NormTable::NormTable(TorusGeometry geometry, double X,
                     std::vector<NormItem> items, std::vector<Real> norms_hp)
    : geometry_(std::move(geometry)),
      X_(X),
      items_(std::move(items)),
      n_hp_(std::move(norms_hp)) {
  n_.reserve(items_.size());
  r_.reserve(items_.size());
  for (const auto& it : items_) {
    n_.push_back(it.n);
    r_.push_back(static_cast<double>(it.r));
  }
}

std::size_t NormTable::count_le(double x) const {
  return static_cast<std::size_t>(std::upper_bound(n_.begin(), n_.end(), x) -
                                  n_.begin());
}

std::size_t NormTable::find(std::int64_t k, std::int64_t l) const {
  k = k < 0 ? -k : k;
  l = l < 0 ? -l : l;
  const double n = geometry_.norm(k, l);
  // The double norm is within a few ulps of the stored value; scan the
  // neighbourhood for the exact representative.
  const double slack = 1e-12 * std::max(1.0, n);
  auto lo = std::lower_bound(n_.begin(), n_.end(), n - slack);
  for (auto it = lo; it != n_.end() && *it <= n + slack; ++it) {
    const auto& item = items_[static_cast<std::size_t>(it - n_.begin())];
    if (item.k == k && item.l == l) {
      return static_cast<std::size_t>(it - n_.begin());
    }
  }
  return items_.size();
}

std::size_t estimate_item_count(const TorusGeometry& geometry, double X) {
  if (X < 0) return 0;
  const double a2 = geometry.a2_d();
  const double quarter_ellipse = std::numbers::pi / 4 * X;
  const double axes = std::sqrt(X * a2) + std::sqrt(X / a2);
  return static_cast<std::size_t>(quarter_ellipse + axes + 2.0);
}

NormTable build_norm_table(const TorusGeometry& geometry, double X,
                           const NormTableOptions& options) {
  if (!(X >= 0) || !std::isfinite(X)) {
    throw ConfigError("norm table ceiling X must be finite and >= 0");
  }
  const std::size_t estimate = estimate_item_count(geometry, X);
  if (estimate > options.memory_cap) {
    throw CapacityError(estimate, options.memory_cap);
  }

  const double a2 = geometry.a2_d();
  const auto k_max = static_cast<std::int64_t>(std::ceil(std::sqrt(X * a2)));
  const Real X_hp(X);

  // One stripe per k; stripes are merged in k order so the result does not
  // depend on the thread count.
  std::vector<std::vector<NormItem>> stripes(static_cast<std::size_t>(k_max) + 1);
  std::vector<std::vector<Real>> stripes_hp(stripes.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t k = 0; k <= k_max; ++k) {
    auto& out = stripes[static_cast<std::size_t>(k)];
    auto& out_hp = stripes_hp[static_cast<std::size_t>(k)];
    const double kk = static_cast<double>(k) * static_cast<double>(k);
    const double rest = X - kk / a2;
    if (rest < -1e-9 * std::max(1.0, X)) continue;
    const auto l_max = static_cast<std::int64_t>(
        std::ceil(std::sqrt(std::max(0.0, rest) / a2)) + 1);
    for (std::int64_t l = 0; l <= l_max; ++l) {
      Real n_hp = geometry.norm_hp(k, l);
      if (n_hp > X_hp) break;
      NormItem item;
      item.k = k;
      item.l = l;
      item.n = static_cast<double>(n_hp);
      item.r = multiplicity(k, l);
      item.theta = geometry.angle(k, l);
      out.push_back(item);
      out_hp.push_back(std::move(n_hp));
    }
  }

  std::size_t total = 0;
  for (const auto& s : stripes) total += s.size();
  std::vector<std::size_t> order;
  order.reserve(total);
  std::vector<NormItem> flat;
  std::vector<Real> flat_hp;
  flat.reserve(total);
  flat_hp.reserve(total);
  for (std::size_t s = 0; s < stripes.size(); ++s) {
    for (std::size_t j = 0; j < stripes[s].size(); ++j) {
      flat.push_back(stripes[s][j]);
      flat_hp.push_back(std::move(stripes_hp[s][j]));
    }
  }
  stripes.clear();
  stripes_hp.clear();
  for (std::size_t i = 0; i < total; ++i) order.push_back(i);

  // Doubles decide unless two norms are within rounding of each other.
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    const double ni = flat[i].n;
    const double nj = flat[j].n;
    if (std::abs(ni - nj) > 1e-12 * std::max(1.0, std::max(ni, nj))) {
      return ni < nj;
    }
    return flat_hp[i] < flat_hp[j];
  });

  std::vector<NormItem> items;
  std::vector<Real> items_hp;
  items.reserve(total);
  items_hp.reserve(total);
  const Real collision_tol =
      boost::multiprecision::pow(Real(10), -(geometry.precision_digits() - 10)) *
      (X_hp > 1 ? X_hp : Real(1));
  for (std::size_t idx : order) {
    if (!items_hp.empty() &&
        flat_hp[idx] - items_hp.back() <= collision_tol) {
      // Distinct (k^2, l^2) pairs never share a norm for irrational gamma;
      // reaching this means gamma behaves like a rational at this scale.
      throw ConfigError("norm collision between (" +
                        std::to_string(items.back().k) + "," +
                        std::to_string(items.back().l) + ") and (" +
                        std::to_string(flat[idx].k) + "," +
                        std::to_string(flat[idx].l) +
                        "): gamma is too close to rational");
    }
    items.push_back(flat[idx]);
    items_hp.push_back(std::move(flat_hp[idx]));
  }
  return NormTable(geometry, X, std::move(items), std::move(items_hp));
}

double exp_sum_w(const NormItem& item, int k) {
  if (k % 2 != 0) return 0.0;
  if (item.k == 0 && item.l == 0) return 1.0;
  if (k == 0) return static_cast<double>(item.r);
  return static_cast<double>(item.r) * std::cos(k * item.theta);
}

std::size_t weyl_count(const NormTable& table, double X) {
  if (X > table.X()) {
    throw RangeError("weyl_count: X=" + std::to_string(X) +
                     " exceeds table ceiling " + std::to_string(table.X()));
  }
  return table.count_le(X);
}

void write_csv(const NormTable& table, std::ostream& out) {
  out << "k,l,n,r,theta\n";
  char buf[128];
  for (const auto& it : table) {
    std::snprintf(buf, sizeof buf, "%lld,%lld,%.17g,%d,%.17g\n",
                  static_cast<long long>(it.k), static_cast<long long>(it.l),
                  it.n, it.r, it.theta);
    out << buf;
  }
}

namespace {

constexpr char kMagic[8] = {'P', 'S', 'C', 'N', 'O', 'R', 'M', '1'};

struct PackedItem {
  std::int64_t k;
  std::int64_t l;
  double n;
  double theta;
  std::int32_t r;
  std::int32_t pad;
};

}  // namespace

void save_binary(const NormTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  const std::string key = table.geometry().gamma_digits();
  const auto key_len = static_cast<std::uint64_t>(key.size());
  const double X = table.X();
  const auto count = static_cast<std::uint64_t>(table.size());
  out.write(kMagic, sizeof kMagic);
  out.write(reinterpret_cast<const char*>(&key_len), sizeof key_len);
  out.write(key.data(), static_cast<std::streamsize>(key.size()));
  out.write(reinterpret_cast<const char*>(&X), sizeof X);
  out.write(reinterpret_cast<const char*>(&count), sizeof count);
  for (const auto& it : table) {
    PackedItem p{it.k, it.l, it.n, it.theta, it.r, 0};
    out.write(reinterpret_cast<const char*>(&p), sizeof p);
  }
  if (!out) throw Error("write failed: " + path.string());
}

NormTable load_binary(const TorusGeometry& geometry,
                      const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw Error("not a norm table cache: " + path.string());
  }
  std::uint64_t key_len = 0;
  in.read(reinterpret_cast<char*>(&key_len), sizeof key_len);
  if (!in || key_len > 4096) throw Error("corrupt cache header");
  std::string key(key_len, '\0');
  in.read(key.data(), static_cast<std::streamsize>(key_len));
  if (key != geometry.gamma_digits()) {
    throw Error("cache was built for a different gamma: " + path.string());
  }
  double X = 0;
  std::uint64_t count = 0;
  in.read(reinterpret_cast<char*>(&X), sizeof X);
  in.read(reinterpret_cast<char*>(&count), sizeof count);
  if (!in) throw Error("corrupt cache header");
  std::vector<NormItem> items(count);
  std::vector<Real> hp(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    PackedItem p{};
    in.read(reinterpret_cast<char*>(&p), sizeof p);
    if (!in) throw Error("truncated cache: " + path.string());
    items[i] = NormItem{p.k, p.l, p.n, p.r, p.theta};
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
    const auto& it = items[static_cast<std::size_t>(i)];
    hp[static_cast<std::size_t>(i)] = geometry.norm_hp(it.k, it.l);
  }
  return NormTable(geometry, X, std::move(items), std::move(hp));
}

std::filesystem::path cache_path(const std::filesystem::path& dir,
                                 const TorusGeometry& geometry, double X) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "norms_%016llx_%.17g.bin",
                static_cast<unsigned long long>(fnv1a(geometry.gamma_digits())),
                X);
  return dir / buf;
}

NormTable load_or_build(const TorusGeometry& geometry, double X,
                        const std::filesystem::path& cache_dir,
                        const NormTableOptions& options) {
  const auto path = cache_path(cache_dir, geometry, X);
  if (std::filesystem::exists(path)) {
    try {
      return load_binary(geometry, path);
    } catch (const Error&) {
      // stale or corrupt cache; rebuild below
    }
  }
  NormTable table = build_norm_table(geometry, X, options);
  std::filesystem::create_directories(cache_dir);
  save_binary(table, path);
  return table;
}

}  // namespace pscat
