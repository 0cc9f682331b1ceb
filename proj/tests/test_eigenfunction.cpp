#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pscat/eigenfunction.hpp"
#include "pscat/errors.hpp"

using namespace pscat;

namespace {

const NormTable& golden() {
  static const NormTable t =
      build_norm_table(TorusGeometry::from_spec("golden"), 4e3);
  return t;
}

}  // namespace

TEST_CASE("momentum measure is normalised and ordered by 1/(n-lambda)^2") {
  const auto& t = golden();
  const auto eigs = solve_new_eigenvalues(
      t, CouplingConfig{std::numbers::pi / 2, 2e3}, {0.0, 1e3});
  for (std::size_t i = 1; i < eigs.size(); i += 97) {
    const auto gc = green_coefficients(eigs[i], t, 4e3);
    const auto mm = momentum_measure(gc);
    double s = 0.0;
    for (double p : mm.masses) s += p;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(mm.total == doctest::Approx(1.0).epsilon(1e-10));
    // items with equal r: mass ordering follows distance to lambda
    const auto top = top_masses(mm, 2);
    REQUIRE(top.size() == 2);
    CHECK(mm.masses[top[0]] >= mm.masses[top[1]]);
    CHECK(top[0] == gc.dominant);
  }
}

TEST_CASE("mass collapses onto m as lambda approaches it") {
  const auto& t = golden();
  const std::size_t i = 200;
  const double m = t[i].n;
  double prev = 0.0;
  for (double eps : {1e-2, 1e-4, 1e-6, 1e-9}) {
    const auto gc = green_coefficients(SpectralValue{m, -eps}, t, 4e3);
    CHECK(gc.dominant == i);
    const auto mm = momentum_measure(gc);
    const double p = localized_mass(mm, m, 1e-12);
    CHECK(p > prev);
    prev = p;
  }
  CHECK(prev > 1 - 1e-9);
}

TEST_CASE("localized mass covers everything for a wide window") {
  const auto& t = golden();
  const auto gc = green_coefficients(10.3, t, 4e3);
  const auto mm = momentum_measure(gc);
  CHECK(localized_mass(mm, 10.3, 1e5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(localized_mass(mm, 10.3, 0.0), ConfigError);
}

TEST_CASE("norm_sq at sqrt2 matches a 10^6 lattice sum") {
  const auto t = build_norm_table(TorusGeometry::from_spec("sqrt2"), 1e4);
  const auto eigs = solve_new_eigenvalues(
      t, CouplingConfig{std::numbers::pi / 2, 1e4}, {0.0, 20.0});
  // tenth interval (n_9, n_10); numpy reference root and brute-force sum
  REQUIRE(eigs.size() > 10);
  CHECK(eigs[10].lambda == doctest::Approx(8.571156138027998).epsilon(1e-12));
  const auto gc = green_coefficients(eigs[10], t, 1e4);
  CHECK(std::abs(gc.norm_sq / 140.13451266795076 - 1) < 1e-3);
}

TEST_CASE("green coefficient preconditions") {
  const auto& t = golden();
  CHECK_THROWS_AS(green_coefficients(10.0, t, 5e3), ConfigError);
  CHECK_THROWS_AS(green_coefficients(2500.0, t, 4e3), ConfigError);
  CHECK_THROWS_AS(green_coefficients(t[5].n, t, 4e3), PoleError);
}
