#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pscat/commands.hpp"
#include "pscat/dirichlet.hpp"
#include "pscat/errors.hpp"

using namespace pscat;

namespace {

constexpr double kPi = std::numbers::pi;

DirichletConfig generic_cfg(double phi, double cutoff) {
  const Point f = default_scatterer();
  return DirichletConfig{f.x1, f.x2, phi, cutoff};
}

}  // namespace

TEST_CASE("basis vanishes on the boundary and on the axes") {
  const auto g = TorusGeometry::from_spec("golden");
  const double a = g.a_d();
  const double xi1 = 3 / a, xi2 = 2 * a;
  CHECK(std::abs(dirichlet_basis(xi1, xi2, Point{0.0, 1.0})) < 1e-15);
  CHECK(std::abs(dirichlet_basis(xi1, xi2, Point{2 * kPi * a, 1.0})) < 1e-14);
  CHECK(std::abs(dirichlet_basis(xi1, xi2, Point{1.0, 2 * kPi / a})) < 1e-14);
  CHECK(dirichlet_basis(0.0, xi2, Point{1.0, 1.0}) == 0.0);
  CHECK(dirichlet_basis(xi1, 0.0, Point{1.0, 1.0}) == 0.0);
}

TEST_CASE("character expansion agrees with the product of sines") {
  const auto g = TorusGeometry::from_spec("golden");
  const double a = g.a_d();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double xi1 = static_cast<double>(1 + rng() % 50) / a;
    const double xi2 = static_cast<double>(1 + rng() % 50) * a;
    const Point x{u(rng) * 2 * kPi * a, u(rng) * 2 * kPi / a};
    const auto c = character_expansion(xi1, xi2, x);
    CHECK(std::abs(c.real() - dirichlet_basis(xi1, xi2, x)) < 1e-12);
    CHECK(std::abs(c.imag()) < 1e-12);
  }
  CHECK(character_identity_error(g, 1e3, 20240601, 100) < 1e-12);
}

TEST_CASE("genericity and validation") {
  CHECK(is_generic(DirichletConfig{std::sqrt(2.0) - 1, 1 / std::sqrt(3.0)}));
  CHECK_FALSE(is_generic(DirichletConfig{0.5, 0.5}));
  CHECK_FALSE(is_generic(DirichletConfig{0.37, 0.41}));
  CHECK_THROWS_AS(validate(DirichletConfig{0.0, 0.5, 0.0, 10.0}), ConfigError);
  CHECK_THROWS_AS(validate(DirichletConfig{0.5, 1.0, 0.0, 10.0}), ConfigError);
}

TEST_CASE("delta weights: bounds, axes and the centre control") {
  const auto t = build_norm_table(TorusGeometry::from_spec("golden"), 1e3);
  const auto w = delta_weights(generic_cfg(0.0, 1e3), t);
  CHECK(w.generic);
  CHECK(w.warnings.empty());
  CHECK(w.vanishing == 0);
  CHECK(w.active == w.interior);
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(w.delta[i] <= 1 / std::pow(kPi, 4) + 1e-18);
    if (t[i].k == 0 || t[i].l == 0) CHECK(w.delta[i] == 0.0);
  }

  // Centre: every interior index vanishes since sin(k pi) = 0 for all k.
  const auto c = delta_weights(DirichletConfig{0.5, 0.5, 0.0, 1e3}, t);
  CHECK_FALSE(c.generic);
  CHECK(c.vanishing > 0);
  CHECK(c.vanishing == c.interior);
  CHECK(c.active == 0);
  CHECK(c.warnings.size() == 2);

  // 0.37 / 0.41: flagged as rational but no delta vanishes below 10^3.
  const auto r = delta_weights(DirichletConfig{0.37, 0.41, 0.0, 1e3}, t);
  CHECK_FALSE(r.generic);
  double mn = 1.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i].k > 0 && t[i].l > 0) mn = std::min(mn, r.delta[i]);
  }
  CHECK(mn > 0);
  CHECK(mn == doctest::Approx(1.5957939525939093e-07).epsilon(1e-9));
}

TEST_CASE("lattice constant matches a 10^6 lattice sum") {
  const auto g = TorusGeometry::from_spec("sqrt2");
  CHECK(lattice_constant(g) == doctest::Approx(4.796015545344894).epsilon(1e-12));
}

TEST_CASE("sqrt2 Dirichlet roots match a grid-scan reference") {
  const auto t = build_norm_table(TorusGeometry::from_spec("sqrt2"), 2e3);
  const auto cfg = generic_cfg(kPi / 2, 2e3);
  const auto w = delta_weights(cfg, t);
  const auto eigs = dirichlet_secular_solve(cfg, t, w, {0.0, 20.0});
  const double ref[] = {4.552429980768295,  5.597339933666002,  8.119279249389802,
                        8.756809389055196,  11.543202468765214, 12.323438715247429,
                        14.064809750103773, 14.643226304506634, 18.21012040335256,
                        18.268860345308724};
  REQUIRE(eigs.size() >= 10);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(std::abs(eigs[i].lambda - ref[i]) < 1e-6);
    CHECK_FALSE(eigs[i].is_ground());
  }
}

TEST_CASE("Dirichlet roots interlace with active norms; phi=0 residual") {
  const auto t = build_norm_table(TorusGeometry::from_spec("golden"), 4e3);
  for (double phi : {0.0, kPi / 2, -1.0}) {
    const auto cfg = generic_cfg(phi, 4e3);
    const auto w = delta_weights(cfg, t);
    const auto eigs = dirichlet_secular_solve(cfg, t, w, {0.0, 2e3});
    CHECK(first_interlacing_violation(eigs) == eigs.size());
    const auto sys = dirichlet_secular_system(cfg, t, w);
    for (const auto& e : eigs) {
      CHECK(w.delta[e.index] > 0);
      CHECK(std::abs(sys.value(e.spectral_value()) - sys.rhs()) <= 1e-6);
      if (phi == 0.0) CHECK(std::abs(sys.value(e.spectral_value())) <= 1e-6);
    }
  }
}

TEST_CASE("Dirichlet pure elements: k=0 is one, odd k vanish") {
  const auto t = build_norm_table(TorusGeometry::from_spec("golden"), 4e3);
  const auto cfg = generic_cfg(kPi / 2, 2e3);
  const auto w = delta_weights(cfg, t);
  const auto eigs = dirichlet_secular_solve(cfg, t, w, {0.0, 1e3});
  for (std::size_t i = 0; i < eigs.size(); i += 53) {
    CHECK(std::abs(dirichlet_pure_momentum_element(eigs[i], w, t, 0, 4e3).value.real() - 1) < 1e-12);
    for (int k : {1, 3, 5}) {
      CHECK(std::abs(dirichlet_pure_momentum_element(eigs[i], w, t, k, 4e3).value) < 1e-12);
    }
    const auto gc = dirichlet_green_coefficients(eigs[i], t, w, 4e3);
    CHECK_THROWS_AS(mixed_element(gc, ObservableIndex{1, 0, 0}), ConfigError);
  }
}

TEST_CASE("phase discrepancy is small for the generic scatterer") {
  const auto t = build_norm_table(TorusGeometry::from_spec("golden"), 1e4);
  CHECK(phase_discrepancy(generic_cfg(0.0, 1e4), t, 1e4) < 0.05);
  CHECK(phase_discrepancy(DirichletConfig{0.5, 0.5, 0.0, 1e4}, t, 1e4) > 0.2);
}

TEST_CASE("delta quantile filter keeps 1 - eps") {
  const auto t = build_norm_table(TorusGeometry::from_spec("golden"), 1e4);
  const auto w = delta_weights(generic_cfg(0.0, 1e4), t);
  const auto f = delta_quantile_filter(t, w, 0.1, 5e3);
  CHECK(f.density == doctest::Approx(0.9).epsilon(0.01));
  CHECK_THROWS_AS(delta_quantile_filter(t, w, 1.5, 5e3), ConfigError);
}
