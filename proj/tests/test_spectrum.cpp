#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "pscat/errors.hpp"
#include "pscat/oracle.hpp"
#include "pscat/spectrum.hpp"

using namespace pscat;

namespace {

constexpr double kPi = std::numbers::pi;

const NormTable& sqrt2_big() {
  static const NormTable t =
      build_norm_table(TorusGeometry::from_spec("sqrt2"), 1e6);
  return t;
}

const NormTable& golden_small() {
  static const NormTable t =
      build_norm_table(TorusGeometry::from_spec("golden"), 1e3);
  return t;
}

}  // namespace

TEST_CASE("coupling config validation") {
  CHECK_THROWS_AS(validate(CouplingConfig{kPi, 10.0}), ConfigError);
  CHECK_THROWS_AS(validate(CouplingConfig{-kPi + 1e-7, 10.0}), ConfigError);
  CHECK_THROWS_AS(validate(CouplingConfig{0.0, 0.0}), ConfigError);
  CHECK_NOTHROW(validate(CouplingConfig{2.8, 10.0}));
  CHECK(parse_tail_mode("hard_truncate") == TailMode::hard_truncate);
  CHECK_THROWS_AS(parse_tail_mode("bogus"), ConfigError);
}

TEST_CASE("secular function changes sign across an isolated pole") {
  const auto& t = golden_small();
  const CouplingConfig cfg{kPi / 2, 1e3};
  for (std::size_t i : {1u, 10u, 100u}) {
    const double n = t[i].n;
    CHECK(secular_lhs(n - 1e-8, t, cfg) > 0);
    CHECK(secular_lhs(n + 1e-8, t, cfg) < 0);
    CHECK_THROWS_AS(secular_lhs(n, t, cfg), PoleError);
  }
}

TEST_CASE("secular function at sqrt2 matches a 10^6 brute-force sum") {
  const auto& t = sqrt2_big();
  const CouplingConfig cfg{kPi / 2, 1e4};
  // numpy fsum over all n <= 10^6, hard truncation
  CHECK(std::abs(secular_lhs(0.5, t, cfg) - 6.5612454703220315) < 1e-3);
}

TEST_CASE("coupling constant at sqrt2 matches a 10^6 brute-force sum") {
  const auto& t = sqrt2_big();
  CHECK(coupling_rhs(CouplingConfig{0.0, 1e4}, t) == 0.0);
  const CouplingConfig cfg{kPi / 2, 1e4};
  // Brute-force sum over n <= 10^6 plus its own remainder pi (pi/2 - atan 10^6).
  const double brute = 4.796012403752241 + kPi * (kPi / 2 - std::atan(1e6));
  CHECK(std::abs(coupling_rhs(cfg, t) - brute) < 1e-6);
  // Same quantity summed to the full table ceiling.
  const CouplingConfig wide{kPi / 2, 1e6};
  CHECK(std::abs(coupling_rhs(cfg, t) - coupling_rhs(wide, t)) < 1e-6);
}

TEST_CASE("sqrt2 weak-coupling roots match a grid-scan reference") {
  const auto& t = sqrt2_big();
  const CouplingConfig cfg{kPi / 2, 1e4};
  const auto eigs = solve_new_eigenvalues(t, cfg, {0.0, 20.0});
  const double ref[] = {-0.27867529205055175, 0.43119793490441155, 1.0428592364286708,
                        1.7064131241725768,  3.1406973521956334,  4.086170079497273,
                        4.698726965256524,   5.369350077199697,   7.286688701337484,
                        7.857257310853305,   8.571156138027998,   10.491163552158673,
                        11.232558908653928,  12.103282612657722,  13.28557014797818,
                        13.83380435645977,   14.488933838648757,  17.593844558020827,
                        18.242053303922624,  18.926103088167654};
  REQUIRE(eigs.size() >= 20);
  CHECK(eigs[0].is_ground());
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(std::abs(eigs[i].lambda - ref[i]) < 1e-9);
  }
  // library grid-scan oracle on the same problem
  const auto scan = oracle::first_eigenvalues(t.geometry(), kPi / 2, 1e4, 20,
                                              TailMode::integral_correction);
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(std::abs(eigs[i].lambda - scan[i]) < 1e-6);
  }
}

TEST_CASE("golden ground and first root against an independent mpmath solve") {
  const auto& t = golden_small();
  const auto eigs = solve_new_eigenvalues(t, CouplingConfig{kPi / 2, 1e3}, {0.0, 1.0});
  REQUIRE(eigs.size() >= 2);
  CHECK(eigs[0].lambda == doctest::Approx(-0.28117941878296063).epsilon(1e-12));
  CHECK(eigs[1].lambda == doctest::Approx(0.41169197113815557).epsilon(1e-12));
}

TEST_CASE("roots interlace strictly and satisfy the equation") {
  const auto& t = golden_small();
  for (double phi : {0.0, kPi / 2, -kPi / 2, 2.8}) {
    const CouplingConfig cfg{phi, 1e3};
    const auto eigs = solve_new_eigenvalues(t, cfg, {0.0, 500.0});
    CHECK(first_interlacing_violation(eigs) == eigs.size());
    CHECK(eigs.size() == weyl_count(t, 500.0));
    const double c = coupling_rhs(cfg, t);
    for (const auto& e : eigs) {
      CHECK(e.lambda < e.m);
      CHECK(e.gap_to_m > 0);
      CHECK(e.residual <= 1e-6);
      if (phi == 0.0) {
        CHECK(std::abs(secular_lhs(e.spectral_value(), t, cfg)) <= 1e-6);
      } else {
        CHECK(std::abs(secular_lhs(e.spectral_value(), t, cfg) - c) <= 1e-6);
      }
    }
  }
}

TEST_CASE("serial and parallel solves agree") {
  const auto& t = golden_small();
  const CouplingConfig cfg{1.0, 1e3};
  SolverOptions s;
  s.exec = Exec::serial;
  const auto a = solve_new_eigenvalues(t, cfg, {0.0, 500.0}, s);
  const auto b = solve_new_eigenvalues(t, cfg, {0.0, 500.0});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].lambda == b[i].lambda);
}

TEST_CASE("doubling the tail cutoff barely moves the roots") {
  const auto t = build_norm_table(TorusGeometry::from_spec("golden"), 4e3);
  const auto a = solve_new_eigenvalues(t, CouplingConfig{kPi / 2, 2e3}, {0.0, 1e3});
  const auto b = solve_new_eigenvalues(t, CouplingConfig{kPi / 2, 4e3}, {0.0, 1e3});
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i].lambda - b[i].lambda));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("solver preconditions") {
  const auto& t = golden_small();
  CHECK_THROWS_AS(solve_new_eigenvalues(t, CouplingConfig{0.0, 1e3}, {0.0, 600.0}),
                  ConfigError);
  CHECK_THROWS_AS(solve_new_eigenvalues(t, CouplingConfig{0.0, 500.0}, {0.0, 400.0}),
                  ConfigError);
  CHECK_THROWS_AS(solve_new_eigenvalues(t, CouplingConfig{0.0, 2e3}, {0.0, 100.0}),
                  ConfigError);
}

TEST_CASE("strong coupling sequences") {
  const auto& t = golden_small();
  const auto mid = strong_coupling_sequence(t, Midpoint{}, 10.0);
  REQUIRE(mid.size() >= 2);
  CHECK(mid[0].lambda == doctest::Approx(t[1].n / 2));
  CHECK(mid[1].lambda == doctest::Approx((t[1].n + t[2].n) / 2));
  CHECK(first_interlacing_violation(mid) == mid.size());

  const auto s2 = build_norm_table(TorusGeometry::from_spec("sqrt2"), 1e3);
  double min_gap = 1e300;
  for (std::size_t i = 1; i < s2.size(); ++i) min_gap = std::min(min_gap, s2[i].n - s2[i - 1].n);
  const auto fixed = strong_coupling_sequence(s2, FixedOffset{min_gap / 2});
  CHECK(first_interlacing_violation(fixed) == fixed.size());
  for (const auto& e : fixed) CHECK(e.lambda == doctest::Approx(e.m - min_gap / 2));
  CHECK_THROWS_AS(strong_coupling_sequence(s2, FixedOffset{2 * min_gap}), ConfigError);

  const auto weak = solve_new_eigenvalues(t, CouplingConfig{kPi / 2, 1e3}, {0.0, 500.0});
  CustomList custom;
  for (const auto& e : weak) {
    if (!e.is_ground()) custom.lambdas.push_back(e.lambda);
  }
  const auto cl = strong_coupling_sequence(t, custom, 500.0);
  CHECK(cl.size() == custom.lambdas.size());
  custom.lambdas[3] = custom.lambdas[4];
  CHECK_THROWS_AS(strong_coupling_sequence(t, custom, 500.0), InterlacingError);
}
