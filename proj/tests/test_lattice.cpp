#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <sstream>

#include "pscat/errors.hpp"
#include "pscat/lattice.hpp"
#include "pscat/oracle.hpp"

using namespace pscat;

TEST_CASE("geometry rejects rational and non-positive gamma") {
  CHECK_THROWS_AS(TorusGeometry(Real(2)), ConfigError);
  CHECK_THROWS_AS(TorusGeometry(Real(3) / 2), ConfigError);
  CHECK_THROWS_AS(TorusGeometry(Real(-1)), ConfigError);
  CHECK_THROWS_AS(TorusGeometry(parse_gamma("golden"), 10), ConfigError);
  CHECK_NOTHROW(TorusGeometry::from_spec("golden"));
}

TEST_CASE("norm form and angle") {
  const auto g = TorusGeometry::from_spec("sqrt2");
  const double a2 = std::pow(2.0, 0.25);
  CHECK(g.a2_d() == doctest::Approx(a2).epsilon(1e-15));
  CHECK(g.norm(3, 2) == doctest::Approx(9 / a2 + 4 * a2).epsilon(1e-15));
  CHECK(static_cast<double>(g.norm_hp(3, 2)) ==
        doctest::Approx(g.norm(3, 2)).epsilon(1e-15));
  CHECK(g.angle(1, 0) == 0.0);
  CHECK(g.angle(0, 1) == doctest::Approx(std::numbers::pi / 2));
  CHECK(g.angle(1, 1) == doctest::Approx(std::atan2(std::sqrt(a2), 1 / std::sqrt(a2))));
}

TEST_CASE("empty ceiling holds only the origin") {
  const auto t = build_norm_table(TorusGeometry::from_spec("golden"), 0.0);
  REQUIRE(t.size() == 1);
  CHECK(t[0].k == 0);
  CHECK(t[0].l == 0);
  CHECK(t[0].n == 0.0);
  CHECK(t[0].r == 1);
  CHECK(weyl_count(t, 0.0) == 1);
}

TEST_CASE("origin first, axis multiplicity 2, interior 4") {
  const auto t = build_norm_table(TorusGeometry::from_spec("golden"), 500.0);
  CHECK(t[0].r == 1);
  for (std::size_t i = 1; i < t.size(); ++i) {
    const auto& it = t[i];
    CHECK(it.r == ((it.k == 0 || it.l == 0) ? 2 : 4));
    CHECK(t[i - 1].n < it.n);
  }
}

TEST_CASE("sqrt2 table at X=10 equals the brute-force enumeration") {
  const auto g = TorusGeometry::from_spec("sqrt2");
  const auto t = build_norm_table(g, 10.0);
  const auto ref = oracle::distinct_norms(g, 10.0);
  REQUIRE(t.size() == ref.size());
  REQUIRE(t.size() == 11);  // independent numpy enumeration
  const int r_ref[] = {1, 2, 2, 4, 2, 4, 2, 4, 2, 4, 4};
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(t[i].r == ref[i].r);
    CHECK(t[i].r == r_ref[i]);
    CHECK(t[i].n == doctest::Approx(ref[i].n).epsilon(1e-15));
  }
  CHECK(t[1].n == doctest::Approx(0.840896415253715).epsilon(1e-14));
}

TEST_CASE("weyl_count against brute force") {
  const auto g = TorusGeometry::from_spec("sqrt2");
  const auto t = build_norm_table(g, 100.0);
  CHECK(weyl_count(t, 100.0) == 90);
  CHECK(weyl_count(t, 100.0) == oracle::distinct_norms(g, 100.0).size());
  CHECK_THROWS_AS(weyl_count(t, 101.0), RangeError);

  const auto gold = TorusGeometry::from_spec("golden");
  CHECK(weyl_count(build_norm_table(gold, 1e3), 1e3) == 818);
}

TEST_CASE("no near collisions between distinct items") {
  const auto t = build_norm_table(TorusGeometry::from_spec("golden"), 2e4);
  for (std::size_t i = 1; i < t.size(); ++i) {
    CHECK(t.norm_hp(i) - t.norm_hp(i - 1) > Real("1e-30"));
  }
}

TEST_CASE("exp_sum_w matches direct summation") {
  const auto g = TorusGeometry::from_spec("sqrt2");
  const auto t = build_norm_table(g, 50.0);
  const std::size_t i = t.find(1, 1);
  REQUIRE(i < t.size());
  const double a = g.a_d();
  std::complex<double> s = 0.0;
  for (int sx : {-1, 1}) {
    for (int sy : {-1, 1}) {
      const std::complex<double> u(sx / a, sy * a);
      s += std::pow(u / std::abs(u), 2);
    }
  }
  CHECK(exp_sum_w(t[i], 2) == doctest::Approx(s.real()).epsilon(1e-14));
  CHECK(std::abs(s.imag()) < 1e-14);
  for (const auto& it : t) {
    CHECK(exp_sum_w(it, 0) == it.r);
    CHECK(exp_sum_w(it, 3) == 0.0);
    CHECK(exp_sum_w(it, 7) == 0.0);
  }
  CHECK(exp_sum_w(t[0], 4) == 1.0);
}

TEST_CASE("capacity cap is enforced") {
  NormTableOptions opt;
  opt.memory_cap = 100;
  CHECK_THROWS_AS(build_norm_table(TorusGeometry::from_spec("golden"), 1e4, opt),
                  CapacityError);
}

TEST_CASE("binary cache round-trips and csv has one row per item") {
  const auto g = TorusGeometry::from_spec("golden");
  const auto dir = std::filesystem::temp_directory_path() / "pscat_cache_test";
  std::filesystem::remove_all(dir);
  const auto a = load_or_build(g, 300.0, dir);
  REQUIRE(std::filesystem::exists(cache_path(dir, g, 300.0)));
  const auto b = load_or_build(g, 300.0, dir);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].n == b[i].n);
    CHECK(a[i].k == b[i].k);
    CHECK(a.norm_hp(i) == b.norm_hp(i));
  }
  CHECK_THROWS(load_binary(TorusGeometry::from_spec("sqrt2"), cache_path(dir, g, 300.0)));
  std::ostringstream os;
  write_csv(a, os);
  std::size_t lines = 0;
  for (char c : os.str()) lines += c == '\n';
  CHECK(lines == a.size() + 1);
  std::filesystem::remove_all(dir);
}
