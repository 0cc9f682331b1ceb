#include <doctest.h>

#include "pscat/errors.hpp"
#include "pscat/precision.hpp"

using namespace pscat;

TEST_CASE("parse_gamma accepts named constants and decimals") {
  const Real golden = parse_gamma("golden");
  CHECK(abs(golden * golden - golden - 1) < Real("1e-45"));
  const Real s2 = parse_gamma("sqrt2");
  CHECK(abs(s2 * s2 - 2) < Real("1e-45"));
  CHECK(parse_gamma("1.25") == Real("1.25"));
  CHECK_THROWS_AS(parse_gamma("not-a-number"), ConfigError);
}

TEST_CASE("near_rational finds convergents within tolerance") {
  const Real tol("1e-30");
  auto q = near_rational(Real(3) / 7, 100, tol);
  REQUIRE(q.has_value());
  CHECK(q->first == 3);
  CHECK(q->second == 7);
  CHECK_FALSE(near_rational(parse_gamma("golden"), 1'000'000, tol).has_value());
  CHECK_FALSE(near_rational(parse_gamma("sqrt2"), 1'000'000, tol).has_value());
}

TEST_CASE("to_string prints the requested digits") {
  const std::string s = to_string(Real(1) / 3, 20);
  CHECK(s.rfind("3.333333333", 0) == 0);
  CHECK(s.find("e-01") != std::string::npos);
}
