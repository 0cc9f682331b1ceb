#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "pscat/kernels.hpp"
#include "pscat/lattice.hpp"

using namespace pscat;
using namespace pscat::kernels;

namespace {

const NormTable& table() {
  static const NormTable t =
      build_norm_table(TorusGeometry::from_spec("golden"), 2e4);
  return t;
}

}  // namespace

TEST_CASE("pair counts: serial and parallel agree") {
  const auto& t = table();
  std::vector<double> ones(t.size(), 1.0);
  for (double X : {1e3, 5e3, 2e4}) {
    for (auto [b, c] : {std::pair{0.5, 1.5}, {1.0, 2.0}, {-3.0, -0.1}, {0.01, 0.02}}) {
      CHECK(pair_count_serial(t.norms(), t.multiplicities(), X, b, c) ==
            pair_count_parallel(t.norms(), t.multiplicities(), X, b, c));
      CHECK(pair_count_serial(t.norms(), ones, X, b, c) ==
            pair_count_parallel(t.norms(), ones, X, b, c));
    }
  }
}

TEST_CASE("pair counts on a hand-made list") {
  const std::vector<double> n{0.0, 1.0, 1.5, 4.0};
  const std::vector<double> w{1.0, 2.0, 2.0, 4.0};
  // differences in (0.4, 1.6): 1-0, 1.5-1, 1.5-0 (weights 2, 4, 2)
  CHECK(pair_count_serial(n, w, 10.0, 0.4, 1.6) == 8);
  CHECK(pair_count_parallel(n, w, 10.0, 0.4, 1.6) == 8);
  CHECK(pair_count_serial(n, w, 10.0, -1.6, -0.4) == 8);
  CHECK(pair_count_serial(n, w, 1.2, 0.4, 1.6) == 2);
}

TEST_CASE("inverse square sums: serial and parallel agree") {
  const auto& t = table();
  std::vector<std::size_t> q;
  for (std::size_t i = 5; i < t.count_le(5e3); i += 7) q.push_back(i);
  const auto s = inverse_square_sums_serial(t.norms(), q, 1e4);
  const auto p = inverse_square_sums_parallel(t.norms(), q, 1e4);
  REQUIRE(s.size() == p.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(p[i] == doctest::Approx(s[i]).epsilon(1e-12));
  }
  const std::vector<double> two{1.0, 4.0};
  const std::vector<std::size_t> one{0};
  CHECK(inverse_square_sums_serial(two, one, 10.0)[0] == doctest::Approx(1.0 / 9.0));
}

TEST_CASE("far pair sums: serial and parallel agree") {
  const auto& t = table();
  for (double A : {3.0, 10.0}) {
    const double s = far_pair_sum_serial(t.norms(), 5e3, A);
    CHECK(far_pair_sum_parallel(t.norms(), 5e3, A) == doctest::Approx(s).epsilon(1e-12));
  }
  const std::vector<double> n{0.0, 1.0, 5.0};
  // ordered pairs with |d| > 3: (0,5) and (1,5) both ways
  CHECK(far_pair_sum_serial(n, 10.0, 3.0) == doctest::Approx(2 * (1 / 25.0 + 1 / 16.0)));
}

TEST_CASE("neighbour counts: serial and parallel agree") {
  const auto& t = table();
  CHECK(neighbour_counts_serial(t.norms(), 1e4, 3.0) ==
        neighbour_counts_parallel(t.norms(), 1e4, 3.0));
  const std::vector<double> n{0.0, 1.0, 2.5, 10.0};
  const std::vector<int> expect{2, 3, 2, 1};
  CHECK(neighbour_counts_serial(n, 20.0, 1.5) == expect);
}

TEST_CASE("pole sums keep precision near a pole") {
  const std::vector<double> p{1.0, 2.0};
  const std::vector<double> w{1.0, 3.0};
  const SpectralValue x{2.0, -1e-20};
  const auto s = pole_sums(p, w, x);
  CHECK(s.first == doctest::Approx(3e20).epsilon(1e-12));
  CHECK(s.second == doctest::Approx(3e40).epsilon(1e-12));
  CHECK(pole_sum(p, w, SpectralValue{0.5, 0.0}) == doctest::Approx(2.0 + 2.0));
}
