#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace pscat {

// Working precision for gamma-dependent reals (sorting keys, oracles).
using Real = boost::multiprecision::cpp_bin_float_50;

inline constexpr int kMaxPrecisionDigits = 50;

// "golden", "sqrt2", or a decimal literal such as "1.61803".
Real parse_gamma(std::string_view spec);

// Best rational approximation p/q with q <= max_den that lies within tol of
// x, found from the continued-fraction convergents of x.
std::optional<std::pair<std::int64_t, std::int64_t>> near_rational(
    const Real& x, std::int64_t max_den, const Real& tol);

std::string to_string(const Real& x, int digits = kMaxPrecisionDigits);

}  // namespace pscat
