#include "pscat/precision.hpp"

#include <cctype>

#include "pscat/errors.hpp"

namespace pscat {

Real parse_gamma(std::string_view spec) {
  if (spec == "golden" || spec == "phi") {
    return (Real(1) + boost::multiprecision::sqrt(Real(5))) / 2;
  }
  if (spec == "sqrt2") {
    return boost::multiprecision::sqrt(Real(2));
  }
  if (spec.empty()) throw ConfigError("empty gamma specification");
  bool seen_digit = false;
  for (char c : spec) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      seen_digit = true;
    } else if (c != '.' && c != 'e' && c != 'E' && c != '-' && c != '+') {
      throw ConfigError("gamma must be golden, sqrt2 or a decimal literal: " +
                        std::string(spec));
    }
  }
  if (!seen_digit) throw ConfigError("malformed gamma literal");
  try {
    return Real(std::string(spec));
  } catch (const std::exception&) {
    throw ConfigError("malformed gamma literal: " + std::string(spec));
  }
}

std::optional<std::pair<std::int64_t, std::int64_t>> near_rational(
    const Real& x, std::int64_t max_den, const Real& tol) {
  // Convergents h/k of the continued fraction of x.
  Real rest = x;
  std::int64_t h_prev = 1, h = 0;
  std::int64_t k_prev = 0, k = 1;
  {
    Real ip = boost::multiprecision::floor(rest);
    h = static_cast<std::int64_t>(ip);
    h_prev = 1;
    k = 1;
    k_prev = 0;
    rest -= ip;
  }
  for (int iter = 0; iter < 200; ++iter) {
    if (boost::multiprecision::abs(x - Real(h) / Real(k)) <= tol) {
      return std::make_pair(h, k);
    }
    if (rest == 0) break;
    rest = 1 / rest;
    Real ip = boost::multiprecision::floor(rest);
    if (ip > Real(max_den)) break;
    const auto q = static_cast<std::int64_t>(ip);
    const std::int64_t h_next = q * h + h_prev;
    const std::int64_t k_next = q * k + k_prev;
    if (k_next > max_den) break;
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
    rest -= ip;
  }
  return std::nullopt;
}

std::string to_string(const Real& x, int digits) {
  return x.str(digits, std::ios_base::scientific);
}

}  // namespace pscat
