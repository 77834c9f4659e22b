#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace asep {

// All arithmetic in this project is exact. Rat is always kept in lowest
// terms with a positive denominator (GMP canonicalizes on assignment);
// zero is 0/1.
using Int = boost::multiprecision::mpz_int;
using Rat = boost::multiprecision::mpq_rational;

inline Int numer(const Rat& q) { return boost::multiprecision::numerator(q); }
inline Int denom(const Rat& q) { return boost::multiprecision::denominator(q); }

// Renders "p/q" including unit denominators ("0/1", "3/1"), so that every
// serialized value has exactly one spelling.
inline std::string rat_to_string(const Rat& q) {
  return numer(q).str() + "/" + denom(q).str();
}

// Accepts "p" or "p/q" with q > 0; the result is canonicalized.
inline Rat parse_rat(std::string_view s) {
  if (s.empty()) throw std::invalid_argument("empty rational");
  auto slash = s.find('/');
  try {
    if (slash == std::string_view::npos) {
      return Rat(Int(std::string(s)));
    }
    Int p{std::string(s.substr(0, slash))};
    Int q{std::string(s.substr(slash + 1))};
    if (q <= 0) throw std::invalid_argument("rational with nonpositive denominator: " + std::string(s));
    Rat r(p, q);
    return r;
  } catch (const std::runtime_error& e) {
    throw std::invalid_argument("bad rational '" + std::string(s) + "': " + e.what());
  }
}

inline Int int_lcm(const Int& a, const Int& b) {
  if (a == 0 || b == 0) return 0;
  return a / boost::multiprecision::gcd(a, b) * b;
}

// LCM of denominators over a vector; 1 for an empty vector.
inline Int common_denominator(const std::vector<Rat>& v) {
  Int l = 1;
  for (const Rat& q : v) l = int_lcm(l, denom(q));
  return l;
}

inline Int factorial(int n) {
  Int f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

inline double rat_to_double(const Rat& q) {
  return boost::multiprecision::mpq_rational(q).convert_to<double>();
}

}  // namespace asep
