#pragma once

// Exact integer and rational arithmetic used throughout the library, plus the
// handful of elementary helpers (floor division, integer square root, extended
// gcd) that the rest of the code leans on.

#include <boost/multiprecision/cpp_int.hpp>

#include <tuple>

namespace bqf {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

using boost::multiprecision::abs;
using boost::multiprecision::denominator;
using boost::multiprecision::gcd;
using boost::multiprecision::lcm;
using boost::multiprecision::numerator;

// Quotient rounded toward negative infinity.  b must be nonzero.
inline Int floor_div(const Int& a, const Int& b) {
    Int q = a / b;
    if (q * b != a && ((a < 0) != (b < 0))) --q;
    return q;
}

// Canonical remainder in [0, |b|).  b must be nonzero.
inline Int mod_floor(const Int& a, const Int& b) {
    Int r = a % b;
    if (r < 0) r += abs(b);
    return r;
}

// Floor of the square root.  n must be nonnegative.
inline Int isqrt(const Int& n) { return boost::multiprecision::sqrt(n); }

inline bool is_square(const Int& n) {
    if (n < 0) return false;
    Int r = isqrt(n);
    return r * r == n;
}

// (g, u, v) with u*a + v*b == g == gcd(a, b) >= 0.
inline std::tuple<Int, Int, Int> ext_gcd(Int a, Int b) {
    Int u0 = 1, v0 = 0, u1 = 0, v1 = 1;
    while (b != 0) {
        Int q = floor_div(a, b);
        Int t;
        t = a - q * b;
        a = b;
        b = t;
        t = u0 - q * u1;
        u0 = u1;
        u1 = t;
        t = v0 - q * v1;
        v0 = v1;
        v1 = t;
    }
    if (a < 0) {
        a = -a;
        u0 = -u0;
        v0 = -v0;
    }
    return {a, u0, v0};
}

// base^exp mod m, with base first reduced into [0, m).  exp >= 0, m > 0.
inline Int pow_mod(const Int& base, const Int& exp, const Int& m) {
    if (m == 1) return 0;
    return boost::multiprecision::powm(mod_floor(base, m), exp, m);
}

inline int sgn(const Int& n) { return n < 0 ? -1 : (n > 0 ? 1 : 0); }

}  // namespace bqf
