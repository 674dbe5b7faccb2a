#pragma once

// Elementary number theory: factorization, Kronecker symbol, modular square
// roots, the cubic-residue test, and fundamental-discriminant extraction.
// Everything is deterministic; public interfaces are sized for inputs up to
// 2^63 - 1 but computed in arbitrary precision throughout.

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "integers.hpp"

namespace bqf {

// A certified prime factorization: value == product of prime^exponent with
// primes strictly increasing.
struct Factorization {
    Int value = 1;
    std::vector<std::pair<Int, unsigned>> factors;

    Int recompose() const {
        Int m = 1;
        for (const auto& [p, e] : factors)
            for (unsigned i = 0; i < e; ++i) m *= p;
        return m;
    }

    unsigned exponent_of(const Int& p) const {
        for (const auto& [q, e] : factors)
            if (q == p) return e;
        return 0;
    }
};

// Deterministic Miller-Rabin.  The base set decides correctly for all inputs
// below 2^64; beyond that it is a strong probable-prime test, which is more
// than the desk scale here ever exercises.
inline bool is_prime(const Int& n) {
    if (n < 2) return false;
    for (int p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    Int d = n - 1;
    unsigned s = 0;
    while (d % 2 == 0) {
        d /= 2;
        ++s;
    }
    for (int a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        Int x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (unsigned i = 1; i < s; ++i) {
            x = x * x % n;
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

namespace detail {

// Pollard rho (Brent's cycle finding) with a fixed polynomial-offset schedule
// so repeated runs split identically.  Returns a nontrivial factor or 0 when
// the effort budget is exhausted.
inline Int pollard_rho(const Int& n) {
    if (n % 2 == 0) return 2;
    for (Int c = 1; c <= 40; ++c) {
        Int x = 2, y = 2, d = 1;
        Int q = 1;
        long iterations = 0;
        const long cap = 1L << 21;
        while (d == 1 && iterations < cap) {
            // Batch gcds: accumulate |x - y| products and test every 64 steps.
            for (int i = 0; i < 64 && iterations < cap; ++i, ++iterations) {
                x = (x * x + c) % n;
                y = (y * y + c) % n;
                y = (y * y + c) % n;
                q = q * abs(x - y) % n;
                if (q == 0) {
                    // Overshot: redo this block one step at a time.
                    q = 1;
                    d = gcd(abs(x - y), n);
                    break;
                }
            }
            if (d == 1) d = gcd(q, n);
        }
        if (d != 1 && d != n) return d;
    }
    return 0;
}

inline void factor_into(Int m, std::vector<Int>& primes) {
    if (m == 1) return;
    if (is_prime(m)) {
        primes.push_back(m);
        return;
    }
    Int d = pollard_rho(m);
    if (d == 0) fail(errc::factorization_incomplete, "cannot split cofactor " + m.str());
    factor_into(d, primes);
    factor_into(m / d, primes);
}

}  // namespace detail

// Deterministic factorization: trial division up to 10^6, then Pollard rho
// with a fixed seed schedule and an effort cap.
inline Factorization factor(const Int& m) {
    require(m >= 1, errc::invalid_input, "factor requires m >= 1, got " + m.str());
    Factorization out;
    out.value = m;
    Int rest = m;
    std::vector<Int> primes;
    for (Int p = 2; p <= 1000000 && p * p <= rest; p += (p == 2 ? 1 : 2)) {
        while (rest % p == 0) {
            primes.push_back(p);
            rest /= p;
        }
    }
    if (rest > 1) {
        if (rest <= Int(1000000) * 1000000) {
            primes.push_back(rest);  // no divisor below its square root
        } else {
            detail::factor_into(rest, primes);
        }
    }
    std::sort(primes.begin(), primes.end());
    for (const Int& p : primes) {
        if (!out.factors.empty() && out.factors.back().first == p)
            ++out.factors.back().second;
        else
            out.factors.emplace_back(p, 1);
    }
    return out;
}

// Kronecker symbol (a|n) for n >= 1: the Legendre symbol at odd primes,
// extended to 2 by (a|2) = 0, +1, -1 for a even, a = ±1, a = ±3 mod 8, and to
// composites by complete multiplicativity.
inline int kronecker(const Int& a_in, const Int& n_in) {
    require(n_in >= 1, errc::invalid_input, "kronecker requires n >= 1, got " + n_in.str());
    Int a = a_in, n = n_in;
    int result = 1;
    if (n % 2 == 0) {
        if (a % 2 == 0) return 0;
        unsigned v = 0;
        while (n % 2 == 0) {
            n /= 2;
            ++v;
        }
        Int a8 = mod_floor(a, 8);
        if (v % 2 == 1 && (a8 == 3 || a8 == 5)) result = -result;
    }
    // Jacobi symbol (a|n) for odd n via quadratic reciprocity.
    a = mod_floor(a, n);
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            Int n8 = n % 8;
            if (n8 == 3 || n8 == 5) result = -result;
        }
        std::swap(a, n);
        if (a % 4 == 3 && n % 4 == 3) result = -result;
        a = mod_floor(a, n);
    }
    return n == 1 ? result : 0;
}

// Tonelli-Shanks.  Returns the smaller of the two square roots of a mod p, or
// absent when a is not a residue.  p must be an odd prime.
inline std::optional<Int> sqrt_mod(const Int& a_in, const Int& p) {
    require(p >= 3 && p % 2 == 1, errc::invalid_input, "sqrt_mod requires an odd prime modulus");
    Int a = mod_floor(a_in, p);
    if (a == 0) return Int(0);
    if (pow_mod(a, (p - 1) / 2, p) != 1) return std::nullopt;
    Int r;
    if (p % 4 == 3) {
        r = pow_mod(a, (p + 1) / 4, p);
    } else {
        Int q = p - 1;
        unsigned s = 0;
        while (q % 2 == 0) {
            q /= 2;
            ++s;
        }
        Int z = 2;
        while (pow_mod(z, (p - 1) / 2, p) != p - 1) ++z;  // smallest non-residue
        Int c = pow_mod(z, q, p);
        Int t = pow_mod(a, q, p);
        r = pow_mod(a, (q + 1) / 2, p);
        unsigned m = s;
        while (t != 1) {
            Int t2 = t;
            unsigned i = 0;
            while (t2 != 1) {
                t2 = t2 * t2 % p;
                ++i;
            }
            Int b = c;
            for (unsigned j = 0; j + i + 1 < m; ++j) b = b * b % p;
            m = i;
            c = b * b % p;
            t = t * c % p;
            r = r * b % p;
        }
    }
    Int other = p - r;
    return std::min(r, other);
}

// True iff a is a cube mod p, tested as a^((p-1)/3) == 1.  Requires a prime
// p = 1 mod 3 not dividing a.
inline bool is_cubic_residue(const Int& a, const Int& p) {
    require(p % 3 == 1, errc::invalid_input, "cubic residue test requires p = 1 mod 3, got " + p.str());
    require(mod_floor(a, p) != 0, errc::invalid_input, "cubic residue test requires gcd(a, p) = 1");
    return pow_mod(a, (p - 1) / 3, p) == 1;
}

// Splits a discriminant as D = f^2 * d_K with d_K fundamental.  Requires
// D < 0 and D = 0 or 1 mod 4.
inline std::pair<Int, Int> fundamental_discriminant(const Int& D) {
    require(D < 0, errc::invalid_discriminant, "discriminant must be negative, got " + D.str());
    Int r = mod_floor(D, 4);
    require(r == 0 || r == 1, errc::invalid_discriminant,
            "discriminant must be 0 or 1 mod 4, got " + D.str());
    Factorization fac = factor(-D);
    Int squarefree = 1, t = 1;
    for (const auto& [p, e] : fac.factors) {
        if (e % 2 == 1) squarefree *= p;
        for (unsigned i = 0; i < e / 2; ++i) t *= p;
    }
    Int d0 = -squarefree;
    if (mod_floor(d0, 4) == 1) return {d0, t};
    check_internal(t % 2 == 0, "non-fundamental part must be even when d0 = 2,3 mod 4");
    return {4 * d0, t / 2};
}

}  // namespace bqf
