#pragma once

// Constructive decomposition of proper integral ideals: prime parts for the
// primes coprime to the conductor, halved inert principal parts, and one
// prime-power-norm part per conductor prime, peeled through the next order up.

#include <utility>
#include <vector>

#include "errors.hpp"
#include "intmath.hpp"
#include "orders.hpp"

namespace bqf {

struct IdealDecomposition {
    DiscContext ctx;
    // Prime-norm ideals with exponents, split primes before their conjugates.
    std::vector<std::pair<OrderIdeal, unsigned>> split_ramified;
    // Inert primes q contribute (q O)^(e/2); stored as (q, e/2).
    std::vector<std::pair<Int, unsigned>> inert;
    // One (l, c) per conductor prime actually present, with N(c) = l^h.
    std::vector<std::pair<Int, OrderIdeal>> conductor_parts;
};

inline Int integral_norm(const OrderIdeal& ideal) {
    Rat norm = ideal_norm(ideal);
    check_internal(denominator(norm) == 1, "integral ideals have integer norm");
    return numerator(norm);
}

inline OrderIdeal principal_scalar(const DiscContext& ctx, const Int& n) {
    OrderIdeal unit = unit_ideal(ctx);
    return make_order_ideal(ctx, Rat(n), unit.a, unit.b);
}

// Prime factorization in a maximal order by iterated divisibility: for each
// prime ideal above p, divide as long as it contains the remainder.  Inert
// primes must occur to even exponents; they are divided out as p O.
inline IdealDecomposition decompose_maximal(const OrderIdeal& ideal) {
    require(ideal.ctx.is_maximal(), errc::invalid_input,
            "maximal-order decomposition needs conductor 1");
    require(ideal.is_integral(), errc::not_integral, "only integral ideals decompose");
    IdealDecomposition out{ideal.ctx, {}, {}, {}};
    OrderIdeal cur = ideal;
    for (const auto& [p, e] : factor(integral_norm(ideal)).factors) {
        if (kronecker(ideal.ctx.D, p) == -1) {
            require(e % 2 == 0, errc::odd_inert_exponent,
                    "inert prime " + p.str() + " appears to odd exponent");
            OrderIdeal scalar = principal_scalar(ideal.ctx, p);
            for (unsigned i = 0; i < e / 2; ++i) {
                check_internal(ideal_contains(scalar, cur), "inert prime must divide the ideal");
                cur = ideal_div(cur, scalar);
                check_internal(cur.is_integral(), "ideal quotient must stay integral");
            }
            out.inert.emplace_back(p, e / 2);
        } else {
            for (const OrderIdeal& prime : prime_ideals_above(ideal.ctx, p)) {
                unsigned k = 0;
                while (ideal_contains(prime, cur)) {
                    cur = ideal_div(cur, prime);
                    check_internal(cur.is_integral(), "ideal quotient must stay integral");
                    ++k;
                }
                if (k > 0) out.split_ramified.emplace_back(prime, k);
            }
        }
    }
    check_internal(cur == unit_ideal(ideal.ctx), "all prime factors accounted for");
    return out;
}

// Decomposition of an ideal prime to the conductor: extend to the maximal
// order, factor there, contract every factor back.
inline IdealDecomposition decompose_coprime(const OrderIdeal& ideal) {
    require(ideal_is_proper(ideal), errc::not_proper, "only proper ideals decompose");
    require(ideal.is_integral(), errc::not_integral, "only integral ideals decompose");
    require(gcd(integral_norm(ideal), ideal.ctx.f) == 1, errc::not_coprime,
            "norm shares a factor with the conductor");
    DiscContext maximal = DiscContext::make(ideal.ctx.dK);
    IdealDecomposition upstairs = decompose_maximal(extend(ideal, maximal));
    IdealDecomposition out{ideal.ctx, {}, std::move(upstairs.inert), {}};
    for (const auto& [prime, e] : upstairs.split_ramified) {
        out.split_ramified.emplace_back(contract(prime, ideal.ctx), e);
    }
    return out;
}

// Splits off the l-part: A = B * C with N(B) prime to l and N(C) = l^h.  B is
// found by extending to the order whose conductor drops every factor of l
// (where l splits into genuine prime ideals), stripping those, and
// contracting; C is the exact quotient.
inline std::pair<OrderIdeal, OrderIdeal> split_conductor(const OrderIdeal& ideal, const Int& l) {
    require(ideal_is_proper(ideal), errc::not_proper, "only proper ideals split");
    require(ideal.is_integral(), errc::not_integral, "only integral ideals split");
    require(is_prime(l), errc::invalid_input, "conductor part must be prime, got " + l.str());
    require(ideal.ctx.f % l == 0, errc::not_conductor_prime,
            l.str() + " does not divide the conductor " + ideal.ctx.f.str());
    Int norm = integral_norm(ideal);
    Int coprime_norm = norm;
    while (coprime_norm % l == 0) coprime_norm /= l;
    if (coprime_norm == norm) return {ideal, unit_ideal(ideal.ctx)};

    Int fprime = ideal.ctx.f;
    while (fprime % l == 0) fprime /= l;
    DiscContext up = DiscContext::make(ideal.ctx.dK * fprime * fprime);
    OrderIdeal stripped = extend(ideal, up);
    while (integral_norm(stripped) % l == 0) {
        bool progressed = false;
        if (kronecker(up.D, l) >= 0) {
            for (const OrderIdeal& prime : prime_ideals_above(up, l)) {
                if (ideal_contains(prime, stripped)) {
                    stripped = ideal_div(stripped, prime);
                    progressed = true;
                    break;
                }
            }
        } else {
            OrderIdeal scalar = principal_scalar(up, l);
            if (ideal_contains(scalar, stripped)) {
                stripped = ideal_div(stripped, scalar);
                progressed = true;
            }
        }
        check_internal(progressed && stripped.is_integral(),
                       "the l-part upstairs is a product of primes above l");
    }
    check_internal(integral_norm(stripped) == coprime_norm,
                   "stripping leaves exactly the prime-to-l norm");
    OrderIdeal b = contract(stripped, ideal.ctx);
    OrderIdeal c = ideal_div(ideal, b);
    check_internal(c.is_integral(), "conductor part must be integral");
    check_internal(integral_norm(c) * coprime_norm == norm, "norm bookkeeping");
    return {b, c};
}

// Full decomposition: peel one conductor prime at a time (ascending), then
// factor the remaining prime-to-conductor ideal.
inline IdealDecomposition decompose_order_ideal(const OrderIdeal& ideal) {
    require(ideal_is_proper(ideal), errc::not_proper, "only proper ideals decompose");
    require(ideal.is_integral(), errc::not_integral, "only integral ideals decompose");
    std::vector<std::pair<Int, OrderIdeal>> parts;
    OrderIdeal cur = ideal;
    for (const auto& [l, e] : ideal.ctx.f_factors.factors) {
        (void)e;
        auto [b, c] = split_conductor(cur, l);
        if (integral_norm(c) != 1) parts.emplace_back(l, c);
        cur = b;
    }
    IdealDecomposition out = decompose_coprime(cur);
    out.conductor_parts = std::move(parts);
    return out;
}

inline OrderIdeal recompose(const IdealDecomposition& parts) {
    OrderIdeal out = unit_ideal(parts.ctx);
    for (const auto& [prime, e] : parts.split_ramified) {
        out = ideal_mul(out, ideal_pow(prime, e));
    }
    for (const auto& [q, half] : parts.inert) {
        Int scalar = 1;
        for (unsigned i = 0; i < half; ++i) scalar *= q;
        out = ideal_mul(out, principal_scalar(parts.ctx, scalar));
    }
    for (const auto& [l, part] : parts.conductor_parts) {
        (void)l;
        out = ideal_mul(out, part);
    }
    return out;
}

}  // namespace bqf
