#pragma once

// Imaginary quadratic orders and their fractional ideals.  An order of
// discriminant D < 0 is O = Z + Zw with w = (D + sqrt(D))/2, so that
// w^2 = D*w - (D^2 - D)/4.  Every ideal here is a rank-2 lattice
// scale * <a, (-b + sqrt(D))/2> held in the canonical shape
//   scale positive rational, a positive integer, b in (-a, a],
//   b^2 = D mod 4a,
// and all lattice work happens on 2x2 row bases over {1, w}.

#include <array>
#include <ostream>
#include <sstream>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "forms.hpp"
#include "intmath.hpp"

namespace bqf {

// The discriminant D = f^2 * d_K of an order together with its conductor
// factorization; carried by every ideal so mixed-order arithmetic is caught.
struct DiscContext {
    Int D;
    Int dK;
    Int f;
    Factorization f_factors;

    static DiscContext make(const Int& D) {
        auto [dk, f] = fundamental_discriminant(D);
        return {D, dk, f, factor(f)};
    }

    bool is_maximal() const { return f == 1; }

    friend bool operator==(const DiscContext& x, const DiscContext& y) { return x.D == y.D; }
    friend bool operator!=(const DiscContext& x, const DiscContext& y) { return x.D != y.D; }
};

struct OrderIdeal {
    DiscContext ctx;
    Rat scale;
    Int a;
    Int b;

    // The generator (-b + sqrt(D))/2 written over {1, w} is u + w with
    // u = (-b - D)/2.
    Int u() const { return (-b - ctx.D) / 2; }

    bool is_integral() const { return denominator(scale) == 1; }

    friend bool operator==(const OrderIdeal& x, const OrderIdeal& y) {
        return x.ctx == y.ctx && x.scale == y.scale && x.a == y.a && x.b == y.b;
    }
    friend std::ostream& operator<<(std::ostream& os, const OrderIdeal& ideal) {
        os << ideal.ctx.D << ":" << numerator(ideal.scale);
        if (denominator(ideal.scale) != 1) os << "/" << denominator(ideal.scale);
        return os << ":" << ideal.a << ":" << ideal.b;
    }
};

namespace detail {

// Normalizes b into (-a, a] preserving its class mod 2a.
inline Int normalize_b(const Int& b, const Int& a) {
    Int r = mod_floor(b, 2 * a);
    if (r > a) r -= 2 * a;
    return r;
}

// A row (x, y) denotes the element x + y*w.
using Row = std::array<Int, 2>;

// Product of two elements over {1, w}, using w^2 = D*w - (D^2 - D)/4.
inline Row mul_rows(const Row& lhs, const Row& rhs, const Int& D) {
    Int wnorm = (D * D - D) / 4;
    return {lhs[0] * rhs[0] - lhs[1] * rhs[1] * wnorm,
            lhs[0] * rhs[1] + lhs[1] * rhs[0] + lhs[1] * rhs[1] * D};
}

// Hermite shape (A, 0), (B, C) of the lattice spanned by the given rows:
// A, C > 0 and 0 <= B < A.  The span must have full rank.
inline std::array<Int, 3> hnf_rows(const std::vector<Row>& rows) {
    Int B = 0, C = 0;
    std::vector<Int> xs;
    for (const Row& row : rows) {
        if (row[1] == 0) {
            xs.push_back(row[0]);
            continue;
        }
        if (C == 0) {
            B = row[0];
            C = row[1];
            continue;
        }
        auto [g, s, t] = ext_gcd(C, row[1]);
        xs.push_back((C / g) * row[0] - (row[1] / g) * B);
        B = s * B + t * row[0];
        C = g;
    }
    check_internal(C != 0, "lattice rows span a rank-deficient sublattice");
    if (C < 0) {
        C = -C;
        B = -B;
    }
    Int A = 0;
    for (const Int& x : xs) A = gcd(A, x);
    check_internal(A != 0, "lattice rows span a rank-deficient sublattice");
    B = mod_floor(B, A);
    return {A, B, C};
}

// Basis rows of {v in Z^m : v * N = 0} for an m x 2 integer matrix N, by
// integer row reduction with a tracked unimodular transform.
inline std::vector<std::vector<Int>> integer_kernel(std::vector<Row> n) {
    const std::size_t m = n.size();
    std::vector<std::vector<Int>> u(m, std::vector<Int>(m, 0));
    for (std::size_t i = 0; i < m; ++i) u[i][i] = 1;
    std::size_t pivots = 0;
    for (int col = 0; col < 2; ++col) {
        std::size_t target = m;
        for (std::size_t i = pivots; i < m; ++i) {
            if (n[i][col] == 0) continue;
            if (target == m) {
                target = i;
                continue;
            }
            auto [g, s, t] = ext_gcd(n[target][col], n[i][col]);
            Int ct = n[target][col] / g, ci = n[i][col] / g;
            for (int c = 0; c < 2; ++c) {
                Int nt = s * n[target][c] + t * n[i][c];
                Int ni = ct * n[i][c] - ci * n[target][c];
                n[target][c] = nt;
                n[i][c] = ni;
            }
            for (std::size_t c = 0; c < m; ++c) {
                Int ut = s * u[target][c] + t * u[i][c];
                Int ui = ct * u[i][c] - ci * u[target][c];
                u[target][c] = ut;
                u[i][c] = ui;
            }
        }
        if (target != m) {
            std::swap(n[target], n[pivots]);
            std::swap(u[target], u[pivots]);
            ++pivots;
        }
    }
    return {u.begin() + pivots, u.end()};
}

// Intersection of two full-rank integer lattices given by basis rows, via the
// kernel of the stacked system [B2 * adj(B1); det(B1) * I]: a row y lies in
// the kernel's projection exactly when y * B2 lands in both lattices.
inline std::array<Int, 3> intersect_lattices(const std::array<Int, 3>& h1,
                                             const std::array<Int, 3>& h2) {
    const auto& [a1, b1, c1] = h1;
    const auto& [a2, b2, c2] = h2;
    Int det1 = a1 * c1;
    // adj of [[a1, 0], [b1, c1]] is [[c1, 0], [-b1, a1]].
    Row m1 = {a2 * c1, 0};
    Row m2 = {b2 * c1 - c2 * b1, c2 * a1};
    std::vector<Row> stacked = {m1, m2, {det1, 0}, {0, det1}};
    std::vector<std::vector<Int>> kernel = integer_kernel(stacked);
    check_internal(kernel.size() == 2, "lattice intersection kernel must have rank 2");
    std::vector<Row> rows;
    for (const auto& k : kernel) {
        // y = (k[0], k[1]); the intersection vector is y * B2.
        rows.push_back({k[0] * a2 + k[1] * b2, k[1] * c2});
    }
    return hnf_rows(rows);
}

}  // namespace detail

// Validated canonical constructor.
inline OrderIdeal make_order_ideal(const DiscContext& ctx, const Rat& scale, const Int& a,
                                   const Int& b_in) {
    require(scale > 0, errc::invalid_input, "ideal scale must be positive");
    require(a > 0, errc::invalid_input, "ideal leading entry must be positive");
    Int b = detail::normalize_b(b_in, a);
    require(mod_floor(b * b - ctx.D, 4 * a) == 0, errc::invalid_input,
            "ideal parameters need b^2 = D mod 4a; got a=" + a.str() + ", b=" + b.str() +
                " for D=" + ctx.D.str());
    return OrderIdeal{ctx, scale, a, b};
}

inline OrderIdeal unit_ideal(const DiscContext& ctx) {
    return make_order_ideal(ctx, 1, 1, mod_floor(ctx.D, 2));
}

// Rebuilds the canonical (scale, a, b) shape from a Hermite basis
// (A, 0), (B, C) scaled by s.  The basis must be closed under w.
inline OrderIdeal ideal_from_hnf(const DiscContext& ctx, const Rat& s,
                                 const std::array<Int, 3>& h) {
    const auto& [A, B, C] = h;
    check_internal(A % C == 0 && B % C == 0, "ideal basis must be divisible by its content");
    Int a = A / C;
    Int u = B / C;
    Int b = detail::normalize_b(-2 * u - ctx.D, a);
    check_internal(mod_floor(b * b - ctx.D, 4 * a) == 0,
                   "ideal basis is not closed under multiplication by w");
    return OrderIdeal{ctx, s * C, a, b};
}

inline Rat ideal_norm(const OrderIdeal& ideal) {
    return ideal.scale * ideal.scale * ideal.a;
}

// An ideal is proper (equivalently invertible) exactly when its associated
// form (a, b, (b^2 - D)/(4a)) is primitive.
inline bool ideal_is_proper(const OrderIdeal& ideal) {
    Int c = (ideal.b * ideal.b - ideal.ctx.D) / (4 * ideal.a);
    return gcd(gcd(ideal.a, ideal.b), c) == 1;
}

inline OrderIdeal ideal_conj(const OrderIdeal& ideal) {
    return OrderIdeal{ideal.ctx, ideal.scale, ideal.a,
                      detail::normalize_b(-ideal.b, ideal.a)};
}

// Product lattice: the four generator products over {1, w}, brought back to
// canonical shape.  Norms multiply.
inline OrderIdeal ideal_mul(const OrderIdeal& lhs, const OrderIdeal& rhs) {
    require(lhs.ctx == rhs.ctx, errc::context_mismatch,
            "ideal product needs matching discriminants, got " + lhs.ctx.D.str() + " and " +
                rhs.ctx.D.str());
    require(ideal_is_proper(lhs) && ideal_is_proper(rhs), errc::not_proper,
            "ideal product is defined for proper ideals");
    const Int& D = lhs.ctx.D;
    detail::Row g1 = {lhs.a, 0}, g2 = {lhs.u(), 1};
    detail::Row h1 = {rhs.a, 0}, h2 = {rhs.u(), 1};
    std::vector<detail::Row> rows = {
        detail::mul_rows(g1, h1, D),
        detail::mul_rows(g1, h2, D),
        detail::mul_rows(g2, h1, D),
        detail::mul_rows(g2, h2, D),
    };
    OrderIdeal out = ideal_from_hnf(lhs.ctx, lhs.scale * rhs.scale, detail::hnf_rows(rows));
    check_internal(ideal_norm(out) == ideal_norm(lhs) * ideal_norm(rhs),
                   "proper ideal product must have multiplicative norm");
    return out;
}

// conj(A) / N(A); the product with A is exactly the unit ideal.
inline OrderIdeal ideal_inv(const OrderIdeal& ideal) {
    require(ideal_is_proper(ideal), errc::not_proper, "only proper ideals invert");
    return OrderIdeal{ideal.ctx, Rat(1) / (ideal.scale * ideal.a), ideal.a,
                      detail::normalize_b(-ideal.b, ideal.a)};
}

// Quotient A * inv(B); the callers that use it expect an integral result.
inline OrderIdeal ideal_div(const OrderIdeal& lhs, const OrderIdeal& rhs) {
    return ideal_mul(lhs, ideal_inv(rhs));
}

inline OrderIdeal ideal_pow(const OrderIdeal& ideal, unsigned e) {
    OrderIdeal out = unit_ideal(ideal.ctx);
    for (unsigned i = 0; i < e; ++i) out = ideal_mul(out, ideal);
    return out;
}

// True when the element x + y*w (rational coordinates) lies in the ideal.
inline bool ideal_contains(const OrderIdeal& ideal, const Rat& x, const Rat& y) {
    Rat beta = y / ideal.scale;
    if (denominator(beta) != 1) return false;
    Rat alpha = (x / ideal.scale - beta * ideal.u()) / ideal.a;
    return denominator(alpha) == 1;
}

// Containment rhs within lhs, i.e. "lhs divides rhs" once both are integral.
inline bool ideal_contains(const OrderIdeal& lhs, const OrderIdeal& rhs) {
    require(lhs.ctx == rhs.ctx, errc::context_mismatch,
            "containment needs matching discriminants");
    return ideal_contains(lhs, rhs.scale * rhs.a, Rat(0)) &&
           ideal_contains(lhs, rhs.scale * rhs.u(), rhs.scale);
}

inline OrderIdeal form_to_ideal(const DiscContext& ctx, const QuadForm& f) {
    require(f.is_positive_definite() && f.is_primitive(), errc::invalid_form,
            "the ideal dictionary takes primitive positive definite forms");
    require(f.discriminant() == ctx.D, errc::context_mismatch,
            "form discriminant does not match the order");
    return make_order_ideal(ctx, 1, f.a, f.b);
}

inline OrderIdeal form_to_ideal(const QuadForm& f) {
    require(f.is_positive_definite() && f.is_primitive(), errc::invalid_form,
            "the ideal dictionary takes primitive positive definite forms");
    return form_to_ideal(DiscContext::make(f.discriminant()), f);
}

inline QuadForm ideal_to_form(const OrderIdeal& ideal) {
    require(ideal_is_proper(ideal), errc::not_proper,
            "the form dictionary takes proper ideals");
    return QuadForm{ideal.a, ideal.b, (ideal.b * ideal.b - ideal.ctx.D) / (4 * ideal.a)};
}

// A canonical representative of the ideal class: the ideal of the reduced
// form of the class.
struct IdealClassRep {
    OrderIdeal ideal;

    static IdealClassRep of(const OrderIdeal& a) {
        return {form_to_ideal(a.ctx, reduce(ideal_to_form(a)).first)};
    }

    friend bool operator==(const IdealClassRep&, const IdealClassRep&) = default;
};

// r = fSmall / fLarge = sqrt(D / D'); the index of the smaller order in the
// larger one.
inline Int relative_conductor(const DiscContext& small_ctx, const DiscContext& large_ctx) {
    require(small_ctx.dK == large_ctx.dK, errc::not_nested,
            "orders lie in different quadratic fields");
    require(small_ctx.f % large_ctx.f == 0, errc::not_nested,
            "conductor " + large_ctx.f.str() + " does not divide " + small_ctx.f.str());
    return small_ctx.f / large_ctx.f;
}

namespace detail {

// w = c0 + r*w' where c0 = (D - r*D')/2: the small order's generator written
// over the large order's basis.
inline Int rebase_offset(const DiscContext& small_ctx, const DiscContext& large_ctx,
                         const Int& r) {
    return (small_ctx.D - r * large_ctx.D) / 2;
}

}  // namespace detail

// The O'-ideal generated by A inside the larger order: rebase the generators
// over {1, w'}, close under multiplication by w', and renormalize.  Norm and
// properness are preserved.
inline OrderIdeal extend(const OrderIdeal& ideal, const DiscContext& large_ctx) {
    require(ideal_is_proper(ideal), errc::not_proper, "only proper ideals extend");
    Int r = relative_conductor(ideal.ctx, large_ctx);
    const Int& Dp = large_ctx.D;
    Int c0 = detail::rebase_offset(ideal.ctx, large_ctx, r);
    detail::Row g1 = {ideal.a, 0};
    detail::Row g2 = {ideal.u() + c0, r};
    auto times_wp = [&](const detail::Row& row) -> detail::Row {
        return {-row[1] * (Dp * Dp - Dp) / 4, row[0] + row[1] * Dp};
    };
    std::vector<detail::Row> rows = {g1, g2, times_wp(g1), times_wp(g2)};
    OrderIdeal out = ideal_from_hnf(large_ctx, ideal.scale, detail::hnf_rows(rows));
    check_internal(ideal_norm(out) == ideal_norm(ideal), "extension must preserve the norm");
    check_internal(ideal_is_proper(out), "extension must stay proper");
    return out;
}

// The lattice intersection A' with the smaller order, returned as an ideal of
// that order.  When N(A') is coprime to the relative conductor this inverts
// extend and preserves the norm; otherwise it is still the intersection, but
// none of those identities are promised.
inline OrderIdeal contract(const OrderIdeal& ideal, const DiscContext& small_ctx) {
    Int r = relative_conductor(small_ctx, ideal.ctx);
    require(ideal.is_integral(), errc::not_integral,
            "contraction intersects integral ideals only");
    Int s = numerator(ideal.scale);
    Int c0 = detail::rebase_offset(small_ctx, ideal.ctx, r);
    // Both lattices over the large order's basis {1, w'}.
    std::array<Int, 3> ideal_rows = {s * ideal.a, s * ideal.u(), s};
    std::array<Int, 3> order_rows = detail::hnf_rows({{1, 0}, {c0, r}});
    auto [A, B, C] = detail::intersect_lattices(order_rows, ideal_rows);
    // Rebase (x, y) over {1, w'} to (x - (y/r)*c0, y/r) over {1, w}.
    check_internal(C % r == 0, "intersection with the order must have w-span divisible by r");
    Int yw = C / r;
    std::array<Int, 3> rebased = {A, mod_floor(B - yw * c0, A), yw};
    return ideal_from_hnf(small_ctx, 1, rebased);
}

// The ideals of prime norm p for p coprime to the conductor: two conjugates
// when D is a nonzero square mod p, one ramified ideal when p divides D, none
// when D is a non-residue (p stays inert and pO is not of norm p).
inline std::vector<OrderIdeal> prime_ideals_above(const DiscContext& ctx, const Int& p) {
    require(is_prime(p), errc::invalid_input, "prime ideals lie above primes, got " + p.str());
    require(gcd(p, ctx.f) == 1, errc::conductor_prime,
            "prime " + p.str() + " divides the conductor " + ctx.f.str());
    int chi = kronecker(ctx.D, p);
    if (chi == -1) return {};
    if (chi == 0) {
        Int b = ctx.D % 2 == 0 ? Int(0) : p;
        if (p == 2) b = mod_floor(ctx.D, 8) == 0 ? Int(0) : Int(2);
        return {make_order_ideal(ctx, 1, p, b)};
    }
    Int root;
    if (p == 2) {
        check_internal(mod_floor(ctx.D, 8) == 1, "split at 2 requires D = 1 mod 8");
        root = 1;
    } else {
        std::optional<Int> r0 = sqrt_mod(ctx.D, p);
        check_internal(r0.has_value(), "split prime must have a square root of D");
        root = *r0;
        if (mod_floor(root - ctx.D, 2) != 0) root = root - p;  // fix parity mod 2p
    }
    Int b = detail::normalize_b(root, p);
    b = abs(b);
    return {make_order_ideal(ctx, 1, p, b), make_order_ideal(ctx, 1, p, -b)};
}

}  // namespace bqf
