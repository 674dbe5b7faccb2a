#pragma once

// Binary quadratic forms ax^2 + bxy + cy^2: validity, canonical reduction
// under proper equivalence, and exhaustive representation search.  The search
// routines here are the ground truth the rest of the library is checked
// against.

#include <optional>
#include <ostream>
#include <set>
#include <tuple>
#include <utility>

#include "errors.hpp"
#include "integers.hpp"

namespace bqf {

struct QuadForm {
    Int a, b, c;

    Int discriminant() const { return b * b - 4 * a * c; }
    Int value(const Int& x, const Int& y) const { return a * x * x + b * x * y + c * y * y; }
    bool is_primitive() const { return gcd(gcd(a, b), c) == 1; }
    bool is_positive_definite() const { return a > 0 && discriminant() < 0; }

    friend bool operator==(const QuadForm&, const QuadForm&) = default;
    // Lexicographic on (a, b, c); containers need some total order.
    friend bool operator<(const QuadForm& f, const QuadForm& g) {
        return std::tie(f.a, f.b, f.c) < std::tie(g.a, g.b, g.c);
    }
    friend std::ostream& operator<<(std::ostream& os, const QuadForm& f) {
        return os << "(" << f.a << ", " << f.b << ", " << f.c << ")";
    }
};

inline Int discriminant(const QuadForm& f) { return f.discriminant(); }

// Column-action substitution matrix: (x, y) -> (px + qy, rx + sy).
struct UnimodularMap {
    Int p, q, r, s;

    Int det() const { return p * s - q * r; }
    static UnimodularMap identity() { return {1, 0, 0, 1}; }

    // Matrix product; composing substitutions applies the right factor first.
    friend UnimodularMap operator*(const UnimodularMap& m, const UnimodularMap& n) {
        return {m.p * n.p + m.q * n.r, m.p * n.q + m.q * n.s,
                m.r * n.p + m.s * n.r, m.r * n.q + m.s * n.s};
    }

    UnimodularMap inverse() const {
        Int d = det();
        require(d == 1 || d == -1, errc::invalid_input, "only determinant-1 maps invert exactly");
        if (d == 1) return {s, -q, -r, p};
        return {-s, q, r, -p};
    }

    friend bool operator==(const UnimodularMap&, const UnimodularMap&) = default;
    friend std::ostream& operator<<(std::ostream& os, const UnimodularMap& m) {
        return os << "[[" << m.p << ", " << m.q << "], [" << m.r << ", " << m.s << "]]";
    }
};

// Coefficients of F(px + qy, rx + sy); the discriminant picks up det(M)^2.
inline QuadForm apply_transform(const QuadForm& f, const UnimodularMap& m) {
    QuadForm g;
    g.a = f.value(m.p, m.r);
    g.c = f.value(m.q, m.s);
    g.b = 2 * f.a * m.p * m.q + f.b * (m.p * m.s + m.q * m.r) + 2 * f.c * m.r * m.s;
    return g;
}

// The form is reduced when -a < b <= a <= c, with b >= 0 once a = c.
inline bool is_reduced(const QuadForm& f) {
    return f.is_positive_definite() && -f.a < f.b && f.b <= f.a && f.a <= f.c &&
           (f.a != f.c || f.b >= 0);
}

// Canonical representative of the proper-equivalence class, together with the
// determinant-1 map M satisfying F = apply_transform(G, M).  Alternates
// translations b -> b + 2ak into (-a, a] with swaps (a, b, c) -> (c, -b, a)
// until reduced.
inline std::pair<QuadForm, UnimodularMap> reduce(const QuadForm& f) {
    require(f.is_positive_definite(), errc::invalid_form,
            "reduction requires a positive definite form");
    require(f.is_primitive(), errc::invalid_form, "reduction requires a primitive form");
    QuadForm g = f;
    UnimodularMap u = UnimodularMap::identity();  // g = apply_transform(f, u)
    for (int guard = 0; guard < 100000; ++guard) {
        if (g.b <= -g.a || g.b > g.a) {
            Int k = floor_div(g.a - g.b, 2 * g.a);
            UnimodularMap t{1, k, 0, 1};
            g = apply_transform(g, t);
            u = u * t;
        }
        if (g.a > g.c) {
            UnimodularMap s{0, -1, 1, 0};
            g = apply_transform(g, s);
            u = u * s;
            continue;
        }
        if (g.a == g.c && g.b < 0) {
            UnimodularMap s{0, -1, 1, 0};
            g = apply_transform(g, s);
            u = u * s;
        }
        check_internal(is_reduced(g), "reduction loop left a non-reduced form");
        return {g, u.inverse()};
    }
    fail(errc::internal, "reduction failed to terminate");
}

namespace detail {

// Witness order: radius |x|, then |y|, then nonnegative x before negative,
// then nonnegative y before negative.
using WitnessKey = std::tuple<Int, Int, int, int>;

inline WitnessKey witness_key(const Int& x, const Int& y) {
    return {abs(x), abs(y), x < 0 ? 1 : 0, y < 0 ? 1 : 0};
}

}  // namespace detail

// Exhaustive representation search.  A solution of F(x, y) = m must satisfy
// x^2 <= 4cm/|D|, so scanning |x| outward and solving the quadratic in y is
// complete.  Returns the first witness in the deterministic order above, or
// absent when m is not represented (properly, when requested).
inline std::optional<std::pair<Int, Int>> represent(const QuadForm& f, const Int& m,
                                                    bool proper) {
    require(f.is_positive_definite(), errc::invalid_form,
            "representation search requires a positive definite form");
    if (m < 0) return std::nullopt;
    if (m == 0) {
        if (proper) return std::nullopt;  // (0,0) is the only zero and is imprimitive
        return std::make_pair(Int(0), Int(0));
    }
    const Int d = f.discriminant();
    const Int bound = 4 * f.c * m;  // |x|^2 * |D| may not exceed this
    for (Int ax = 0; ax * ax * (-d) <= bound; ++ax) {
        Int delta = d * ax * ax + 4 * f.c * m;
        if (delta < 0) continue;
        Int s = isqrt(delta);
        if (s * s != delta) continue;
        std::optional<std::pair<Int, Int>> best;
        detail::WitnessKey best_key;
        for (int xs : {+1, -1}) {
            if (ax == 0 && xs < 0) continue;
            Int x = xs * ax;
            for (int rs : {+1, -1}) {
                if (s == 0 && rs < 0) continue;
                Int num = -f.b * x + rs * s;
                if (num % (2 * f.c) != 0) continue;
                Int y = num / (2 * f.c);
                check_internal(f.value(x, y) == m, "representation candidate mis-solved");
                if (proper && gcd(x, y) != 1) continue;
                detail::WitnessKey key = detail::witness_key(x, y);
                if (!best || key < best_key) {
                    best = std::make_pair(x, y);
                    best_key = key;
                }
            }
        }
        if (best) return best;
    }
    return std::nullopt;
}

// Every value of F up to the bound, 0 included.  Since F(-x, -y) = F(x, y) it
// suffices to sweep x >= 0 and, for each x, the full y-interval allowed by
// F(x, y) <= bound.
inline std::set<Int> represented_set(const QuadForm& f, const Int& bound) {
    require(f.is_positive_definite(), errc::invalid_form,
            "value enumeration requires a positive definite form");
    std::set<Int> out;
    if (bound < 0) return out;
    out.insert(0);
    const Int d = f.discriminant();
    const Int two_c = 2 * f.c;
    for (Int x = 0; x * x * (-d) <= 4 * f.c * bound; ++x) {
        Int delta = d * x * x + 4 * f.c * bound;
        if (delta < 0) continue;
        Int s = isqrt(delta);
        Int lo = floor_div(-f.b * x - s + two_c - 1, two_c);  // ceil
        Int hi = floor_div(-f.b * x + s, two_c);
        for (Int y = lo; y <= hi; ++y) {
            Int v = f.value(x, y);
            if (v <= bound) out.insert(v);
        }
    }
    return out;
}

// When m is properly represented, rewrites F as an equivalent form with
// leading coefficient m: the proper witness is completed to a determinant-1
// matrix via the extended gcd, and the middle coefficient is translated into
// (-m, m].  Returns (G, M) with G = apply_transform(F, M).
inline std::optional<std::pair<QuadForm, UnimodularMap>> lead_with(const QuadForm& f,
                                                                   const Int& m) {
    require(f.is_positive_definite() && f.is_primitive(), errc::invalid_form,
            "lead_with requires a primitive positive definite form");
    std::optional<std::pair<Int, Int>> w = represent(f, m, true);
    if (!w) return std::nullopt;
    const auto& [x0, y0] = *w;
    auto [g, u, v] = ext_gcd(x0, y0);
    check_internal(g == 1, "proper witness must be coprime");
    UnimodularMap map{x0, -v, y0, u};
    check_internal(map.det() == 1, "witness completion must have determinant 1");
    QuadForm lead = apply_transform(f, map);
    check_internal(lead.a == m, "completed form must lead with m");
    if (lead.b <= -m || lead.b > m) {
        Int k = floor_div(m - lead.b, 2 * m);
        UnimodularMap t{1, k, 0, 1};
        lead = apply_transform(lead, t);
        map = map * t;
    }
    return std::make_pair(lead, map);
}

}  // namespace bqf
