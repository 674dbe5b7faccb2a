#include <catch2/catch_amalgamated.hpp>

#include <functional>
#include <map>
#include <random>
#include <set>
#include <thread>
#include <vector>

#include "bqf/classgroup.hpp"

using namespace bqf;

namespace {

errc code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return errc::internal;
}

const std::vector<Int>& axiom_pool() {
    static const std::vector<Int> pool = {-3,  -4,  -7,  -8,  -11, -15, -20,  -23,  -32,
                                          -47, -48, -56, -64, -71, -72, -75,  -80,  -84,
                                          -95, -99, -100, -108, -112, -147, -163, -180, -192};
    return pool;
}

Int power(const Int& l, unsigned h) {
    Int out = 1;
    for (unsigned i = 0; i < h; ++i) out *= l;
    return out;
}

// First `count` prime ideals in each class, primes ascending and coprime to
// the conductor.  Every class of these small groups is hit well before the
// prime bound runs out.
std::map<std::size_t, std::vector<OrderIdeal>> prime_ideals_by_class(const ClassGroup& g,
                                                                     std::size_t count) {
    std::map<std::size_t, std::vector<OrderIdeal>> out;
    auto done = [&] {
        if (out.size() < g.size()) return false;
        for (const auto& [cls, ideals] : out) {
            (void)cls;
            if (ideals.size() < count) return false;
        }
        return true;
    };
    for (Int p = 2; p < 5000 && !done(); p = p == 2 ? Int(3) : Int(p + 2)) {
        if (!is_prime(p)) continue;
        if (gcd(p, g.ctx().f) != 1) continue;
        for (const OrderIdeal& ideal : prime_ideals_above(g.ctx(), p)) {
            auto& bucket = out[g.class_of(ideal)];
            if (bucket.size() < count) bucket.push_back(ideal);
        }
    }
    return out;
}

std::vector<std::size_t> pi_map(const ClassGroup& g, const ClassGroup& target) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < g.size(); ++i) {
        out.push_back(surjection_pi({&g, i}, target).index);
    }
    return out;
}

}  // namespace

TEST_CASE("reduced forms are enumerated completely and in listing order") {
    ClassGroup g4 = enumerate_reduced(-4);
    REQUIRE(g4.reps() == std::vector<QuadForm>{{1, 0, 1}});

    ClassGroup g20 = enumerate_reduced(-20);
    REQUIRE(g20.reps() == std::vector<QuadForm>{{1, 0, 5}, {2, 2, 3}});

    ClassGroup g32 = enumerate_reduced(-32);
    REQUIRE(g32.reps() == std::vector<QuadForm>{{1, 0, 8}, {3, 2, 3}});

    ClassGroup g64 = enumerate_reduced(-64);
    REQUIRE(g64.reps() == std::vector<QuadForm>{{1, 0, 16}, {4, 4, 5}});

    ClassGroup g108 = enumerate_reduced(-108);
    REQUIRE(g108.reps() == std::vector<QuadForm>{{1, 0, 27}, {4, 2, 7}, {4, -2, 7}});

    SECTION("classical class numbers") {
        REQUIRE(enumerate_reduced(-3).size() == 1);
        REQUIRE(enumerate_reduced(-163).size() == 1);
        REQUIRE(enumerate_reduced(-15).size() == 2);
        REQUIRE(enumerate_reduced(-23).size() == 3);
        REQUIRE(enumerate_reduced(-47).size() == 5);
        REQUIRE(enumerate_reduced(-71).size() == 7);
    }

    SECTION("every listed form is reduced, primitive, and of the right discriminant") {
        for (const Int& D : axiom_pool()) {
            ClassGroup g = enumerate_reduced(D);
            std::set<QuadForm> seen;
            for (const QuadForm& f : g.reps()) {
                REQUIRE(is_reduced(f));
                REQUIRE(f.is_primitive());
                REQUIRE(f.discriminant() == D);
                REQUIRE(seen.insert(f).second);
            }
        }
    }

    SECTION("completeness: reducing any primitive form of the discriminant lands in the list") {
        std::mt19937_64 rng(20260821);
        for (const Int& D : {Int(-20), Int(-108), Int(-80)}) {
            ClassGroup g = enumerate_reduced(D);
            for (int trial = 0; trial < 50; ++trial) {
                // Random primitive form of discriminant D: random reduced rep
                // pushed through a random unimodular substitution.
                const QuadForm& base = g.rep(rng() % g.size());
                UnimodularMap m = UnimodularMap::identity();
                for (int round = 0; round < 4; ++round) {
                    long shift = static_cast<long>(rng() % 7) - 3;
                    m = m * UnimodularMap{1, Int(shift), 0, 1};
                    if (rng() % 2 == 0) m = m * UnimodularMap{0, -1, 1, 0};
                }
                QuadForm moved = apply_transform(base, m);
                REQUIRE_NOTHROW(g.index_of(reduce(moved).first));
            }
        }
    }

    SECTION("rejects invalid discriminants") {
        REQUIRE(code_of([] { enumerate_reduced(-6); }) == errc::invalid_discriminant);
        REQUIRE(code_of([] { enumerate_reduced(-9); }) == errc::invalid_discriminant);
        REQUIRE(code_of([] { enumerate_reduced(0); }) == errc::invalid_discriminant);
        REQUIRE(code_of([] { enumerate_reduced(4); }) == errc::invalid_discriminant);
    }
}

TEST_CASE("group structure: identity, products, inverses, powers") {
    ClassGroup g20 = enumerate_reduced(-20);
    ClassGroup g108 = enumerate_reduced(-108);

    SECTION("frozen products") {
        REQUIRE(g20.rep(g20.identity()) == QuadForm{1, 0, 5});
        std::size_t two23 = g20.index_of({2, 2, 3});
        REQUIRE(g20.mul(two23, two23) == g20.identity());

        std::size_t f427 = g108.index_of({4, 2, 7});
        REQUIRE(g108.rep(g108.mul(f427, f427)) == QuadForm{4, -2, 7});
        REQUIRE(g108.rep(g108.inverse(f427)) == QuadForm{4, -2, 7});
        REQUIRE(g108.pow(f427, 3) == g108.identity());
    }

    SECTION("element wrappers") {
        ClassElem x{&g108, g108.index_of({4, 2, 7})};
        REQUIRE(class_mul(x, x).form() == QuadForm{4, -2, 7});
        REQUIRE(class_inverse(x).form() == QuadForm{4, -2, 7});
        REQUIRE(class_pow(x, 3) == class_identity(g108));
        REQUIRE(class_pow(x, -1) == class_inverse(x));
        ClassElem y{&g20, g20.identity()};
        REQUIRE(code_of([&] { class_mul(x, y); }) == errc::context_mismatch);
    }

    SECTION("index guards") {
        REQUIRE(code_of([&] { g20.index_of({2, 2, 5}); }) == errc::invalid_input);
        REQUIRE(code_of([&] { g20.mul(0, 2); }) == errc::invalid_input);
    }

    SECTION("abelian group axioms over the pool") {
        for (const Int& D : axiom_pool()) {
            ClassGroup g = enumerate_reduced(D);
            auto table = g.full_table();
            std::size_t h = g.size();
            std::size_t e = g.identity();
            for (std::size_t i = 0; i < h; ++i) {
                REQUIRE(table[e][i] == i);
                REQUIRE(table[g.inverse(i)][i] == e);
                REQUIRE(g.pow(i, Int(h)) == e);   // Lagrange
                REQUIRE(g.pow(i, 0) == e);
                REQUIRE(g.pow(i, -1) == g.inverse(i));
                for (std::size_t j = 0; j < h; ++j) {
                    REQUIRE(table[i][j] == table[j][i]);
                    for (std::size_t k = 0; k < h; ++k) {
                        REQUIRE(table[table[i][j]][k] == table[i][table[j][k]]);
                    }
                }
            }
        }
    }
}

TEST_CASE("multiplication agrees with coefficient-level composition") {
    // Independent oracle: when gcd(a1, a2, (b1+b2)/2) = 1 the product class is
    // (a1 a2, B, (B^2-D)/(4 a1 a2)) for the B < 4 a1 a2 solving
    // B = b1 mod 2 a1, B = b2 mod 2 a2, B^2 = D mod 4 a1 a2 (found here by
    // exhaustive scan, which is the point of the cross-check).
    std::mt19937_64 rng(20260822);
    int applied = 0;
    for (int trial = 0; trial < 4000 && applied < 200; ++trial) {
        const Int& D = axiom_pool()[rng() % axiom_pool().size()];
        ClassGroup g = enumerate_reduced(D);
        std::size_t i = rng() % g.size(), j = rng() % g.size();
        const QuadForm &f = g.rep(i), &h = g.rep(j);
        if (gcd(gcd(f.a, h.a), Int((f.b + h.b) / 2)) != 1) continue;
        Int modulus = 4 * f.a * h.a;
        std::optional<Int> found;
        for (Int B = 0; B < modulus; ++B) {
            if (mod_floor(B - f.b, 2 * f.a) != 0) continue;
            if (mod_floor(B - h.b, 2 * h.a) != 0) continue;
            if (mod_floor(B * B - D, modulus) != 0) continue;
            found = B;
            break;
        }
        REQUIRE(found.has_value());
        QuadForm composed{f.a * h.a, *found, (*found * *found - D) / modulus};
        REQUIRE(composed.discriminant() == D);
        REQUIRE(reduce(composed).first == g.rep(g.mul(i, j)));
        ++applied;
    }
    REQUIRE(applied == 200);
}

TEST_CASE("a product class represents products of represented values") {
    std::mt19937_64 rng(20260823);
    const Int bound = 300;
    for (int trial = 0; trial < 100; ++trial) {
        const Int& D = axiom_pool()[rng() % axiom_pool().size()];
        ClassGroup g = enumerate_reduced(D);
        std::size_t i = rng() % g.size(), j = rng() % g.size();
        auto left = represented_set(g.rep(i), 40);
        auto right = represented_set(g.rep(j), 40);
        auto product = represented_set(g.rep(g.mul(i, j)), bound);
        for (const Int& m : left) {
            for (const Int& n : right) {
                Int mn = m * n;
                if (mn > bound) continue;
                REQUIRE(product.count(mn) == 1);
            }
        }
    }
}

TEST_CASE("classes representing a prime") {
    ClassGroup g20 = enumerate_reduced(-20);
    ClassGroup g4 = enumerate_reduced(-4);

    SECTION("frozen") {
        REQUIRE(classes_representing_prime(g20, 3) ==
                std::set<std::size_t>{g20.index_of({2, 2, 3})});
        REQUIRE(classes_representing_prime(g20, 29) ==
                std::set<std::size_t>{g20.identity()});
        REQUIRE(classes_representing_prime(g4, 2) == std::set<std::size_t>{g4.identity()});
    }

    SECTION("guards") {
        ClassGroup g108 = enumerate_reduced(-108);
        REQUIRE(code_of([&] { classes_representing_prime(g108, 2); }) == errc::conductor_prime);
        REQUIRE(code_of([&] { classes_representing_prime(g20, 11); }) == errc::inert_prime);
    }

    SECTION("membership coincides with actually representing p") {
        for (const Int& D : axiom_pool()) {
            ClassGroup g = enumerate_reduced(D);
            for (Int p = 2; p < 60; p = p == 2 ? Int(3) : Int(p + 2)) {
                if (!is_prime(p) || gcd(p, g.ctx().f) != 1) continue;
                if (kronecker(D, p) == -1) {
                    for (std::size_t i = 0; i < g.size(); ++i) {
                        REQUIRE(!represent(g.rep(i), p, false));
                    }
                    continue;
                }
                std::set<std::size_t> classes = classes_representing_prime(g, p);
                REQUIRE(!classes.empty());
                for (std::size_t i = 0; i < g.size(); ++i) {
                    REQUIRE(classes.count(i) == (represent(g.rep(i), p, false) ? 1u : 0u));
                }
            }
        }
    }
}

TEST_CASE("classes representing a conductor prime power") {
    ClassGroup g32 = enumerate_reduced(-32);
    ClassGroup g108 = enumerate_reduced(-108);

    SECTION("frozen") {
        REQUIRE(classes_representing_power(g32, 2, 1).empty());
        REQUIRE(classes_representing_power(g32, 2, 2) ==
                std::set<std::size_t>{g32.index_of({1, 0, 8}), g32.index_of({3, 2, 3})});
        REQUIRE(classes_representing_power(g108, 3, 1).empty());
        REQUIRE(classes_representing_power(g108, 3, 2) ==
                std::set<std::size_t>{0, 1, 2});
        REQUIRE(classes_representing_power(g32, 2, 0) ==
                std::set<std::size_t>{g32.identity()});
    }

    SECTION("guards") {
        ClassGroup g20 = enumerate_reduced(-20);
        REQUIRE(code_of([&] { classes_representing_power(g20, 2, 1); }) ==
                errc::not_conductor_prime);
        REQUIRE(code_of([&] { classes_representing_power(g32, 3, 1); }) ==
                errc::not_conductor_prime);
        REQUIRE(code_of([&] { classes_representing_power(g32, 4, 1); }) == errc::invalid_input);
    }

    SECTION("agrees with a direct scan of representatives") {
        for (const Int& D : {Int(-32), Int(-64), Int(-108), Int(-48), Int(-180)}) {
            ClassGroup g = enumerate_reduced(D);
            for (const auto& [l, e] : g.ctx().f_factors.factors) {
                (void)e;
                for (unsigned h = 0; h <= 4; ++h) {
                    std::set<std::size_t> expected;
                    if (h == 0) {
                        expected.insert(g.identity());
                    } else {
                        for (std::size_t i = 0; i < g.size(); ++i) {
                            if (represent(g.rep(i), power(l, h), false)) expected.insert(i);
                        }
                    }
                    REQUIRE(classes_representing_power(g, l, h) == expected);
                }
            }
        }
    }
}

TEST_CASE("surjection onto the class group of a larger order") {
    SECTION("frozen") {
        ClassGroup g32 = enumerate_reduced(-32), g8 = enumerate_reduced(-8);
        ClassElem x{&g32, g32.index_of({3, 2, 3})};
        REQUIRE(surjection_pi(x, g8).form() == QuadForm{1, 0, 2});

        ClassGroup g108 = enumerate_reduced(-108), g27 = enumerate_reduced(-27);
        ClassElem y{&g108, g108.index_of({4, 2, 7})};
        REQUIRE(surjection_pi(y, g27).form() == QuadForm{1, 1, 7});
    }

    SECTION("guards") {
        ClassGroup g32 = enumerate_reduced(-32), g20 = enumerate_reduced(-20);
        REQUIRE(code_of([&] { surjection_pi({&g32, 0}, g20); }) == errc::not_nested);
    }

    SECTION("surjective homomorphism sending identity to identity") {
        const std::vector<std::pair<Int, Int>> pairs = {{-32, -8},   {-64, -16}, {-64, -4},
                                                        {-108, -27}, {-108, -12}, {-80, -20},
                                                        {-180, -20}};
        for (const auto& [D, Dprime] : pairs) {
            ClassGroup g = enumerate_reduced(D), t = enumerate_reduced(Dprime);
            std::vector<std::size_t> image = pi_map(g, t);
            REQUIRE(image[g.identity()] == t.identity());
            std::set<std::size_t> hit(image.begin(), image.end());
            REQUIRE(hit.size() == t.size());
            for (std::size_t i = 0; i < g.size(); ++i) {
                for (std::size_t j = 0; j < g.size(); ++j) {
                    REQUIRE(image[g.mul(i, j)] == t.mul(image[i], image[j]));
                }
            }
        }
    }

    SECTION("independent of the representative ideal") {
        const std::vector<std::pair<Int, Int>> pairs = {{-80, -20}, {-32, -8}, {-108, -12}};
        for (const auto& [D, Dprime] : pairs) {
            ClassGroup g = enumerate_reduced(D), t = enumerate_reduced(Dprime);
            std::vector<std::size_t> image = pi_map(g, t);
            auto by_class = prime_ideals_by_class(g, 3);
            REQUIRE(by_class.size() == g.size());
            for (const auto& [cls, ideals] : by_class) {
                REQUIRE(ideals.size() == 3);
                for (const OrderIdeal& ideal : ideals) {
                    REQUIRE(t.class_of(extend(ideal, t.ctx())) == image[cls]);
                }
            }
        }
    }
}

TEST_CASE("the image class represents everything a source class represents") {
    const std::vector<std::pair<Int, Int>> pairs = {{-32, -8},   {-64, -16}, {-64, -4},
                                                    {-108, -27}, {-108, -12}};
    for (const auto& [D, Dprime] : pairs) {
        ClassGroup g = enumerate_reduced(D), t = enumerate_reduced(Dprime);
        for (std::size_t i = 0; i < g.size(); ++i) {
            std::size_t img = surjection_pi({&g, i}, t).index;
            auto fine = represented_set(g.rep(i), 200);
            auto coarse = represented_set(t.rep(img), 200);
            for (const Int& v : fine) REQUIRE(coarse.count(v) == 1);
        }
    }
}

TEST_CASE("conductor powers shift between an order and its target") {
    // (D, D', l, lambda) with D = l^(2 lambda) D'.
    struct Pair {
        Int D, Dprime, l;
        unsigned lambda;
    };
    const std::vector<Pair> pairs = {{-32, -8, 2, 1},
                                     {-64, -16, 2, 1},
                                     {-64, -4, 2, 2},
                                     {-108, -27, 2, 1},
                                     {-108, -12, 3, 1}};
    for (const auto& pr : pairs) {
        REQUIRE(pr.D == power(pr.l, 2 * pr.lambda) * pr.Dprime);
        ClassGroup g = enumerate_reduced(pr.D), t = enumerate_reduced(pr.Dprime);

        // A represented l^h downstairs lifts to l^(2 lambda + h) upstairs.
        for (std::size_t i = 0; i < g.size(); ++i) {
            std::size_t img = surjection_pi({&g, i}, t).index;
            for (unsigned h = 0; h <= 3; ++h) {
                if (represent(t.rep(img), power(pr.l, h), false)) {
                    REQUIRE(represent(g.rep(i), power(pr.l, 2 * pr.lambda + h), false));
                }
            }
        }

        // No class upstairs represents l^h for odd h below 2 lambda + 1.
        for (unsigned h = 1; h < 2 * pr.lambda + 1; h += 2) {
            for (std::size_t i = 0; i < g.size(); ++i) {
                REQUIRE(!represent(g.rep(i), power(pr.l, h), false));
            }
        }
    }
}

TEST_CASE("reachable products") {
    ClassGroup g20 = enumerate_reduced(-20);
    std::size_t two23 = g20.index_of({2, 2, 3});

    SECTION("frozen") {
        REQUIRE(reachable_products(g20, {}) == std::set<std::size_t>{g20.identity()});
        REQUIRE(reachable_products(g20, {{two23}}) == std::set<std::size_t>{two23});
        REQUIRE(reachable_products(g20, {{two23}, {two23}}) ==
                std::set<std::size_t>{g20.identity()});
        REQUIRE(reachable_products(g20, {{g20.identity(), two23}, {two23}}) ==
                std::set<std::size_t>{g20.identity(), two23});
    }

    SECTION("guards") {
        REQUIRE(code_of([&] { reachable_products(g20, {{}}); }) == errc::invalid_input);
        REQUIRE(code_of([&] { reachable_products(g20, {{5}}); }) == errc::invalid_input);
    }

    SECTION("matches brute-force enumeration of all choice sequences") {
        std::mt19937_64 rng(20260824);
        for (int trial = 0; trial < 60; ++trial) {
            const Int& D = axiom_pool()[rng() % axiom_pool().size()];
            ClassGroup g = enumerate_reduced(D);
            std::vector<std::set<std::size_t>> sets(1 + rng() % 4);
            for (auto& s : sets) {
                std::size_t picks = 1 + rng() % std::min<std::size_t>(3, g.size());
                while (s.size() < picks) s.insert(rng() % g.size());
            }
            std::set<std::size_t> expected = {g.identity()};
            for (const auto& s : sets) {
                std::set<std::size_t> next;
                for (std::size_t a : expected)
                    for (std::size_t b : s) next.insert(g.mul(a, b));
                expected = next;
            }
            REQUIRE(reachable_products(g, sets) == expected);
        }
    }
}

TEST_CASE("memoized table under concurrent readers") {
    ClassGroup g = enumerate_reduced(-420);
    std::vector<std::vector<std::vector<std::size_t>>> results(4);
    std::vector<std::thread> workers;
    for (auto& slot : results) {
        workers.emplace_back([&g, &slot] { slot = g.full_table(); });
    }
    for (auto& w : workers) w.join();
    for (const auto& slot : results) REQUIRE(slot == results[0]);
    REQUIRE(results[0][g.identity()][1] == 1);
}

TEST_CASE("preloading a multiplication table") {
    ClassGroup g = enumerate_reduced(-84);
    auto table = g.full_table();

    SECTION("a valid table is accepted and used") {
        ClassGroup fresh = enumerate_reduced(-84);
        fresh.preload_table(table);
        REQUIRE(fresh.full_table() == table);
    }

    SECTION("corruption is rejected") {
        ClassGroup fresh = enumerate_reduced(-84);
        auto bad = table;
        bad[g.identity()][1] = g.identity();  // breaks the identity law
        REQUIRE(code_of([&] { fresh.preload_table(bad); }) == errc::invalid_input);

        auto lopsided = table;
        lopsided.pop_back();
        REQUIRE(code_of([&] { fresh.preload_table(lopsided); }) == errc::invalid_input);

        auto out_of_range = table;
        out_of_range[1][1] = g.size();
        REQUIRE(code_of([&] { fresh.preload_table(out_of_range); }) == errc::invalid_input);
    }
}
