#pragma once

// The form class group C(D): the finite abelian group of reduced primitive
// positive definite forms of discriminant D.  Multiplication goes through the
// ideal dictionary (no coprimality side-conditions), is memoized behind a
// shared table, and is safe under concurrent readers.

#include <algorithm>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <tuple>
#include <vector>

#include "errors.hpp"
#include "forms.hpp"
#include "orders.hpp"

namespace bqf {

class ClassGroup {
public:
    // All reduced forms of discriminant D: b ranges over b = D mod 2 with
    // 3b^2 <= |D|, and for each b every divisor a of (b^2 - D)/4 with
    // b <= a <= sqrt((b^2 - D)/4) yields (a, b, c) plus its mirror
    // (a, -b, c) when 0 < b < a < c.  Listed by (a, c, -b).
    static ClassGroup enumerate(const Int& D) {
        ClassGroup g;
        g.ctx_ = DiscContext::make(D);
        for (Int b = mod_floor(D, 2); 3 * b * b <= -D; b += 2) {
            Int n = (b * b - D) / 4;
            for (Int a = b > 0 ? b : Int(1); a * a <= n; ++a) {
                if (n % a != 0) continue;
                Int c = n / a;
                if (gcd(gcd(a, b), c) != 1) continue;
                g.reps_.push_back({a, b, c});
                if (b > 0 && b < a && a < c) g.reps_.push_back({a, -b, c});
            }
        }
        std::sort(g.reps_.begin(), g.reps_.end(), [](const QuadForm& f, const QuadForm& h) {
            return std::tie(f.a, f.c, h.b) < std::tie(h.a, h.c, f.b);
        });
        g.memo_ = std::make_shared<Memo>(g.reps_.size());
        g.identity_ = g.index_of(principal_form(D));
        return g;
    }

    static QuadForm principal_form(const Int& D) {
        if (mod_floor(D, 4) == 0) return {1, 0, -D / 4};
        return {1, 1, (1 - D) / 4};
    }

    const DiscContext& ctx() const { return ctx_; }
    std::size_t size() const { return reps_.size(); }
    const std::vector<QuadForm>& reps() const { return reps_; }
    const QuadForm& rep(std::size_t i) const { return reps_.at(i); }
    std::size_t identity() const { return identity_; }

    std::size_t index_of(const QuadForm& reduced) const {
        for (std::size_t i = 0; i < reps_.size(); ++i) {
            if (reps_[i] == reduced) return i;
        }
        std::ostringstream os;
        os << reduced << " is not a reduced form of discriminant " << ctx_.D;
        fail(errc::invalid_input, os.str());
    }

    std::size_t class_of(const OrderIdeal& ideal) const {
        require(ideal.ctx == ctx_, errc::context_mismatch,
                "ideal belongs to a different discriminant");
        return index_of(reduce(ideal_to_form(ideal)).first);
    }

    std::size_t mul(std::size_t i, std::size_t j) const {
        require(i < size() && j < size(), errc::invalid_input, "class index out of range");
        {
            std::lock_guard<std::mutex> lock(memo_->mu);
            int cached = memo_->table[i * size() + j];
            if (cached >= 0) return static_cast<std::size_t>(cached);
        }
        OrderIdeal product =
            ideal_mul(form_to_ideal(ctx_, reps_[i]), form_to_ideal(ctx_, reps_[j]));
        std::size_t k = class_of(product);
        std::lock_guard<std::mutex> lock(memo_->mu);
        memo_->table[i * size() + j] = static_cast<int>(k);
        memo_->table[j * size() + i] = static_cast<int>(k);
        return k;
    }

    std::size_t inverse(std::size_t i) const {
        const QuadForm& f = rep(i);
        return index_of(reduce({f.a, -f.b, f.c}).first);
    }

    std::size_t pow(std::size_t i, Int n) const {
        require(i < size(), errc::invalid_input, "class index out of range");
        if (n < 0) {
            i = inverse(i);
            n = -n;
        }
        std::size_t acc = identity_, base = i;
        while (n > 0) {
            if (n % 2 == 1) acc = mul(acc, base);
            base = mul(base, base);
            n /= 2;
        }
        return acc;
    }

    // The complete multiplication table, filling the memo as a side effect.
    std::vector<std::vector<std::size_t>> full_table() const {
        std::vector<std::vector<std::size_t>> out(size(), std::vector<std::size_t>(size()));
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t j = 0; j < size(); ++j) out[i][j] = mul(i, j);
        return out;
    }

    // Installs a precomputed table after checking it looks like the group:
    // shape, range, identity laws, commutativity, cancellation, inverses, and
    // (at this scale) full associativity.  Rejects with invalid_input.
    void preload_table(const std::vector<std::vector<std::size_t>>& table) const {
        const std::size_t h = size();
        require(table.size() == h, errc::invalid_input, "table has the wrong shape");
        for (const auto& row : table) {
            require(row.size() == h, errc::invalid_input, "table has the wrong shape");
            for (std::size_t entry : row)
                require(entry < h, errc::invalid_input, "table entry out of range");
        }
        for (std::size_t i = 0; i < h; ++i) {
            require(table[identity_][i] == i && table[i][identity_] == i, errc::invalid_input,
                    "table disagrees with the identity law");
            bool has_inverse = false;
            std::vector<bool> seen(h, false);
            for (std::size_t j = 0; j < h; ++j) {
                require(table[i][j] == table[j][i], errc::invalid_input,
                        "table is not commutative");
                require(!seen[table[i][j]], errc::invalid_input, "table row repeats a class");
                seen[table[i][j]] = true;
                if (table[i][j] == identity_) has_inverse = true;
            }
            require(has_inverse, errc::invalid_input, "table misses an inverse");
        }
        if (h <= 64) {
            for (std::size_t i = 0; i < h; ++i)
                for (std::size_t j = 0; j < h; ++j)
                    for (std::size_t k = 0; k < h; ++k)
                        require(table[table[i][j]][k] == table[i][table[j][k]],
                                errc::invalid_input, "table is not associative");
        }
        std::lock_guard<std::mutex> lock(memo_->mu);
        for (std::size_t i = 0; i < h; ++i)
            for (std::size_t j = 0; j < h; ++j)
                memo_->table[i * h + j] = static_cast<int>(table[i][j]);
    }

private:
    struct Memo {
        explicit Memo(std::size_t h) : table(h * h, -1) {}
        std::mutex mu;
        std::vector<int> table;
    };

    DiscContext ctx_;
    std::vector<QuadForm> reps_;
    std::size_t identity_ = 0;
    std::shared_ptr<Memo> memo_;
};

inline ClassGroup enumerate_reduced(const Int& D) { return ClassGroup::enumerate(D); }

// A class as (group, index).  The group outlives the element; elements from
// groups of the same discriminant are interchangeable.
struct ClassElem {
    const ClassGroup* group;
    std::size_t index;

    const QuadForm& form() const { return group->rep(index); }

    friend bool operator==(const ClassElem& x, const ClassElem& y) {
        return x.group->ctx() == y.group->ctx() && x.index == y.index;
    }
};

inline ClassElem class_identity(const ClassGroup& g) { return {&g, g.identity()}; }

inline ClassElem class_mul(const ClassElem& x, const ClassElem& y) {
    require(x.group->ctx() == y.group->ctx(), errc::context_mismatch,
            "class product needs one group");
    return {x.group, x.group->mul(x.index, y.index)};
}

inline ClassElem class_inverse(const ClassElem& x) {
    return {x.group, x.group->inverse(x.index)};
}

inline ClassElem class_pow(const ClassElem& x, const Int& n) {
    return {x.group, x.group->pow(x.index, n)};
}

// Classes representing a prime p coprime to the conductor: the classes of the
// prime ideals of norm p, one or two of them.
inline std::set<std::size_t> classes_representing_prime(const ClassGroup& g, const Int& p) {
    require(gcd(p, g.ctx().f) == 1, errc::conductor_prime,
            "prime " + p.str() + " divides the conductor");
    require(kronecker(g.ctx().D, p) >= 0, errc::inert_prime,
            "prime " + p.str() + " is inert for discriminant " + g.ctx().D.str());
    std::set<std::size_t> out;
    for (const OrderIdeal& ideal : prime_ideals_above(g.ctx(), p)) {
        out.insert(g.class_of(ideal));
    }
    return out;
}

// Classes whose reduced representative takes the value l^h, for a conductor
// prime l.  There is no closed form here; each representative is searched
// exhaustively.  h = 0 yields exactly the identity class.
inline std::set<std::size_t> classes_representing_power(const ClassGroup& g, const Int& l,
                                                        unsigned h) {
    require(is_prime(l), errc::invalid_input, "conductor part must be prime, got " + l.str());
    require(g.ctx().f % l == 0, errc::not_conductor_prime,
            l.str() + " does not divide the conductor " + g.ctx().f.str());
    std::set<std::size_t> out;
    Int target = 1;
    for (unsigned i = 0; i < h; ++i) target *= l;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (represent(g.rep(i), target, false)) out.insert(i);
    }
    return out;
}

// The class-group surjection induced by extending ideals to a larger order.
// A representative ideal with norm coprime to the relative conductor is found
// by scanning the form's values over growing boxes, smallest value first.
inline ClassElem surjection_pi(const ClassElem& x, const ClassGroup& target) {
    Int r = relative_conductor(x.group->ctx(), target.ctx());
    const QuadForm& f = x.form();
    for (Int box = 32; box <= 1024; box *= 2) {
        std::set<Int> values;
        for (Int u = -box; u <= box; ++u)
            for (Int v = -box; v <= box; ++v) values.insert(f.value(u, v));
        for (const Int& value : values) {
            if (value == 0 || gcd(value, r) != 1) continue;
            auto led = lead_with(f, value);
            if (!led) continue;
            OrderIdeal moved = extend(form_to_ideal(x.group->ctx(), led->first), target.ctx());
            return {&target, target.class_of(moved)};
        }
    }
    fail(errc::search_exhausted,
         "no properly represented value coprime to " + r.str() + " within the search box");
}

// All products s_1 ... s_n with s_i drawn from sets[i]; the empty list gives
// the identity alone.
inline std::set<std::size_t> reachable_products(const ClassGroup& g,
                                                const std::vector<std::set<std::size_t>>& sets) {
    std::set<std::size_t> current = {g.identity()};
    for (const auto& choices : sets) {
        require(!choices.empty(), errc::invalid_input, "set product over an empty set");
        std::set<std::size_t> next;
        for (std::size_t have : current) {
            for (std::size_t pick : choices) {
                require(pick < g.size(), errc::invalid_input, "class index out of range");
                next.insert(g.mul(have, pick));
            }
        }
        current = std::move(next);
    }
    return current;
}

}  // namespace bqf
