#pragma once

// The representation criterion as a decision procedure: factor m, classify
// its primes against the form's order, build the sets of classes that can
// absorb each factor, and test whether the form's class is a reachable
// product.  Positive verdicts carry a numeric witness and a per-factor class
// witness; negative ones carry the first failing clause.

#include <chrono>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "classgroup.hpp"
#include "errors.hpp"
#include "forms.hpp"
#include "intmath.hpp"

namespace bqf {

enum class FailureReason {
    non_positive,
    odd_inert_exponent,
    conductor_power_unrepresentable,
    class_equation_unsatisfiable,
};

inline const char* failure_name(FailureReason reason) {
    switch (reason) {
        case FailureReason::non_positive: return "NonPositive";
        case FailureReason::odd_inert_exponent: return "OddInertExponent";
        case FailureReason::conductor_power_unrepresentable:
            return "ConductorPowerUnrepresentable";
        case FailureReason::class_equation_unsatisfiable: return "ClassEquationUnsatisfiable";
    }
    return "?";
}

struct Decision {
    bool verdict = false;
    std::optional<std::pair<Int, Int>> witness;
    // One entry per prime occurrence / conductor power: the factor's value and
    // the reduced form of the class chosen for it.  Their classes multiply to
    // the class of the decided form.
    std::vector<std::pair<Int, QuadForm>> class_witness;
    std::optional<FailureReason> failure;
    std::optional<Int> failure_prime;
    std::optional<unsigned> failure_power;
    std::vector<std::string> trace;
};

namespace detail {

inline std::string factorization_line(const Int& m, const Factorization& fact) {
    std::ostringstream os;
    os << "m = " << m << " = ";
    if (fact.factors.empty()) os << 1;
    for (std::size_t i = 0; i < fact.factors.size(); ++i) {
        if (i > 0) os << " * ";
        os << fact.factors[i].first;
        if (fact.factors[i].second > 1) os << "^" << fact.factors[i].second;
    }
    return os.str();
}

inline std::string class_set_line(const ClassGroup& group, const std::set<std::size_t>& s) {
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (std::size_t i : s) {
        if (!first) os << ", ";
        os << group.rep(i);
        first = false;
    }
    os << "}";
    return os.str();
}

}  // namespace detail

// Criterion (ii): the form's class must be a product of one class per prime
// occurrence coprime to the conductor, one class per conductor prime power,
// with every inert prime appearing to an even power.
inline Decision decide(const ClassGroup& group, const QuadForm& f, const Int& m) {
    require(f.is_positive_definite() && f.is_primitive(), errc::invalid_form,
            "decide covers primitive positive definite forms");
    require(f.discriminant() == group.ctx().D, errc::context_mismatch,
            "form discriminant differs from the group's");
    Decision d;
    std::ostringstream head;
    head << "decide " << f << " = " << m;
    d.trace.push_back(head.str());
    if (m <= 0) {
        d.failure = FailureReason::non_positive;
        d.trace.push_back("m is not positive");
        return d;
    }
    std::size_t target = group.index_of(reduce(f).first);
    {
        std::ostringstream os;
        os << "form reduces to " << group.rep(target);
        d.trace.push_back(os.str());
    }
    Factorization fact = factor(m);
    d.trace.push_back(detail::factorization_line(m, fact));

    std::vector<std::set<std::size_t>> sets;
    std::vector<Int> values;
    for (const auto& [p, e] : fact.factors) {
        std::ostringstream os;
        if (group.ctx().f % p == 0) {
            std::set<std::size_t> s = classes_representing_power(group, p, e);
            Int value = 1;
            for (unsigned i = 0; i < e; ++i) value *= p;
            os << p << ": conductor prime; classes taking the value " << value << ": "
               << detail::class_set_line(group, s);
            d.trace.push_back(os.str());
            if (s.empty()) {
                d.failure = FailureReason::conductor_power_unrepresentable;
                d.failure_prime = p;
                d.failure_power = e;
                d.trace.push_back("no class takes that conductor power");
                return d;
            }
            sets.push_back(std::move(s));
            values.push_back(value);
        } else if (kronecker(group.ctx().D, p) == -1) {
            if (e % 2 == 1) {
                os << p << ": inert with odd exponent " << e;
                d.trace.push_back(os.str());
                d.failure = FailureReason::odd_inert_exponent;
                d.failure_prime = p;
                d.failure_power = e;
                return d;
            }
            os << p << ": inert; even exponent " << e << " contributes the square ("
               << p << "^" << e / 2 << ")^2";
            d.trace.push_back(os.str());
        } else {
            std::set<std::size_t> s = classes_representing_prime(group, p);
            os << p << ": " << (kronecker(group.ctx().D, p) == 0 ? "ramified" : "split")
               << "; representing classes " << detail::class_set_line(group, s)
               << (e > 1 ? " (one choice per occurrence)" : "");
            d.trace.push_back(os.str());
            for (unsigned i = 0; i < e; ++i) {
                sets.push_back(s);
                values.push_back(p);
            }
        }
    }

    // Reachability DP with first-arrival parents for deterministic
    // backtracking: layer k records, for each class reached after k+1
    // factors, the predecessor class and the choice made.
    std::vector<std::map<std::size_t, std::pair<std::size_t, std::size_t>>> arrivals(sets.size());
    std::set<std::size_t> current = {group.identity()};
    for (std::size_t k = 0; k < sets.size(); ++k) {
        for (std::size_t have : current) {
            for (std::size_t pick : sets[k]) {
                arrivals[k].try_emplace(group.mul(have, pick), have, pick);
            }
        }
        current.clear();
        for (const auto& [reached, parent] : arrivals[k]) {
            (void)parent;
            current.insert(reached);
        }
    }
    {
        std::ostringstream os;
        os << "reachable classes " << detail::class_set_line(group, current);
        d.trace.push_back(os.str());
    }

    if (current.count(target) == 0) {
        d.failure = FailureReason::class_equation_unsatisfiable;
        d.trace.push_back("the form's class is not reachable");
        return d;
    }

    d.verdict = true;
    d.class_witness.resize(sets.size());
    std::size_t at = target;
    for (std::size_t k = sets.size(); k-- > 0;) {
        const auto& [prev, pick] = arrivals[k].at(at);
        d.class_witness[k] = {values[k], group.rep(pick)};
        at = prev;
    }
    for (const auto& [value, rep] : d.class_witness) {
        std::ostringstream os;
        os << "assign " << value << " to class " << rep;
        d.trace.push_back(os.str());
    }
    d.witness = represent(f, m, false);
    check_internal(d.witness.has_value(), "a satisfiable class equation must have a witness");
    {
        std::ostringstream os;
        os << "witness (" << d.witness->first << ", " << d.witness->second << ")";
        d.trace.push_back(os.str());
    }
    return d;
}

inline Decision decide(const QuadForm& f, const Int& m) {
    require(f.is_positive_definite() && f.is_primitive(), errc::invalid_form,
            "decide covers primitive positive definite forms");
    ClassGroup group = enumerate_reduced(f.discriminant());
    return decide(group, f, m);
}

// Ground truth by exhaustive search.
inline std::optional<std::pair<Int, Int>> oracle_decide(const QuadForm& f, const Int& m) {
    require(f.is_positive_definite(), errc::invalid_form,
            "the oracle covers positive definite forms");
    return represent(f, m, false);
}

// The worked examples with closed-form criteria: each id names a form whose
// represented integers the source text characterizes by congruences.
inline const std::vector<std::string>& example_ids() {
    static const std::vector<std::string> ids = {"1.1", "1.2", "1.3", "8.2", "8.5"};
    return ids;
}

inline QuadForm example_form(const std::string& id) {
    if (id == "1.1") return {1, 0, 1};
    if (id == "1.2") return {3, 2, 3};
    if (id == "1.3") return {4, 2, 7};
    if (id == "8.2") return {2, 2, 3};
    if (id == "8.5") return {4, 4, 5};
    fail(errc::unknown_example, "unknown example id: " + id);
}

// The closed-form condition for each example, evaluated literally.
inline bool paper_predicate(const std::string& id, const Int& m) {
    require(m >= 1, errc::invalid_input, "the predicates cover positive integers");
    Factorization fact = factor(m);

    if (id == "1.1") {
        // x^2 + y^2: every prime = 3 mod 4 to an even power.
        for (const auto& [p, e] : fact.factors) {
            if (mod_floor(p, 4) == 3 && e % 2 == 1) return false;
        }
        return true;
    }
    if (id == "1.2") {
        // 3x^2 + 2xy + 3y^2: primes = 5, 7 mod 8 to even powers, and either
        // (a) no factor 2 and an odd count of primes = 3 mod 8, or (b) 4 | m.
        unsigned h = fact.exponent_of(2);
        unsigned count3 = 0;
        for (const auto& [p, e] : fact.factors) {
            Int r = mod_floor(p, 8);
            if (r == 5 || r == 7) {
                if (e % 2 == 1) return false;
            } else if (r == 3) {
                count3 += e;
            }
        }
        return (h == 0 && count3 % 2 == 1) || h >= 2;
    }
    if (id == "1.3") {
        // 4x^2 + 2xy + 7y^2: odd primes = 2 mod 3 to even powers, and either
        // (a) m prime to 6 with some prime factor mod which 2 is not a cube,
        // or (b) h2 even, h3 != 1, (h2, h3) != (0, 0).
        unsigned h2 = fact.exponent_of(2), h3 = fact.exponent_of(3);
        bool some_non_cube = false;
        for (const auto& [p, e] : fact.factors) {
            if (p == 2 || p == 3) continue;
            if (mod_floor(p, 3) == 2) {
                if (e % 2 == 1) return false;
            } else if (!is_cubic_residue(2, p)) {
                some_non_cube = true;
            }
        }
        if (h2 == 0 && h3 == 0 && some_non_cube) return true;
        return h2 % 2 == 0 && h3 != 1 && !(h2 == 0 && h3 == 0);
    }
    if (id == "8.2") {
        // 2x^2 + 2xy + 3y^2: primes = 11, 13, 17, 19 mod 20 to even powers,
        // and an odd count of factors that are 2 or = 3, 7 mod 20.
        unsigned tally = fact.exponent_of(2);
        for (const auto& [p, e] : fact.factors) {
            Int r = mod_floor(p, 20);
            if (r == 11 || r == 13 || r == 17 || r == 19) {
                if (e % 2 == 1) return false;
            } else if (r == 3 || r == 7) {
                tally += e;
            }
        }
        return tally % 2 == 1;
    }
    if (id == "8.5") {
        // 4x^2 + 4xy + 5y^2: primes = 3, 7 mod 8 to even powers, and either
        // (a) no factor 2 and an odd count of primes = 5 mod 8, or (b) h = 2,
        // or (c) h >= 4.
        unsigned h = fact.exponent_of(2);
        unsigned count5 = 0;
        for (const auto& [p, e] : fact.factors) {
            Int r = mod_floor(p, 8);
            if (r == 3 || r == 7) {
                if (e % 2 == 1) return false;
            } else if (r == 5) {
                count5 += e;
            }
        }
        return (h == 0 && count5 % 2 == 1) || h == 2 || h >= 4;
    }
    fail(errc::unknown_example, "unknown example id: " + id);
}

struct ExampleReport {
    std::string id;
    QuadForm form;
    Int max_m = 0;
    std::vector<Int> disagreements;
    double seconds = 0.0;
};

// Three-way agreement over 1..max_m: the decision procedure, the closed-form
// predicate, and the exhaustive oracle.
inline ExampleReport verify_example(const std::string& id, const Int& max_m) {
    ExampleReport report;
    report.id = id;
    report.form = example_form(id);
    report.max_m = max_m;
    ClassGroup group = enumerate_reduced(report.form.discriminant());
    auto start = std::chrono::steady_clock::now();
    for (Int m = 1; m <= max_m; ++m) {
        bool theorem = decide(group, report.form, m).verdict;
        bool closed = paper_predicate(id, m);
        bool oracle = oracle_decide(report.form, m).has_value();
        if (theorem != closed || closed != oracle) report.disagreements.push_back(m);
    }
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace bqf
