// A walk through the ideal-theoretic machinery for one non-maximal order:
// the class group of discriminant -108, a decision with its class
// certificate, an ideal factorization, and the projection onto the class
// group of the maximal order.

#include <iostream>

#include "bqf/bqf.hpp"

int main() {
    using namespace bqf;

    ClassGroup group = ClassGroup::enumerate(-108);
    std::cout << "class group of discriminant -108 (conductor " << group.ctx().f << ")\n";
    for (std::size_t i = 0; i < group.size(); ++i)
        std::cout << "  [" << i << "] " << group.rep(i) << "\n";

    // 63 = 9 * 7 splits as a conductor-power part and a split prime.
    QuadForm f{4, 2, 7};
    Decision decision = decide(group, f, 63);
    std::cout << "\n" << f << " represents 63: " << (decision.verdict ? "yes" : "no") << "\n";
    for (const auto& [value, cls] : decision.class_witness)
        std::cout << "  factor " << value << " carried by class " << cls << "\n";
    std::cout << "  witness (x, y) = (" << decision.witness->first << ", "
              << decision.witness->second << ")\n";

    // The same structure at the level of ideals: factor an ideal of norm 63,
    // built from an equivalent form whose leading coefficient is 63.
    OrderIdeal a = form_to_ideal(lead_with(f, 63)->first);
    IdealDecomposition parts = decompose_order_ideal(a);
    std::cout << "\nideal " << a << " of norm " << ideal_norm(a) << " factors as\n";
    for (const auto& [prime, exponent] : parts.split_ramified)
        std::cout << "  prime " << prime << " to the power " << exponent << "\n";
    for (const auto& [l, part] : parts.conductor_parts)
        std::cout << "  conductor-" << l << " part " << part << "\n";

    // Projection to the maximal order -3 collapses all three classes.
    ClassGroup maximal = ClassGroup::enumerate(-3);
    for (std::size_t i = 0; i < group.size(); ++i) {
        ClassElem image = surjection_pi({&group, i}, maximal);
        std::cout << (i == 0 ? "\n" : "") << "pi[" << group.rep(i) << "] = " << image.form()
                  << "\n";
    }
    return 0;
}
