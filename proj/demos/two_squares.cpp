// Decides which integers are sums of two squares, with certificates.
//
//   ./demo_two_squares [m ...]
//
// For each m the class-group decision procedure runs against x^2 + y^2; a YES
// comes with an explicit witness, a NO with the structural reason.

#include <iostream>
#include <string>

#include "bqf/bqf.hpp"

int main(int argc, char** argv) {
    const bqf::QuadForm form{1, 0, 1};
    bqf::ClassGroup group = bqf::ClassGroup::enumerate(form.discriminant());

    std::vector<bqf::Int> targets;
    for (int i = 1; i < argc; ++i) targets.emplace_back(std::string(argv[i]));
    if (targets.empty()) targets = {2026, 45, 21, 9999, 99856, 1105};

    for (const bqf::Int& m : targets) {
        bqf::Decision decision = bqf::decide(group, form, m);
        std::cout << m << ": ";
        if (decision.verdict) {
            const auto& [x, y] = *decision.witness;
            std::cout << x << "^2 + " << y << "^2\n";
        } else {
            std::cout << "not a sum of two squares ("
                      << bqf::failure_name(*decision.failure);
            if (decision.failure_prime) std::cout << " at " << *decision.failure_prime;
            std::cout << ")\n";
        }
    }
    return 0;
}
