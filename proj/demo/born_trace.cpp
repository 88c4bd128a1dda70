// Derives p(0) and p(1) for a state with amplitudes sqrt(n/r) and sqrt(m/r),
// printing each certified step, then repeats the derivation through the
// induction route that never sums branch probabilities.

#include <iostream>

#include "envar/envar.hpp"

namespace {

void print(const envar::ProbabilityAssignment& a) {
    for (const auto& step : a.derivation)
        std::cout << "  [" << envar::to_string(step.kind) << "] " << step.claim << " => "
                  << step.value << "\n";
    std::cout << "  p(0) = " << a.p0 << ", p(1) = " << a.p1 << "\n";
}

}  // namespace

int main() {
    const envar::CommensurateInput weights{7, 3};

    std::cout << "additivity route for (7, 3):\n";
    print(envar::born_probabilities(weights));

    std::cout << "\ninduction route for (7, 3):\n";
    print(envar::born_without_additivity(weights));

    envar::BornOptions verified;
    verified.verify_envariance = true;
    std::cout << "\nadditivity route for (5, 3), certificate checked swap by swap:\n";
    print(envar::born_probabilities({5, 3}, verified));

    const auto bounds = envar::dedekind_bounds(envar::parse_rational("1/3"), envar::BigInt(100));
    std::cout << "\nrational bounds for 1/3 with denominator 100: " << bounds.lower << " and "
              << bounds.upper << "\n";
    return 0;
}
