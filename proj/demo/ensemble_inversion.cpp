// Builds the M-copy system-apparatus state, groups it into count sectors,
// and checks the extracted amplitudes against the closed form. Then attaches
// the counter and prints both Schmidt coefficient lists of the same state.

#include <cmath>
#include <iostream>

#include "envar/envar.hpp"

int main() {
    const std::int64_t M = 4;
    const envar::EnsembleSpec spec{M, envar::Complex(std::sqrt(1.0 / 3.0), 0),
                                   envar::Complex(std::sqrt(2.0 / 3.0), 0)};

    const auto state = envar::build_ensemble(spec);
    const auto sectors = envar::expand_count_sectors(state, spec);
    std::cout << "count sectors for M = " << M << ", |alpha|^2 = 1/3:\n";
    for (const auto& sec : sectors.sectors)
        std::cout << "  m=" << sec.m << "  multiplicity=" << sec.multiplicity
                  << "  |Gamma|=" << std::abs(sec.amplitude) << "\n";

    const auto dist = envar::count_distribution(M, envar::BigRational(1, 3));
    std::cout << "exact count distribution:";
    for (const auto& p : dist.probabilities) std::cout << " " << p;
    std::cout << "\n";

    const auto counted = envar::attach_counter(state, spec);
    const auto duals = envar::dual_decompositions(counted);
    std::cout << "fine-cut coefficients:";
    for (double c : duals.first.coefficients) std::cout << " " << c;
    std::cout << "\ncoarse-cut coefficients:";
    for (double c : duals.second.coefficients) std::cout << " " << c;
    std::cout << "\n";

    std::cout << "deviant fraction beyond epsilon = 1/10 at bias 1/2:\n";
    for (std::int64_t copies : {25, 50, 100, 200, 400})
        std::cout << "  M=" << copies << ": "
                  << envar::maverick_fraction(copies, envar::BigRational(1, 10),
                                              envar::BigRational(1, 2))
                          .convert_to<double>()
                  << "\n";
    return 0;
}
