#pragma once

// Seeded sampling for property tests: Haar-distributed unitaries via the
// QR of a complex Gaussian matrix (with the R-diagonal phase fix, so the
// distribution is actually Haar and not QR-convention dependent), and
// uniformly random pure states.

#include <Eigen/Dense>
#include <Eigen/QR>

#include <cmath>
#include <random>

#include "envar/state.hpp"

namespace envar {

inline Matrix haar_unitary(Index dim, std::mt19937_64& rng) {
    if (dim < 1) throw OutOfRange("haar_unitary: dimension must be >= 1");
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix z(dim, dim);
    for (Index i = 0; i < dim; ++i)
        for (Index j = 0; j < dim; ++j) z(i, j) = Complex(gauss(rng), gauss(rng));

    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ();
    const Matrix& packed = qr.matrixQR();
    for (Index j = 0; j < dim; ++j) {
        const Complex d = packed(j, j);
        const double mag = std::abs(d);
        q.col(j) *= mag > 0 ? d / mag : Complex(1, 0);
    }
    return q;
}

inline PureState random_state(const SubsystemLayout& layout, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector amps(layout.total_dimension());
    for (Index i = 0; i < amps.size(); ++i) amps(i) = Complex(gauss(rng), gauss(rng));
    return PureState(layout, std::move(amps)).normalized();
}

}  // namespace envar
