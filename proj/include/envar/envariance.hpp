#pragma once

// Envariance decision: does a unitary acting on one side of a cut admit a
// counter-unitary on the other side that restores the global state?
//
// The criterion is purification equivalence: the counter exists exactly when
// the reduced density matrix on the acted side is unchanged. When it is, the
// counter is assembled from the two aligned Schmidt decompositions, with the
// alignment of degenerate coefficient blocks recovered from the overlap of
// the left singular bases.

#include <Eigen/Dense>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "envar/errors.hpp"
#include "envar/rational.hpp"
#include "envar/schmidt.hpp"
#include "envar/state.hpp"

namespace envar {

struct EnvarianceVerdict {
    bool envariant = false;
    // Distance between the restored state and the original, after global-phase
    // alignment. When no counter exists the restored state is undefined, so
    // the Frobenius distance of the acted-side reduced matrices is reported.
    double residual = 0.0;
    std::optional<LocalUnitary> counter;  // acts on the full complement side
};

namespace detail {

inline std::vector<Label> layout_ordered(const SubsystemLayout& lay,
                                         const std::vector<Label>& side) {
    std::vector<Label> out;
    out.reserve(side.size());
    for (auto p : lay.positions_of(side)) out.push_back(lay.labels()[p]);
    return out;
}

// Polar factor of a square matrix: the nearest unitary.
inline Matrix polar_unitary(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

// Columns of an orthonormal completion of the given orthonormal columns.
inline Matrix orthonormal_completion(const Matrix& cols) {
    const Index d = cols.rows();
    const Index r = cols.cols();
    if (r >= d) return Matrix(d, 0);
    Eigen::HouseholderQR<Matrix> qr(cols);
    const Matrix q = qr.householderQ();
    return q.rightCols(d - r);
}

}  // namespace detail

inline EnvarianceVerdict decide_envariance(const PureState& state, const LocalUnitary& u,
                                           const Bipartition& cut, const Tolerances& tol = {}) {
    const auto& lay = state.layout();
    cut.validate(lay);
    if (!state.is_normalized(tol))
        throw NotNormalized("decide_envariance: state must be normalized");

    const auto on_side = [&](const std::vector<Label>& side) {
        return std::all_of(u.targets.begin(), u.targets.end(), [&](const Label& t) {
            return std::find(side.begin(), side.end(), t) != side.end();
        });
    };
    std::vector<Label> acted, other;
    if (on_side(cut.left)) {
        acted = cut.left;
        other = cut.right;
    } else if (on_side(cut.right)) {
        acted = cut.right;
        other = cut.left;
    } else {
        throw BadPartition("decide_envariance: unitary straddles the cut");
    }

    const PureState moved = apply_local(state, u, tol);

    const auto acted_pos = lay.positions_of(acted);
    const Matrix a0 = detail::amplitude_matrix(state, acted_pos);
    const Matrix a1 = detail::amplitude_matrix(moved, acted_pos);

    const double rho_dist = (a0 * a0.adjoint() - a1 * a1.adjoint()).norm();
    if (rho_dist > tol.state) return EnvarianceVerdict{false, rho_dist, std::nullopt};

    auto s0 = detail::svd_thin(a0);
    auto s1 = detail::svd_thin(a1);

    Index rank = 0;
    while (rank < s0.s.size() && s0.s(rank) > 1e-9) ++rank;
    const Index dc = a0.cols();
    if (dc < rank)
        throw ComplementTooSmall("decide_envariance: complement smaller than Schmidt rank");

    // Block-diagonal alignment over (nearly) degenerate coefficient runs. With
    // equal reduced matrices, the overlap of the two left bases is unitary
    // inside each run and vanishes between runs; projecting each diagonal
    // block to its polar factor discards the numerical residue.
    Matrix omega = Matrix::Zero(rank, rank);
    for (Index lo = 0; lo < rank;) {
        Index hi = lo + 1;
        while (hi < rank && s0.s(hi - 1) - s0.s(hi) <= 1e-9) ++hi;
        const Matrix overlap =
            s0.u.middleCols(lo, hi - lo).adjoint() * s1.u.middleCols(lo, hi - lo);
        omega.block(lo, lo, hi - lo, hi - lo) = detail::polar_unitary(overlap);
        lo = hi;
    }

    // Right vectors are conj(V) columns; the counter maps each of the moved
    // state's aligned right vectors onto the original's partner, extended by
    // any unitary between the orthogonal complements.
    const Matrix v0 = s0.v.leftCols(rank);
    const Matrix v1 = s1.v.leftCols(rank) * omega.adjoint();
    Matrix wt = v1 * v0.adjoint();
    if (rank < dc) {
        const Matrix y0 = detail::orthonormal_completion(v0);
        const Matrix y1 = detail::orthonormal_completion(v1);
        wt += y1 * y0.adjoint();
    }

    // The matrix above is indexed by the complement's layout-order sub-index,
    // so the counter must name its targets in that same order.
    LocalUnitary counter{detail::layout_ordered(lay, other), wt.transpose()};
    const PureState restored = apply_local(moved, counter, tol);

    const Complex overlap = inner_product(restored, state);
    const Complex phase =
        std::abs(overlap) > 0 ? overlap / std::abs(overlap) : Complex(1, 0);
    const double residual = (state.amplitudes() - phase * restored.amplitudes()).norm();

    if (residual > tol.state) return EnvarianceVerdict{false, residual, std::nullopt};
    return EnvarianceVerdict{true, residual, std::move(counter)};
}

struct SwapCheck {
    std::size_t i = 0;
    std::size_t j = 0;
    double residual = 0.0;
};

struct EquiprobabilityCertificate {
    std::vector<std::size_t> branch_indices;
    BigRational probability_each;   // 1 / branch count, exact
    std::vector<SwapCheck> swaps;   // verified adjacent-branch transpositions
};

// All Schmidt branches of equal weight carry equal probability: every adjacent
// transposition of branches on the left side is checked to be envariant, and
// adjacent transpositions generate the full permutation group. The numeric
// equality test is fixed at relative 1e-9; the certificate itself is exact.
inline EquiprobabilityCertificate equiprobability_from_swaps(const PureState& state,
                                                             const Bipartition& cut,
                                                             const Tolerances& tol = {},
                                                             double equal_tol = 1e-9) {
    if (!state.is_normalized(tol))
        throw NotNormalized("equiprobability_from_swaps: state must be normalized");
    const auto sd = schmidt_decompose(state, cut, tol);
    const std::size_t r = sd.rank();
    if (r == 0) throw ZeroState("equiprobability_from_swaps: no branches");

    const double top = sd.coefficients[0];
    const double bottom = sd.coefficients[r - 1];
    if ((top - bottom) > equal_tol * top)
        throw NotEquiprobable("branch weights differ beyond tolerance", 0, r - 1, top, bottom);

    EquiprobabilityCertificate cert;
    cert.branch_indices.resize(r);
    for (std::size_t k = 0; k < r; ++k) cert.branch_indices[k] = k;
    cert.probability_each = BigRational(1, static_cast<std::int64_t>(r));

    const Index dl = sd.left_basis.rows();
    const auto left_targets = detail::layout_ordered(state.layout(), cut.left);
    for (std::size_t k = 0; k + 1 < r; ++k) {
        const Vector a = sd.left_basis.col(static_cast<Index>(k));
        const Vector b = sd.left_basis.col(static_cast<Index>(k + 1));
        Matrix t = Matrix::Identity(dl, dl);
        t -= a * a.adjoint();
        t -= b * b.adjoint();
        t += a * b.adjoint();
        t += b * a.adjoint();
        const auto verdict = decide_envariance(state, LocalUnitary{left_targets, t}, cut, tol);
        if (!verdict.envariant)
            throw SpecMismatch("equiprobability_from_swaps: certified transposition failed");
        cert.swaps.push_back(SwapCheck{k, k + 1, verdict.residual});
    }
    return cert;
}

}  // namespace envar
