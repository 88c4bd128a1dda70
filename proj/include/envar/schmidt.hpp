#pragma once

// Bipartite Schmidt decomposition with deterministic phase canonicalization.
//
// A cut splits the layout's labels into a left and a right set. The amplitude
// vector is reshaped into a left x right matrix (each side indexed mixed-radix
// in layout order) and factored by SVD. Coefficients come back descending;
// each left vector's largest-magnitude entry is made real positive, with the
// compensating phase pushed into the paired right vector, so repeated runs on
// the same input produce identical output.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <utility>
#include <vector>

#include "envar/errors.hpp"
#include "envar/state.hpp"

namespace envar {

struct Bipartition {
    std::vector<Label> left;
    std::vector<Label> right;

    // Builds the cut whose left side is `left_side` and whose right side is
    // every remaining label, in layout order.
    static Bipartition complement_of(const SubsystemLayout& lay, std::vector<Label> left_side) {
        Bipartition cut;
        cut.left = std::move(left_side);
        const auto pos = lay.positions_of(cut.left);
        std::vector<bool> on_left(lay.size(), false);
        for (auto p : pos) on_left[p] = true;
        for (std::size_t i = 0; i < lay.size(); ++i)
            if (!on_left[i]) cut.right.push_back(lay.labels()[i]);
        return cut;
    }

    void validate(const SubsystemLayout& lay) const {
        if (left.empty() || right.empty())
            throw BadPartition("cut: both sides must be nonempty");
        const auto lp = lay.positions_of(left);
        const auto rp = lay.positions_of(right);
        std::vector<bool> seen(lay.size(), false);
        for (auto p : lp) seen[p] = true;
        for (auto p : rp) {
            if (seen[p])
                throw BadPartition("cut: label '" + lay.labels()[p] + "' appears on both sides");
            seen[p] = true;
        }
        if (lp.size() + rp.size() != lay.size())
            throw BadPartition("cut: sides do not cover every subsystem");
    }

    std::vector<std::size_t> left_positions(const SubsystemLayout& lay) const {
        return lay.positions_of(left);
    }
};

namespace detail {

// Reshape of the amplitude vector into a (masked subset) x (complement) matrix.
inline Matrix amplitude_matrix(const PureState& state, const std::vector<std::size_t>& row_pos) {
    const auto& lay = state.layout();
    Index dr = 1;
    for (auto p : row_pos) dr *= lay.dims()[p];
    const Index dc = lay.total_dimension() / dr;
    Matrix a(dr, dc);
    for_each_split(lay, mask_of(lay, row_pos),
                   [&](Index x, Index row, Index col) { a(row, col) = state.amplitude(x); });
    return a;
}

struct ThinSvd {
    Matrix u;
    Eigen::VectorXd s;
    Matrix v;
};

// Jacobi is exact enough and, with the column-pivoting preconditioner, cheap
// whenever the small side is small, which covers every cut this project
// builds. Divide-and-conquer takes over for genuinely large square-ish inputs.
inline ThinSvd svd_thin(const Matrix& a) {
    ThinSvd out;
    if (std::min(a.rows(), a.cols()) <= 128) {
        Eigen::JacobiSVD<Matrix, Eigen::ColPivHouseholderQRPreconditioner> svd(
            a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        out.u = svd.matrixU();
        out.s = svd.singularValues();
        out.v = svd.matrixV();
    } else {
        Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        out.u = svd.matrixU();
        out.s = svd.singularValues();
        out.v = svd.matrixV();
    }
    return out;
}

inline Eigen::VectorXd singular_values_of(const Matrix& a) {
    if (std::min(a.rows(), a.cols()) <= 128) {
        Eigen::JacobiSVD<Matrix, Eigen::ColPivHouseholderQRPreconditioner> svd(a);
        return svd.singularValues();
    }
    Eigen::BDCSVD<Matrix> svd(a);
    return svd.singularValues();
}

}  // namespace detail

struct SchmidtDecomposition {
    SubsystemLayout layout;  // layout of the decomposed state
    Bipartition cut;
    std::vector<double> coefficients;  // descending, one per kept pair
    Matrix left_basis;                 // d_left x r, orthonormal columns
    Matrix right_basis;                // d_right x r, orthonormal columns

    std::size_t rank(double threshold = 1e-9) const {
        std::size_t r = 0;
        while (r < coefficients.size() && coefficients[r] > threshold) ++r;
        return r;
    }

    // Σ_k c_k |left_k⟩|right_k⟩ laid back out on the original layout.
    PureState reconstruct() const {
        const auto row_pos = cut.left_positions(layout);
        Vector amps(layout.total_dimension());
        const Index r = static_cast<Index>(coefficients.size());
        detail::for_each_split(layout, detail::mask_of(layout, row_pos),
                               [&](Index x, Index row, Index col) {
                                   Complex v(0, 0);
                                   for (Index k = 0; k < r; ++k)
                                       v += coefficients[k] * left_basis(row, k) * right_basis(col, k);
                                   amps(x) = v;
                               });
        return PureState(layout, std::move(amps));
    }
};

inline SchmidtDecomposition schmidt_decompose(const PureState& state, const Bipartition& cut,
                                              const Tolerances& tol = {}) {
    (void)tol;
    cut.validate(state.layout());
    if (state.norm() < std::numeric_limits<double>::min())
        throw ZeroState("schmidt_decompose: zero state");

    const auto row_pos = cut.left_positions(state.layout());
    const Matrix a = detail::amplitude_matrix(state, row_pos);
    auto svd = detail::svd_thin(a);

    // ψ = Σ_k s_k u_k ⊗ conj(v_k); fold each left vector's canonical phase
    // into its partner.
    const Index r = svd.s.size();
    Matrix right = svd.v.conjugate();
    for (Index k = 0; k < r; ++k) {
        Index imax = 0;
        double best = -1.0;
        for (Index i = 0; i < svd.u.rows(); ++i) {
            const double mag = std::abs(svd.u(i, k));
            if (mag > best) {
                best = mag;
                imax = i;
            }
        }
        const Complex pivot = svd.u(imax, k);
        if (std::abs(pivot) > 0) {
            const Complex phase = pivot / std::abs(pivot);
            svd.u.col(k) *= std::conj(phase);
            right.col(k) *= phase;
        }
    }

    SchmidtDecomposition out;
    out.layout = state.layout();
    out.cut = cut;
    out.coefficients.assign(svd.s.data(), svd.s.data() + r);
    out.left_basis = std::move(svd.u);
    out.right_basis = std::move(right);
    return out;
}

// Singular values only, cheaper than a full decomposition. Rows of the
// reshaped matrix that are exactly zero cannot contribute and are dropped
// before factoring, which matters for sparse-by-construction states.
inline std::vector<double> schmidt_coefficients(const PureState& state, const Bipartition& cut) {
    cut.validate(state.layout());
    if (state.norm() < std::numeric_limits<double>::min())
        throw ZeroState("schmidt_coefficients: zero state");

    const auto row_pos = cut.left_positions(state.layout());
    Matrix a = detail::amplitude_matrix(state, row_pos);

    std::vector<Index> live;
    for (Index i = 0; i < a.rows(); ++i) {
        bool nonzero = false;
        for (Index j = 0; j < a.cols() && !nonzero; ++j)
            nonzero = a(i, j) != Complex(0, 0);
        if (nonzero) live.push_back(i);
    }
    if (static_cast<Index>(live.size()) < a.rows()) {
        Matrix compact(static_cast<Index>(live.size()), a.cols());
        for (Index i = 0; i < compact.rows(); ++i) compact.row(i) = a.row(live[i]);
        a = std::move(compact);
    }

    const Eigen::VectorXd s = detail::singular_values_of(a);
    std::vector<double> out(s.data(), s.data() + s.size());

    // Restore the count the untrimmed matrix would have produced.
    Index dr = 1;
    for (auto p : row_pos) dr *= state.layout().dims()[p];
    const Index dc = state.layout().total_dimension() / dr;
    out.resize(static_cast<std::size_t>(std::min(dr, dc)), 0.0);
    return out;
}

inline std::size_t schmidt_rank(const PureState& state, const Bipartition& cut,
                                double threshold = 1e-9) {
    if (threshold < 0) throw OutOfRange("schmidt_rank: negative threshold");
    const auto coeff = schmidt_coefficients(state, cut);
    std::size_t r = 0;
    for (double c : coeff)
        if (c > threshold) ++r;
    return r;
}

}  // namespace envar
