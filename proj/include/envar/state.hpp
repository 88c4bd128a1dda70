#pragma once

// Pure states over labeled tensor factors, local unitaries, partial trace.
//
// Composite basis indices are mixed-radix with the first label as the most
// significant digit: for labels (S, E) with dims (2, 3), index = 3*s + e.
// Every function here is a pure function of its inputs; all values are
// immutable after construction.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "envar/errors.hpp"

namespace envar {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using Label = std::string;
using Index = std::int64_t;

struct Tolerances {
    double norm = 1e-10;     // norm and trace checks
    double unitary = 1e-10;  // U†U = I deviation
    double state = 1e-9;     // state and operator distances
};

class SubsystemLayout {
public:
    SubsystemLayout() = default;

    SubsystemLayout(std::vector<Label> labels, std::vector<Index> dims)
        : labels_(std::move(labels)), dims_(std::move(dims)) {
        if (labels_.size() != dims_.size())
            throw LayoutMismatch("layout: label/dimension count mismatch");
        if (labels_.empty()) throw LayoutMismatch("layout: no subsystems");
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            if (dims_[i] < 1)
                throw OutOfRange("layout: dimension of '" + labels_[i] + "' must be >= 1");
            for (std::size_t j = i + 1; j < labels_.size(); ++j)
                if (labels_[i] == labels_[j])
                    throw DuplicateLabel("layout: duplicate label '" + labels_[i] + "'");
        }
        strides_.assign(dims_.size(), 1);
        total_ = 1;
        for (std::size_t i = dims_.size(); i-- > 0;) {
            strides_[i] = total_;
            if (total_ > std::numeric_limits<Index>::max() / dims_[i])
                throw OutOfRange("layout: total dimension overflows");
            total_ *= dims_[i];
        }
    }

    const std::vector<Label>& labels() const { return labels_; }
    const std::vector<Index>& dims() const { return dims_; }
    std::size_t size() const { return labels_.size(); }
    Index total_dimension() const { return total_; }

    bool has_label(const Label& l) const {
        return std::find(labels_.begin(), labels_.end(), l) != labels_.end();
    }

    std::size_t position(const Label& l) const {
        const auto it = std::find(labels_.begin(), labels_.end(), l);
        if (it == labels_.end()) throw UnknownSubsystem("unknown subsystem '" + l + "'");
        return static_cast<std::size_t>(it - labels_.begin());
    }

    Index dim(const Label& l) const { return dims_[position(l)]; }
    Index stride(std::size_t pos) const { return strides_[pos]; }

    Index composite_index(const std::vector<Index>& digits) const {
        if (digits.size() != dims_.size())
            throw LayoutMismatch("composite_index: digit count mismatch");
        Index idx = 0;
        for (std::size_t i = 0; i < digits.size(); ++i) {
            if (digits[i] < 0 || digits[i] >= dims_[i])
                throw OutOfRange("composite_index: digit out of range");
            idx += digits[i] * strides_[i];
        }
        return idx;
    }

    std::vector<Index> digits_of(Index idx) const {
        std::vector<Index> digits(dims_.size());
        for (std::size_t i = 0; i < dims_.size(); ++i) {
            digits[i] = (idx / strides_[i]) % dims_[i];
        }
        return digits;
    }

    // Positions of the given labels, sorted ascending. Rejects unknown and
    // repeated labels.
    std::vector<std::size_t> positions_of(const std::vector<Label>& subset) const {
        std::vector<std::size_t> pos;
        pos.reserve(subset.size());
        for (const auto& l : subset) pos.push_back(position(l));
        std::sort(pos.begin(), pos.end());
        for (std::size_t i = 1; i < pos.size(); ++i)
            if (pos[i] == pos[i - 1])
                throw DuplicateLabel("repeated label '" + labels_[pos[i]] + "' in subset");
        return pos;
    }

    friend bool operator==(const SubsystemLayout& a, const SubsystemLayout& b) {
        return a.labels_ == b.labels_ && a.dims_ == b.dims_;
    }

private:
    std::vector<Label> labels_;
    std::vector<Index> dims_;
    std::vector<Index> strides_;
    Index total_ = 0;
};

namespace detail {

// Walks all composite indices in order, tracking the mixed-radix sub-index over
// the masked labels and over their complement (both in layout order).
// f(composite, masked_sub_index, complement_sub_index) is called once per index.
template <class F>
void for_each_split(const SubsystemLayout& lay, const std::vector<bool>& mask, F&& f) {
    const std::size_t n = lay.size();
    const auto& dims = lay.dims();

    std::vector<Index> row_stride(n, 0), col_stride(n, 0);
    Index row_acc = 1, col_acc = 1;
    for (std::size_t i = n; i-- > 0;) {
        if (mask[i]) {
            row_stride[i] = row_acc;
            row_acc *= dims[i];
        } else {
            col_stride[i] = col_acc;
            col_acc *= dims[i];
        }
    }

    std::vector<Index> digit(n, 0);
    Index row = 0, col = 0;
    const Index total = lay.total_dimension();
    for (Index x = 0;;) {
        f(x, row, col);
        if (++x == total) break;
        std::size_t i = n - 1;
        for (;;) {
            ++digit[i];
            row += row_stride[i];
            col += col_stride[i];
            if (digit[i] < dims[i]) break;
            row -= dims[i] * row_stride[i];
            col -= dims[i] * col_stride[i];
            digit[i] = 0;
            --i;
        }
    }
}

inline std::vector<bool> mask_of(const SubsystemLayout& lay,
                                 const std::vector<std::size_t>& positions) {
    std::vector<bool> mask(lay.size(), false);
    for (auto p : positions) mask[p] = true;
    return mask;
}

}  // namespace detail

class PureState {
public:
    PureState(SubsystemLayout layout, Vector amplitudes)
        : layout_(std::move(layout)), amps_(std::move(amplitudes)) {
        if (amps_.size() != layout_.total_dimension())
            throw LayoutMismatch("state: amplitude vector length does not match layout");
    }

    static PureState basis(const SubsystemLayout& layout, Index composite) {
        if (composite < 0 || composite >= layout.total_dimension())
            throw OutOfRange("basis: composite index out of range");
        Vector v = Vector::Zero(layout.total_dimension());
        v(composite) = Complex(1.0, 0.0);
        return PureState(layout, std::move(v));
    }

    static PureState basis(const SubsystemLayout& layout, const std::vector<Index>& digits) {
        return basis(layout, layout.composite_index(digits));
    }

    const SubsystemLayout& layout() const { return layout_; }
    const Vector& amplitudes() const { return amps_; }
    Index dimension() const { return amps_.size(); }
    Complex amplitude(Index i) const { return amps_(i); }

    double norm() const { return amps_.norm(); }

    bool is_normalized(const Tolerances& tol = {}) const {
        return std::abs(amps_.squaredNorm() - 1.0) <= tol.norm;
    }

    PureState normalized() const {
        const double n = norm();
        if (n < std::numeric_limits<double>::min())
            throw ZeroState("cannot normalize the zero state");
        return PureState(layout_, amps_ / n);
    }

    PureState scaled(Complex factor) const { return PureState(layout_, factor * amps_); }

private:
    SubsystemLayout layout_;
    Vector amps_;
};

// A unitary bound to an ordered list of subsystem labels. The matrix acts on
// the tensor product of the targets in the given order (first target most
// significant). Most unitaries target a single label; counters constructed by
// the envariance decision may span a whole side of a bipartition.
struct LocalUnitary {
    std::vector<Label> targets;
    Matrix matrix;

    static LocalUnitary single(Label target, Matrix m) {
        return LocalUnitary{{std::move(target)}, std::move(m)};
    }
};

struct DensityMatrix {
    std::vector<Label> labels;  // retained labels, in layout order
    Matrix matrix;

    double trace() const { return matrix.trace().real(); }

    bool is_hermitian(const Tolerances& tol = {}) const {
        return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff() <= tol.norm;
    }
};

inline Matrix identity_matrix(Index dim) { return Matrix::Identity(dim, dim); }

// Exchanges basis levels i and j, identity elsewhere.
inline Matrix basis_transposition(Index dim, Index i, Index j) {
    if (i < 0 || j < 0 || i >= dim || j >= dim)
        throw OutOfRange("basis_transposition: level out of range");
    Matrix m = Matrix::Identity(dim, dim);
    if (i != j) {
        m(i, i) = m(j, j) = Complex(0, 0);
        m(i, j) = m(j, i) = Complex(1, 0);
    }
    return m;
}

// exp(i*phi) on one level, 1 elsewhere.
inline Matrix level_phase(Index dim, Index level, double phi) {
    if (level < 0 || level >= dim) throw OutOfRange("level_phase: level out of range");
    Matrix m = Matrix::Identity(dim, dim);
    m(level, level) = std::polar(1.0, phi);
    return m;
}

inline Complex inner_product(const PureState& a, const PureState& b) {
    if (!(a.layout() == b.layout()))
        throw LayoutMismatch("inner_product: layouts differ");
    return a.amplitudes().dot(b.amplitudes());
}

inline PureState tensor(const PureState& a, const PureState& b) {
    for (const auto& l : b.layout().labels())
        if (a.layout().has_label(l))
            throw DuplicateLabel("tensor: label '" + l + "' present on both sides");

    std::vector<Label> labels = a.layout().labels();
    labels.insert(labels.end(), b.layout().labels().begin(), b.layout().labels().end());
    std::vector<Index> dims = a.layout().dims();
    dims.insert(dims.end(), b.layout().dims().begin(), b.layout().dims().end());
    SubsystemLayout layout(std::move(labels), std::move(dims));

    const Index nb = b.dimension();
    Vector amps(layout.total_dimension());
    for (Index i = 0; i < a.dimension(); ++i)
        for (Index j = 0; j < nb; ++j)
            amps(i * nb + j) = a.amplitude(i) * b.amplitude(j);
    return PureState(std::move(layout), std::move(amps));
}

inline bool is_unitary(const Matrix& m, const Tolerances& tol = {}) {
    if (m.rows() != m.cols()) return false;
    return (m.adjoint() * m - Matrix::Identity(m.cols(), m.cols()))
               .cwiseAbs()
               .maxCoeff() <= tol.unitary;
}

// (I ⊗ ... ⊗ U ⊗ ... ⊗ I) |ψ⟩ with U on the target labels.
inline PureState apply_local(const PureState& state, const LocalUnitary& u,
                             const Tolerances& tol = {}) {
    const auto& lay = state.layout();
    if (u.targets.empty()) throw UnknownSubsystem("apply_local: no target labels");

    std::vector<std::size_t> target_pos;
    target_pos.reserve(u.targets.size());
    Index dt = 1;
    for (const auto& l : u.targets) {
        const auto p = lay.position(l);
        if (std::find(target_pos.begin(), target_pos.end(), p) != target_pos.end())
            throw DuplicateLabel("apply_local: repeated target '" + l + "'");
        target_pos.push_back(p);
        dt *= lay.dims()[p];
    }
    if (u.matrix.rows() != dt || u.matrix.cols() != dt)
        throw LayoutMismatch("apply_local: matrix dimension does not match targets");
    if (!is_unitary(u.matrix, tol))
        throw NotUnitary("apply_local: matrix is not unitary within tolerance");

    // Offset of each target sub-index, digits in target order.
    std::vector<Index> offsets(dt);
    {
        std::vector<Index> tdigit(target_pos.size(), 0);
        Index off = 0;
        for (Index t = 0;;) {
            offsets[t] = off;
            if (++t == dt) break;
            std::size_t j = target_pos.size() - 1;
            for (;;) {
                ++tdigit[j];
                off += lay.stride(target_pos[j]);
                if (tdigit[j] < lay.dims()[target_pos[j]]) break;
                off -= lay.dims()[target_pos[j]] * lay.stride(target_pos[j]);
                tdigit[j] = 0;
                --j;
            }
        }
    }

    std::vector<std::size_t> rest_pos;
    for (std::size_t i = 0; i < lay.size(); ++i)
        if (std::find(target_pos.begin(), target_pos.end(), i) == target_pos.end())
            rest_pos.push_back(i);

    Vector out(state.dimension());
    Vector in_block(dt);
    std::vector<Index> rdigit(rest_pos.size(), 0);
    Index base = 0;
    const Index rest_total = state.dimension() / dt;
    for (Index r = 0;;) {
        for (Index t = 0; t < dt; ++t) in_block(t) = state.amplitude(base + offsets[t]);
        const Vector out_block = u.matrix * in_block;
        for (Index t = 0; t < dt; ++t) out(base + offsets[t]) = out_block(t);
        if (++r == rest_total) break;
        std::size_t j = rest_pos.size() - 1;
        for (;;) {
            ++rdigit[j];
            base += lay.stride(rest_pos[j]);
            if (rdigit[j] < lay.dims()[rest_pos[j]]) break;
            base -= lay.dims()[rest_pos[j]] * lay.stride(rest_pos[j]);
            rdigit[j] = 0;
            --j;
        }
    }
    return PureState(lay, std::move(out));
}

// Reduced density matrix over the kept labels (layout order). The keep set
// must be a nonempty proper subset of the layout's labels.
inline DensityMatrix partial_trace(const PureState& state, const std::vector<Label>& keep) {
    const auto& lay = state.layout();
    if (keep.empty()) throw BadPartition("partial_trace: empty keep set");
    const auto keep_pos = lay.positions_of(keep);
    if (keep_pos.size() == lay.size())
        throw BadPartition("partial_trace: keep set covers every subsystem");

    Index dk = 1;
    for (auto p : keep_pos) dk *= lay.dims()[p];
    const Index dr = lay.total_dimension() / dk;

    Matrix psi = Matrix::Zero(dk, dr);
    detail::for_each_split(lay, detail::mask_of(lay, keep_pos),
                           [&](Index x, Index row, Index col) { psi(row, col) = state.amplitude(x); });

    std::vector<Label> kept_labels;
    kept_labels.reserve(keep_pos.size());
    for (auto p : keep_pos) kept_labels.push_back(lay.labels()[p]);
    return DensityMatrix{std::move(kept_labels), psi * psi.adjoint()};
}

// Ray equality: |⟨a|b⟩| >= (1 - τ_state) ‖a‖ ‖b‖.
inline bool states_equal_up_to_phase(const PureState& a, const PureState& b,
                                     const Tolerances& tol = {}) {
    if (!(a.layout() == b.layout()))
        throw LayoutMismatch("states_equal_up_to_phase: layouts differ");
    return std::abs(inner_product(a, b)) >= (1.0 - tol.state) * a.norm() * b.norm();
}

}  // namespace envar
