// Labeled tensor product states and local operations, checked against dense
// reference implementations.

#include <gtest/gtest.h>

#include <complex>
#include <random>

#include "oracles.hpp"

namespace {

using envar::Complex;
using envar::Index;
using envar::Label;
using envar::LocalUnitary;
using envar::PureState;
using envar::SubsystemLayout;
using envar::Vector;

SubsystemLayout qubits(int n) {
    std::vector<Label> labels;
    std::vector<Index> dims;
    for (int i = 0; i < n; ++i) {
        labels.push_back("q" + std::to_string(i));
        dims.push_back(2);
    }
    return SubsystemLayout(labels, dims);
}

TEST(Layout, StridesPutFirstLabelMostSignificant) {
    const SubsystemLayout lay({"a", "b", "c"}, {2, 3, 4});
    EXPECT_EQ(lay.total_dimension(), 24);
    EXPECT_EQ(lay.composite_index({1, 2, 3}), 1 * 12 + 2 * 4 + 3);
    const oracle::Indexer ix({2, 3, 4});
    for (Index x = 0; x < 24; ++x) {
        EXPECT_EQ(lay.digits_of(x), ix.digits(x));
        EXPECT_EQ(lay.composite_index(ix.digits(x)), x);
    }
}

TEST(Layout, RejectsBadConstructions) {
    EXPECT_THROW(SubsystemLayout({"a", "a"}, {2, 2}), envar::DuplicateLabel);
    EXPECT_THROW(SubsystemLayout({"a"}, {0}), envar::OutOfRange);
    EXPECT_THROW(SubsystemLayout({"a"}, {2, 3}), envar::LayoutMismatch);
    EXPECT_THROW(SubsystemLayout({}, {}), envar::LayoutMismatch);
    const SubsystemLayout lay({"a", "b"}, {2, 2});
    EXPECT_THROW(lay.position("c"), envar::UnknownSubsystem);
    EXPECT_THROW(lay.positions_of({"a", "a"}), envar::DuplicateLabel);
}

TEST(BasisStates, PlaceTheSingleAmplitude) {
    const auto lay = SubsystemLayout({"a", "b"}, {2, 3});
    const auto s = PureState::basis(lay, {1, 2});
    EXPECT_EQ(s.amplitude(5), Complex(1, 0));
    EXPECT_DOUBLE_EQ(s.norm(), 1.0);
    EXPECT_THROW(PureState::basis(lay, 6), envar::OutOfRange);
}

TEST(Tensor, MatchesKroneckerOracle) {
    std::mt19937_64 rng(11);
    const auto la = SubsystemLayout({"a"}, {2});
    const auto lb = SubsystemLayout({"b", "c"}, {3, 2});
    const auto sa = envar::random_state(la, rng);
    const auto sb = envar::random_state(lb, rng);
    const auto prod = envar::tensor(sa, sb);
    const auto expect = oracle::kron(sa.amplitudes(), sb.amplitudes());
    for (Index x = 0; x < 12; ++x) EXPECT_EQ(prod.amplitude(x), Complex(expect(x, 0)));
    EXPECT_THROW(envar::tensor(sa, sa), envar::DuplicateLabel);
}

TEST(Tensor, AssociativityIsBitExact) {
    // Dyadic amplitudes multiply without rounding, so both association orders
    // must agree bit for bit.
    const auto mk = [](const Label& l, double x, double y) {
        Vector v(2);
        v << Complex(x, 0), Complex(0, y);
        return PureState(SubsystemLayout({l}, {2}), v);
    };
    const auto a = mk("a", 0.75, 0.25);
    const auto b = mk("b", 0.5, 0.125);
    const auto c = mk("c", 0.375, 0.0625);
    const auto left = envar::tensor(envar::tensor(a, b), c);
    const auto right = envar::tensor(a, envar::tensor(b, c));
    ASSERT_EQ(left.dimension(), right.dimension());
    for (Index x = 0; x < left.dimension(); ++x)
        EXPECT_EQ(left.amplitude(x), right.amplitude(x));
}

TEST(ApplyLocal, MatchesDenseOracle) {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 60; ++trial) {
        const auto lay = oracle::random_sites(rng, 2, 4, true);
        const auto state = envar::random_state(lay, rng);

        std::vector<Label> targets;
        std::uniform_int_distribution<std::size_t> pick(0, lay.size() - 1);
        std::size_t first = pick(rng);
        targets.push_back(lay.labels()[first]);
        if (lay.size() > 1 && trial % 2 == 0) {
            std::size_t second = pick(rng);
            while (second == first) second = pick(rng);
            targets.push_back(lay.labels()[second]);
        }
        Index dt = 1;
        for (const auto& l : targets) dt *= lay.dim(l);
        const LocalUnitary u{targets, envar::haar_unitary(dt, rng)};

        const auto moved = envar::apply_local(state, u);
        const auto expect = oracle::apply_full(state, u);
        EXPECT_LE((moved.amplitudes() - expect.amplitudes()).norm(), 1e-12);
    }
}

TEST(ApplyLocal, PreservesNormAndRoundTrips) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const auto lay = oracle::random_sites(rng, 1, 4);
        const auto state = envar::random_state(lay, rng);
        const Label target = lay.labels()[trial % lay.size()];
        const LocalUnitary u = LocalUnitary::single(target, envar::haar_unitary(lay.dim(target), rng));
        const auto moved = envar::apply_local(state, u);
        EXPECT_NEAR(moved.norm(), 1.0, 1e-10);
        const LocalUnitary back{u.targets, u.matrix.adjoint()};
        const auto restored = envar::apply_local(moved, back);
        EXPECT_LE((restored.amplitudes() - state.amplitudes()).norm(), 1e-12);
    }
}

TEST(ApplyLocal, LeavesComplementMarginalsUntouched) {
    std::mt19937_64 rng(37);
    int checked = 0;
    while (checked < 100) {
        const auto lay = oracle::random_sites(rng, 2, 4);
        const auto state = envar::random_state(lay, rng);
        const Label target = lay.labels()[static_cast<std::size_t>(checked) % lay.size()];
        const LocalUnitary u = LocalUnitary::single(target, envar::haar_unitary(lay.dim(target), rng));
        const auto moved = envar::apply_local(state, u);

        std::vector<Label> rest;
        for (const auto& l : lay.labels())
            if (l != target) rest.push_back(l);
        const auto before = oracle::reduced_density(state, rest);
        const auto after = oracle::reduced_density(moved, rest);
        EXPECT_LE((before - after).norm(), 1e-10);
        ++checked;
    }
}

TEST(ApplyLocal, ValidatesItsInputs) {
    std::mt19937_64 rng(41);
    const auto lay = qubits(2);
    const auto state = envar::random_state(lay, rng);
    envar::Matrix not_unitary = envar::Matrix::Ones(2, 2);
    EXPECT_THROW(envar::apply_local(state, LocalUnitary::single("q0", not_unitary)),
                 envar::NotUnitary);
    EXPECT_THROW(envar::apply_local(state, LocalUnitary::single("zz", envar::identity_matrix(2))),
                 envar::UnknownSubsystem);
    EXPECT_THROW(envar::apply_local(state, LocalUnitary{{"q0", "q0"}, envar::identity_matrix(4)}),
                 envar::DuplicateLabel);
    EXPECT_THROW(envar::apply_local(state, LocalUnitary::single("q0", envar::identity_matrix(4))),
                 envar::LayoutMismatch);
}

TEST(PartialTrace, MatchesReducedDensityOracle) {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 40; ++trial) {
        const auto lay = oracle::random_sites(rng, 2, 4, true);
        const auto state = envar::random_state(lay, rng);
        std::vector<Label> keep;
        for (std::size_t i = 0; i < lay.size(); ++i)
            if (i % 2 == static_cast<std::size_t>(trial % 2)) keep.push_back(lay.labels()[i]);
        if (keep.empty() || keep.size() == lay.size()) continue;
        const auto rho = envar::partial_trace(state, keep);
        const auto expect = oracle::reduced_density(state, keep);
        EXPECT_LE((rho.matrix - expect).norm(), 1e-12);
        EXPECT_NEAR(std::abs(rho.trace()), 1.0, 1e-10);
        EXPECT_TRUE(rho.is_hermitian());
    }
}

TEST(PartialTrace, RejectsEmptyAndFullKeeps) {
    std::mt19937_64 rng(47);
    const auto state = envar::random_state(qubits(2), rng);
    EXPECT_THROW(envar::partial_trace(state, {}), envar::BadPartition);
    EXPECT_THROW(envar::partial_trace(state, {"q0", "q1"}), envar::BadPartition);
}

TEST(States, PhaseComparisonAndNormalization) {
    std::mt19937_64 rng(53);
    const auto lay = qubits(2);
    const auto state = envar::random_state(lay, rng);
    const auto rotated = state.scaled(std::polar(1.0, 1.234));
    EXPECT_TRUE(envar::states_equal_up_to_phase(state, rotated));
    EXPECT_TRUE(envar::states_equal_up_to_phase(state, state));
    const auto zero = PureState(lay, Vector::Zero(4));
    EXPECT_THROW(zero.normalized(), envar::ZeroState);
    const auto b0 = PureState::basis(lay, 0);
    const auto b1 = PureState::basis(lay, 1);
    EXPECT_FALSE(envar::states_equal_up_to_phase(b0, b1));
}

TEST(States, InnerProductIsConjugateLinearInTheFirstArgument) {
    const auto lay = SubsystemLayout({"a"}, {2});
    Vector va(2), vb(2);
    va << Complex(0, 1), Complex(0, 0);
    vb << Complex(1, 0), Complex(0, 0);
    const PureState a(lay, va), b(lay, vb);
    EXPECT_EQ(envar::inner_product(a, b), Complex(0, -1));
}

TEST(Matrices, TranspositionAndPhaseAreUnitary) {
    const auto t = envar::basis_transposition(4, 1, 3);
    EXPECT_TRUE(envar::is_unitary(t));
    EXPECT_EQ(t(1, 3), Complex(1, 0));
    EXPECT_EQ(t(1, 1), Complex(0, 0));
    const auto p = envar::level_phase(3, 1, 0.5);
    EXPECT_TRUE(envar::is_unitary(p));
    EXPECT_EQ(p(0, 0), Complex(1, 0));
    EXPECT_NEAR(std::arg(p(1, 1)), 0.5, 1e-15);
    EXPECT_FALSE(envar::is_unitary(envar::Matrix::Ones(2, 2)));
}

}  // namespace
