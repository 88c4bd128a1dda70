#pragma once

// M-copy measurement ensembles: the product state over system/record qubit
// pairs, its expansion into total-count sectors with amplitudes
// Gamma_m = sqrt(C(M,m)) * alpha^(M-m) * beta^m, the counter register that
// witnesses the count, the two Schmidt decompositions of the counted state,
// and the exact rational count distribution with its deviant-fraction tail.
//
// Everything has two routes: an explicit state construction (bounded by a
// dimension cap) and a closed-form big-integer route (bounded only by the
// copy cap); the explicit route cross-checks the formula wherever both run.

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "envar/errors.hpp"
#include "envar/rational.hpp"
#include "envar/schmidt.hpp"
#include "envar/state.hpp"

namespace envar {

struct EnsembleSpec {
    Index M = 1;      // number of copies
    Complex alpha;    // outcome-0 amplitude per copy
    Complex beta;     // outcome-1 amplitude per copy
};

struct EnsembleOptions {
    Index dimension_cap = Index(1) << 22;  // total dimension of explicit states
    Index copy_cap = 200;                  // M for the closed-form route
};

struct CountSector {
    Index m = 0;            // total count
    BigInt multiplicity;    // C(M, m)
    Complex amplitude;      // Gamma_m
    // Outcome strings of the sector in increasing order (bit M-1 is copy 1),
    // filled on the explicit route where enumeration is affordable.
    std::optional<std::vector<std::uint64_t>> members;
};

struct CountSectorDecomposition {
    Index M = 0;
    std::vector<CountSector> sectors;  // m = 0..M
};

struct CountDistribution {
    Index M = 0;
    std::vector<BigRational> probabilities;  // exact, indexed by m
};

namespace detail {

inline void validate_spec(const EnsembleSpec& spec, const EnsembleOptions& opt,
                          const Tolerances& tol) {
    if (spec.M < 1) throw OutOfRange("ensemble: M must be >= 1");
    if (spec.M > opt.copy_cap) throw DimensionCap("ensemble: M exceeds the copy cap");
    const double n2 = std::norm(spec.alpha) + std::norm(spec.beta);
    if (std::abs(n2 - 1.0) > tol.norm)
        throw NotNormalized("ensemble: |alpha|^2 + |beta|^2 must be 1");
}

inline std::vector<Complex> power_table(Complex z, Index up_to) {
    std::vector<Complex> p(static_cast<std::size_t>(up_to) + 1);
    p[0] = Complex(1, 0);
    for (Index k = 1; k <= up_to; ++k) p[static_cast<std::size_t>(k)] = p[k - 1] * z;
    return p;
}

}  // namespace detail

inline SubsystemLayout ensemble_layout(Index M) {
    std::vector<Label> labels;
    std::vector<Index> dims;
    labels.reserve(static_cast<std::size_t>(2 * M));
    for (Index k = 1; k <= M; ++k) {
        labels.push_back("S" + std::to_string(k));
        dims.push_back(2);
    }
    for (Index k = 1; k <= M; ++k) {
        labels.push_back("A" + std::to_string(k));
        dims.push_back(2);
    }
    return SubsystemLayout(std::move(labels), std::move(dims));
}

inline SubsystemLayout counted_ensemble_layout(Index M) {
    auto base = ensemble_layout(M);
    std::vector<Label> labels = base.labels();
    std::vector<Index> dims = base.dims();
    labels.push_back("C");
    dims.push_back(M + 1);
    return SubsystemLayout(std::move(labels), std::move(dims));
}

// Product of M copies of (alpha|0>|a0> + beta|1>|a1>), laid out as qubits
// S1..SM, A1..AM. Each record matches its system bit, so the nonzero
// amplitudes sit at composite index (s << M) | s.
inline PureState build_ensemble(const EnsembleSpec& spec, const EnsembleOptions& opt = {},
                                const Tolerances& tol = {}) {
    detail::validate_spec(spec, opt, tol);
    const Index M = spec.M;
    if (M > 30 || (Index(1) << (2 * M)) > opt.dimension_cap)
        throw DimensionCap("build_ensemble: explicit state exceeds the dimension cap");

    auto layout = ensemble_layout(M);
    Vector amps = Vector::Zero(layout.total_dimension());
    const auto ap = detail::power_table(spec.alpha, M);
    const auto bp = detail::power_table(spec.beta, M);
    const std::uint64_t strings = std::uint64_t(1) << M;
    for (std::uint64_t s = 0; s < strings; ++s) {
        const int w = std::popcount(s);
        amps(static_cast<Index>((s << M) | s)) = ap[static_cast<std::size_t>(M - w)] * bp[w];
    }
    return PureState(std::move(layout), std::move(amps));
}

// Net effect of running the counter circuit over a build_ensemble state: a
// C register of dimension M+1, initially at level 0, incremented once per
// record bit set. The result correlates level m with every weight-m branch.
inline PureState attach_counter(const PureState& state, const EnsembleSpec& spec,
                                const EnsembleOptions& opt = {}, const Tolerances& tol = {}) {
    detail::validate_spec(spec, opt, tol);
    const Index M = spec.M;
    if (!(state.layout() == ensemble_layout(M)))
        throw SpecMismatch("attach_counter: state does not carry the M-copy layout");
    const Index out_dim = state.dimension() * (M + 1);
    if (out_dim > opt.dimension_cap)
        throw DimensionCap("attach_counter: counted state exceeds the dimension cap");

    auto layout = counted_ensemble_layout(M);
    Vector amps = Vector::Zero(out_dim);
    const std::uint64_t record_mask = (std::uint64_t(1) << M) - 1;
    for (Index sa = 0; sa < state.dimension(); ++sa) {
        const Complex v = state.amplitude(sa);
        if (v == Complex(0, 0)) continue;
        const int c = std::popcount(static_cast<std::uint64_t>(sa) & record_mask);
        amps(sa * (M + 1) + c) = v;
    }
    return PureState(std::move(layout), std::move(amps));
}

// One step of the counter circuit: on targets {A_k, C}, leave C alone when
// the record bit is 0 and cyclically advance it when the bit is 1.
inline Matrix counter_increment_unitary(Index M) {
    if (M < 1) throw OutOfRange("counter_increment_unitary: M must be >= 1");
    const Index d = M + 1;
    Matrix u = Matrix::Zero(2 * d, 2 * d);
    for (Index c = 0; c < d; ++c) {
        u(c, c) = Complex(1, 0);                    // record 0: identity
        u(d + (c + 1) % d, d + c) = Complex(1, 0);  // record 1: increment
    }
    return u;
}

// Outcome strings of weight m over M copies, in increasing numeric order
// (copy 1 is the most significant bit). Cost is proportional to the output.
inline std::vector<std::uint64_t> sector_members(Index M, Index m) {
    if (M < 1 || M > 62 || m < 0 || m > M) throw OutOfRange("sector_members: bad (M, m)");
    std::vector<std::uint64_t> out;
    if (m == 0) {
        out.push_back(0);
        return out;
    }
    const std::uint64_t limit = std::uint64_t(1) << M;
    std::uint64_t v = (std::uint64_t(1) << m) - 1;
    while (v < limit) {
        out.push_back(v);
        const std::uint64_t t = v | (v - 1);  // next higher number with m bits set
        v = (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(v) + 1));
    }
    return out;
}

// Normalized sector state |s_m> on the S1..SM, A1..AM layout: the uniform
// superposition of all weight-m branches, record equal to outcome.
inline PureState sector_state(Index M, Index m, const EnsembleOptions& opt = {}) {
    if (M > 30 || (Index(1) << (2 * M)) > opt.dimension_cap)
        throw DimensionCap("sector_state: explicit state exceeds the dimension cap");
    const auto members = sector_members(M, m);
    auto layout = ensemble_layout(M);
    Vector amps = Vector::Zero(layout.total_dimension());
    const double amp = 1.0 / std::sqrt(static_cast<double>(members.size()));
    for (auto s : members) amps(static_cast<Index>((s << M) | s)) = amp;
    return PureState(std::move(layout), std::move(amps));
}

// Closed-form route: multiplicities and amplitudes from the binomial data.
inline CountSectorDecomposition expand_count_sectors(const EnsembleSpec& spec,
                                                     const EnsembleOptions& opt = {},
                                                     const Tolerances& tol = {}) {
    detail::validate_spec(spec, opt, tol);
    const Index M = spec.M;
    const auto ap = detail::power_table(spec.alpha, M);
    const auto bp = detail::power_table(spec.beta, M);

    CountSectorDecomposition out;
    out.M = M;
    out.sectors.reserve(static_cast<std::size_t>(M) + 1);
    for (Index m = 0; m <= M; ++m) {
        CountSector sec;
        sec.m = m;
        sec.multiplicity = binomial(M, m);
        sec.amplitude = std::sqrt(sec.multiplicity.convert_to<double>()) *
                        ap[static_cast<std::size_t>(M - m)] * bp[static_cast<std::size_t>(m)];
        out.sectors.push_back(std::move(sec));
    }
    return out;
}

// Explicit route: project the given state onto each sector state and check
// that nothing is left over, then check the projections against the closed
// form. Disagreement on either count means the state and spec do not
// describe the same ensemble.
inline CountSectorDecomposition expand_count_sectors(const PureState& state,
                                                     const EnsembleSpec& spec,
                                                     const EnsembleOptions& opt = {},
                                                     const Tolerances& tol = {}) {
    detail::validate_spec(spec, opt, tol);
    const Index M = spec.M;
    if (!(state.layout() == ensemble_layout(M)))
        throw SpecMismatch("expand_count_sectors: state does not carry the M-copy layout");

    CountSectorDecomposition out = expand_count_sectors(spec, opt, tol);

    // Mass anywhere except the record-mirrors-outcome branches, summed
    // directly so true zeros cannot be masked by cancellation noise.
    double off_pattern = 0.0;
    const Index low_mask = (Index(1) << M) - 1;
    for (Index x = 0; x < state.dimension(); ++x)
        if ((x >> M) != (x & low_mask)) off_pattern += std::norm(state.amplitude(x));
    if (std::sqrt(off_pattern) > tol.state)
        throw SpecMismatch("expand_count_sectors: amplitude off the correlated branches");

    for (Index m = 0; m <= M; ++m) {
        auto& sec = out.sectors[static_cast<std::size_t>(m)];
        const auto members = sector_members(M, m);
        Complex acc(0, 0);
        for (auto s : members) acc += state.amplitude(static_cast<Index>((s << M) | s));
        const double root_mult = std::sqrt(static_cast<double>(members.size()));
        const Complex projected = acc / root_mult;

        // Residual of the uniform-sector model inside this sector.
        double within = 0.0;
        for (auto s : members) {
            const Complex v = state.amplitude(static_cast<Index>((s << M) | s));
            within += std::norm(v - projected / root_mult);
        }
        if (std::sqrt(within) > tol.state)
            throw SpecMismatch("expand_count_sectors: branches within a sector are not uniform");
        if (std::abs(projected - sec.amplitude) > tol.state)
            throw SpecMismatch("expand_count_sectors: projection disagrees with the closed form");

        sec.amplitude = projected;
        sec.members = members;
    }
    return out;
}

// The two Schmidt decompositions of the counted state: across systems vs
// records-plus-counter, and across systems-plus-records vs counter.
inline std::pair<SchmidtDecomposition, SchmidtDecomposition> dual_decompositions(
    const PureState& state, const Tolerances& tol = {}) {
    const auto& lay = state.layout();
    if (lay.size() < 3 || lay.size() % 2 == 0)
        throw LayoutMismatch("dual_decompositions: expected S1..SM, A1..AM, C");
    const Index M = static_cast<Index>((lay.size() - 1) / 2);
    if (!(lay == counted_ensemble_layout(M)))
        throw LayoutMismatch("dual_decompositions: expected S1..SM, A1..AM, C");

    std::vector<Label> systems;
    for (Index k = 1; k <= M; ++k) systems.push_back("S" + std::to_string(k));
    std::vector<Label> systems_and_records = systems;
    for (Index k = 1; k <= M; ++k) systems_and_records.push_back("A" + std::to_string(k));

    const auto cut_s = Bipartition::complement_of(lay, systems);
    const auto cut_sa = Bipartition::complement_of(lay, systems_and_records);
    return {schmidt_decompose(state, cut_s, tol), schmidt_decompose(state, cut_sa, tol)};
}

// Exact count distribution from exact squared magnitudes a = |alpha|^2,
// b = |beta|^2 with a + b = 1.
inline CountDistribution count_distribution(Index M, const BigRational& a, const BigRational& b) {
    if (M < 1) throw OutOfRange("count_distribution: M must be >= 1");
    if (a < 0 || b < 0 || a + b != 1)
        throw NotNormalized("count_distribution: squared magnitudes must be >= 0 and sum to 1");

    CountDistribution out;
    out.M = M;
    out.probabilities.reserve(static_cast<std::size_t>(M) + 1);
    BigRational total = 0;
    for (Index m = 0; m <= M; ++m) {
        const BigRational p = BigRational(binomial(M, m)) * pow(a, M - m) * pow(b, m);
        total += p;
        out.probabilities.push_back(p);
    }
    if (total != 1) throw SpecMismatch("count_distribution: probabilities failed to sum to 1");
    return out;
}

inline CountDistribution count_distribution(Index M, const BigRational& a) {
    return count_distribution(M, a, BigRational(1) - a);
}

// Floating-point entry: |alpha|^2 is rationalized exactly (every finite
// double is dyadic) and |beta|^2 is taken as its exact complement.
inline CountDistribution count_distribution(const EnsembleSpec& spec,
                                            const Tolerances& tol = {}) {
    const double n2 = std::norm(spec.alpha) + std::norm(spec.beta);
    if (std::abs(n2 - 1.0) > tol.norm)
        throw NotNormalized("count_distribution: |alpha|^2 + |beta|^2 must be 1");
    BigRational a = exact_rational(std::norm(spec.alpha));
    if (a > 1) a = 1;
    return count_distribution(spec.M, a);
}

// Exact total probability of counts deviating from the bias by more than
// epsilon: sum of C(M,m) (1-b)^(M-m) b^m over m with |m/M - b| > epsilon.
inline BigRational maverick_fraction(Index M, const BigRational& epsilon,
                                     const BigRational& bias) {
    if (M < 1) throw OutOfRange("maverick_fraction: M must be >= 1");
    if (epsilon <= 0 || epsilon >= 1)
        throw OutOfRange("maverick_fraction: epsilon must lie strictly between 0 and 1");
    if (bias < 0 || bias > 1)
        throw NotNormalized("maverick_fraction: bias must lie in [0, 1]");

    const BigRational complement = BigRational(1) - bias;
    BigRational total = 0;
    for (Index m = 0; m <= M; ++m) {
        BigRational dev = BigRational(m, M) - bias;
        if (dev < 0) dev = -dev;
        if (dev > epsilon)
            total += BigRational(binomial(M, m)) * pow(complement, M - m) * pow(bias, m);
    }
    return total;
}

// The double epsilon is converted exactly (dyadic), so the member set is the
// one the exact comparison against that dyadic value selects.
inline BigRational maverick_fraction(Index M, double epsilon, const BigRational& bias) {
    return maverick_fraction(M, exact_rational(epsilon), bias);
}

}  // namespace envar
