#pragma once

// Reduction of a two-outcome superposition with commensurate weights (n, m)
// to n+m equal-amplitude branches, and the exact Born probabilities that
// counting those branches yields. Two derivation routes are provided: the
// short one groups branches and says so with an additivity-tagged step; the
// long one reaches the same rationals through the singleton base case,
// complementation, and finite induction, and never tags a step additivity.
// Incommensurate weights are handled by rational bounds with a prescribed
// denominator, each bound realizable as a commensurate pair.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "envar/envariance.hpp"
#include "envar/errors.hpp"
#include "envar/rational.hpp"
#include "envar/schmidt.hpp"
#include "envar/state.hpp"

namespace envar {

struct CommensurateInput {
    BigInt n;  // weight of outcome 0, >= 1
    BigInt m;  // weight of outcome 1, >= 1
};

struct FinegrainOptions {
    BigInt dimension_cap = 4096;       // bound on n+m for constructed states
    std::optional<Index> pad;          // enlarge E and E' beyond n+m levels
};

// |Psi> on S (dim 2), E, E': amplitude 1/sqrt(n+m) on (s_i, i, i) for each
// branch i, where the first n branches carry outcome 0 and the rest outcome 1.
struct FinegrainedState {
    PureState state;
    std::vector<int> branch_map;  // branch i -> outcome, exactly n zeros then m ones
    Index n = 0;
    Index m = 0;
};

enum class StepKind { swap_certificate, complementation, induction, additivity };

inline const char* to_string(StepKind k) {
    switch (k) {
        case StepKind::swap_certificate: return "swap_certificate";
        case StepKind::complementation: return "complementation";
        case StepKind::induction: return "induction";
        case StepKind::additivity: return "additivity";
    }
    return "unknown";
}

struct ProofStep {
    StepKind kind;
    std::string claim;  // what this step establishes
    BigRational value;  // probability of the event named in the claim
};

struct ProbabilityAssignment {
    BigRational p0;
    BigRational p1;
    std::vector<ProofStep> derivation;
};

struct BornOptions {
    FinegrainOptions finegrain;
    // Run the swap-by-swap equiprobability certificate on the constructed
    // state instead of citing the construction's structural guarantee. Costly:
    // one envariance decision per adjacent branch pair.
    bool verify_envariance = false;
};

struct DedekindBounds {
    BigRational target;  // exact rational stand-in for the requested value
    BigRational lower;
    BigRational upper;
    BigInt denominator_bound;
    // Commensurate pairs realizing the bounds as actual two-outcome states,
    // present whenever both weights are >= 1.
    std::optional<CommensurateInput> lower_pair;
    std::optional<CommensurateInput> upper_pair;
};

namespace detail {

inline std::pair<Index, Index> checked_weights(const CommensurateInput& in,
                                               const FinegrainOptions& opt) {
    if (in.n < 1 || in.m < 1) throw OutOfRange("weights must be positive");
    if (in.n + in.m > opt.dimension_cap)
        throw DimensionCap("n + m exceeds the configured dimension cap");
    return {static_cast<Index>(in.n), static_cast<Index>(in.m)};
}

}  // namespace detail

inline FinegrainedState finegrain(const CommensurateInput& input,
                                  const FinegrainOptions& opt = {}) {
    const auto [n, m] = detail::checked_weights(input, opt);
    const Index r = n + m;
    const Index re = opt.pad.value_or(r);
    if (re < r) throw OutOfRange("finegrain: pad smaller than branch count");

    SubsystemLayout layout({"S", "E", "Ep"}, {2, re, re});
    Vector amps = Vector::Zero(layout.total_dimension());
    const double amp = 1.0 / std::sqrt(static_cast<double>(r));
    std::vector<int> branch_map(static_cast<std::size_t>(r));
    for (Index i = 0; i < r; ++i) {
        const Index s = i < n ? 0 : 1;
        branch_map[static_cast<std::size_t>(i)] = static_cast<int>(s);
        amps(s * re * re + i * re + i) = amp;
    }
    return FinegrainedState{PureState(std::move(layout), std::move(amps)), std::move(branch_map),
                            n, m};
}

// Contract E' against its uniform superposition and renormalize: the result
// is the two-branch coarse state sqrt(n/r)|0>|eps0> + sqrt(m/r)|1>|eps1> on
// {S, E} that the refinement came from.
inline PureState coarse_grained(const FinegrainedState& fg) {
    const auto& lay = fg.state.layout();
    const Index re = lay.dim("Ep");
    const Index d_se = 2 * lay.dim("E");
    Vector amps = Vector::Zero(d_se);
    for (Index se = 0; se < d_se; ++se) {
        Complex acc(0, 0);
        for (Index ep = 0; ep < re; ++ep) acc += fg.state.amplitude(se * re + ep);
        amps(se) = acc / std::sqrt(static_cast<double>(re));
    }
    SubsystemLayout coarse({"S", "E"}, {2, lay.dim("E")});
    return PureState(std::move(coarse), std::move(amps)).normalized();
}

// The two-branch state the refinement of (n, m) coarse-grains back to.
inline PureState coarse_reference_state(Index n, Index m, std::optional<Index> pad = {}) {
    if (n < 1 || m < 1) throw OutOfRange("weights must be positive");
    const Index r = n + m;
    const Index re = pad.value_or(r);
    if (re < r) throw OutOfRange("pad smaller than branch count");
    SubsystemLayout layout({"S", "E"}, {2, re});
    Vector amps = Vector::Zero(layout.total_dimension());
    const double root_r = std::sqrt(static_cast<double>(r));
    for (Index i = 0; i < n; ++i) amps(i) = 1.0 / root_r;
    for (Index i = n; i < r; ++i) amps(re + i) = 1.0 / root_r;
    return PureState(std::move(layout), std::move(amps));
}

namespace detail {

inline ProofStep certificate_step(Index n, Index m, const BornOptions& opt) {
    const Index r = n + m;
    std::string claim = "all " + std::to_string(r) +
                        " refined branches carry equal amplitude and are pairwise exchangeable "
                        "by envariant swaps, so each has probability 1/" + std::to_string(r);
    if (opt.verify_envariance) {
        const auto fg = finegrain(CommensurateInput{n, m}, opt.finegrain);
        const Bipartition cut = Bipartition::complement_of(fg.state.layout(), {"S", "E"});
        const auto cert = equiprobability_from_swaps(fg.state, cut);
        if (cert.branch_indices.size() != static_cast<std::size_t>(r))
            throw SpecMismatch("certificate branch count does not match construction");
        claim += "; verified by " + std::to_string(cert.swaps.size()) +
                 " adjacent transpositions";
    }
    return ProofStep{StepKind::swap_certificate, std::move(claim), BigRational(1, r)};
}

}  // namespace detail

inline ProbabilityAssignment born_probabilities(const CommensurateInput& input,
                                                const BornOptions& opt = {}) {
    const auto [n, m] = detail::checked_weights(input, opt.finegrain);
    const Index r = n + m;

    ProbabilityAssignment out;
    out.p0 = BigRational(n, r);
    out.p1 = BigRational(m, r);
    out.derivation.push_back(detail::certificate_step(n, m, opt));
    out.derivation.push_back(ProofStep{
        StepKind::additivity,
        "outcome 0 is the union of branches 1.." + std::to_string(n) +
            "; summing their probabilities gives p(0)",
        out.p0});
    out.derivation.push_back(ProofStep{
        StepKind::additivity,
        "outcome 1 is the union of branches " + std::to_string(n + 1) + ".." +
            std::to_string(r) + "; summing their probabilities gives p(1)",
        out.p1});
    return out;
}

inline ProbabilityAssignment born_without_additivity(const CommensurateInput& input,
                                                     const BornOptions& opt = {}) {
    const auto [n, m] = detail::checked_weights(input, opt.finegrain);
    const Index r = n + m;

    ProbabilityAssignment out;
    out.p0 = BigRational(n, r);
    out.p1 = BigRational(m, r);
    auto& steps = out.derivation;

    if (n == m) {
        steps.push_back(ProofStep{
            StepKind::swap_certificate,
            "the two outcomes have equal weight " + std::to_string(n) +
                " and exchange under an envariant swap, so p(0) = p(1)",
            BigRational(1, 2)});
        steps.push_back(ProofStep{
            StepKind::complementation,
            "the union of an outcome and its complement is certain: p(0) + p(1) = 1, "
            "and equality fixes both at 1/2",
            BigRational(1, 2)});
        return out;
    }

    // Work on the side with the smaller weight; by symmetry the derivation
    // for (n, m) with n < m is the mirrored derivation for (m, n).
    const bool minority_is_one = m < n;
    const Index big = minority_is_one ? n : m;
    const Index small = minority_is_one ? m : n;
    const auto p_small = [&](Index j) { return BigRational(j, big + j); };
    const char* small_name = minority_is_one ? "1" : "0";
    const char* big_name = minority_is_one ? "0" : "1";

    steps.push_back(ProofStep{
        StepKind::swap_certificate,
        std::string("base case (") + std::to_string(big) + ", 1): all " +
            std::to_string(big + 1) +
            " refined branches are equiprobable, and outcome " + small_name +
            " is the single branch " + std::to_string(big + 1) +
            ", so its probability needs no summation",
        p_small(1)});
    for (Index j = 2; j <= small; ++j) {
        steps.push_back(ProofStep{
            StepKind::induction,
            "extend to (" + std::to_string(big) + ", " + std::to_string(j) +
                "): refine one more unit onto outcome " + small_name + ", giving " +
                std::to_string(big + j) +
                " equiprobable branches; the established case (" + std::to_string(big) + ", " +
                std::to_string(j - 1) +
                ") and complementation against the singleton certificate yield p(" + small_name +
                ")",
            p_small(j)});
    }
    steps.push_back(ProofStep{
        StepKind::complementation,
        std::string("p(") + big_name + ") = 1 - p(" + small_name + ")",
        BigRational(big, r)});
    return out;
}

inline DedekindBounds dedekind_bounds(const BigRational& target, const BigInt& denominator_bound) {
    if (target <= 0 || target >= 1)
        throw OutOfRange("dedekind_bounds: target must lie strictly between 0 and 1");
    if (denominator_bound < 2) throw OutOfRange("dedekind_bounds: denominator bound must be >= 2");

    const BigInt num = boost::multiprecision::numerator(target) * denominator_bound;
    const BigInt den = boost::multiprecision::denominator(target);
    const BigInt lo = num / den;              // floor, everything positive
    const bool exact = (num % den) == 0;
    const BigInt hi = exact ? lo : lo + 1;

    DedekindBounds out;
    out.target = target;
    out.lower = BigRational(lo, denominator_bound);
    out.upper = BigRational(hi, denominator_bound);
    out.denominator_bound = denominator_bound;
    if (lo >= 1 && denominator_bound - lo >= 1)
        out.lower_pair = CommensurateInput{lo, denominator_bound - lo};
    if (hi >= 1 && denominator_bound - hi >= 1)
        out.upper_pair = CommensurateInput{hi, denominator_bound - hi};
    return out;
}

// The double is converted exactly; every finite double is a dyadic rational.
inline DedekindBounds dedekind_bounds(double target, const BigInt& denominator_bound) {
    return dedekind_bounds(exact_rational(target), denominator_bound);
}

}  // namespace envar
