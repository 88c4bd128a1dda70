#pragma once

// Run configuration and deterministic report assembly for the CLI. Reports
// are ordered JSON: field order is fixed by insertion, doubles print in
// shortest round-trip form, exact rationals as decimal strings, so a rerun
// with the same config and inputs is byte-identical.

#include <cstdint>
#include <cstdio>
#include <string>
#include <utility>

#include <json.hpp>

#include "envar/rational.hpp"
#include "envar/state.hpp"
#include "envar/state_io.hpp"
#include "envar/version.hpp"

namespace envar {

struct RunConfig {
    Tolerances tol;
    BigInt finegrain_cap = 4096;
    Index ensemble_dimension_cap = Index(1) << 22;
    Index copy_cap = 200;
    std::string format = "json";  // json | csv | pretty
    std::uint64_t seed = 0;
};

inline Json rational_json(const BigRational& q) {
    Json j;
    j["num"] = num_string(q);
    j["den"] = den_string(q);
    return j;
}

namespace detail {

inline void fnv1a(std::uint64_t& h, const std::string& s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
}

}  // namespace detail

inline std::string config_hash(const RunConfig& cfg) {
    const Json canon = {
        {"tol_norm", cfg.tol.norm},
        {"tol_unitary", cfg.tol.unitary},
        {"tol_state", cfg.tol.state},
        {"finegrain_cap", cfg.finegrain_cap.str()},
        {"ensemble_dimension_cap", cfg.ensemble_dimension_cap},
        {"copy_cap", cfg.copy_cap},
        {"format", cfg.format},
        {"seed", cfg.seed},
    };
    std::uint64_t h = 14695981039346656037ULL;
    detail::fnv1a(h, canon.dump());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

inline Json make_report(const std::string& command, Json inputs, Json outputs,
                        const RunConfig& cfg) {
    Json report;
    report["command"] = command;
    report["inputs"] = std::move(inputs);
    report["outputs"] = std::move(outputs);
    report["provenance"] = Json{{"version", ENVAR_VERSION}, {"config_hash", config_hash(cfg)}};
    return report;
}

}  // namespace envar
