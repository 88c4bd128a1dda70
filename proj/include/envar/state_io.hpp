#pragma once

// JSON state and unitary files. The on-disk format is
//   {"labels": [...], "dims": [...], "amplitudes": [[re, im], ...]}
// with amplitudes in composite-index order and doubles written in shortest
// round-trip form, so write-then-read reproduces every bit.

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "envar/errors.hpp"
#include "envar/state.hpp"

namespace envar {

using Json = nlohmann::ordered_json;

inline Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ParseError("expected a [re, im] pair");
    return Complex(j[0].get<double>(), j[1].get<double>());
}

inline Json state_to_json(const PureState& state) {
    Json j;
    j["labels"] = state.layout().labels();
    j["dims"] = state.layout().dims();
    Json amps = Json::array();
    for (Index i = 0; i < state.dimension(); ++i) amps.push_back(complex_json(state.amplitude(i)));
    j["amplitudes"] = std::move(amps);
    return j;
}

inline PureState state_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("labels") || !j.contains("dims") ||
        !j.contains("amplitudes"))
        throw ParseError("state: expected labels, dims, and amplitudes");
    std::vector<Label> labels;
    std::vector<Index> dims;
    try {
        labels = j["labels"].get<std::vector<Label>>();
        dims = j["dims"].get<std::vector<Index>>();
    } catch (const Json::exception& e) {
        throw ParseError(std::string("state: ") + e.what());
    }
    SubsystemLayout layout(std::move(labels), std::move(dims));
    const auto& amps_json = j["amplitudes"];
    if (!amps_json.is_array() ||
        static_cast<Index>(amps_json.size()) != layout.total_dimension())
        throw ParseError("state: amplitude count does not match the layout");
    Vector amps(layout.total_dimension());
    for (Index i = 0; i < amps.size(); ++i)
        amps(i) = complex_from_json(amps_json[static_cast<std::size_t>(i)]);
    return PureState(std::move(layout), std::move(amps));
}

inline Json unitary_to_json(const LocalUnitary& u) {
    Json j;
    j["targets"] = u.targets;
    Json rows = Json::array();
    for (Index i = 0; i < u.matrix.rows(); ++i) {
        Json row = Json::array();
        for (Index k = 0; k < u.matrix.cols(); ++k) row.push_back(complex_json(u.matrix(i, k)));
        rows.push_back(std::move(row));
    }
    j["matrix"] = std::move(rows);
    return j;
}

inline LocalUnitary unitary_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("targets") || !j.contains("matrix"))
        throw ParseError("unitary: expected targets and matrix");
    std::vector<Label> targets;
    try {
        targets = j["targets"].get<std::vector<Label>>();
    } catch (const Json::exception& e) {
        throw ParseError(std::string("unitary: ") + e.what());
    }
    const auto& rows = j["matrix"];
    if (!rows.is_array() || rows.empty()) throw ParseError("unitary: matrix must be a nonempty array");
    const Index n = static_cast<Index>(rows.size());
    Matrix m(n, n);
    for (Index i = 0; i < n; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Index>(row.size()) != n)
            throw ParseError("unitary: matrix must be square");
        for (Index k = 0; k < n; ++k)
            m(i, k) = complex_from_json(row[static_cast<std::size_t>(k)]);
    }
    return LocalUnitary{std::move(targets), std::move(m)};
}

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw ParseError("'" + path + "': " + e.what());
    }
}

inline PureState read_state_file(const std::string& path) {
    return state_from_json(read_json_file(path));
}

inline LocalUnitary read_unitary_file(const std::string& path) {
    return unitary_from_json(read_json_file(path));
}

inline void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
}

}  // namespace envar
