// Command-line front end. Every subcommand resolves its inputs, calls the
// library, and renders one report to stdout in the selected format. Exit
// codes: 0 success, 2 input error, 3 domain error (caps, failed math
// preconditions). Reports are deterministic: rerunning with the same config
// and inputs produces byte-identical output.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "envar/envar.hpp"

namespace {

using envar::BigInt;
using envar::BigRational;
using envar::Bipartition;
using envar::Complex;
using envar::Index;
using envar::Json;
using envar::Label;
using envar::LocalUnitary;
using envar::PureState;
using envar::RunConfig;

std::string dstr(double x) { return Json(x).dump(); }

std::string trimmed(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// key = value lines; '#' starts a comment, quotes around values are optional,
// section headers are ignored.
std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw envar::ParseError("cannot open config '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trimmed(line);
        if (line.empty() || line.front() == '[') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw envar::ParseError("config '" + path + "': expected key=value, got '" + line +
                                    "'");
        std::string value = trimmed(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        kv[trimmed(line.substr(0, eq))] = value;
    }
    return kv;
}

// Settings resolve as: command-line flag, then ENVAR_* environment variable,
// then config file entry, then the built-in default. CLI11 applies its config
// below environment variables, so the two fallback layers are handled here.
struct SettingSource {
    const std::map<std::string, std::string>& file_kv;

    template <typename T, typename Parse>
    void resolve(const CLI::Option* flag, const char* env_name, const char* key, T& target,
                 Parse parse) const {
        if (flag->count() > 0) return;  // already bound by CLI11
        if (const char* e = std::getenv(env_name); e != nullptr && *e != '\0') {
            target = parse(std::string(e), std::string("environment variable ") + env_name);
            return;
        }
        if (const auto it = file_kv.find(key); it != file_kv.end())
            target = parse(it->second, std::string("config key ") + key);
    }
};

double parse_double_setting(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw envar::ParseError(what + ": expected a number, got '" + s + "'");
    }
}

std::int64_t parse_int_setting(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const std::int64_t v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw envar::ParseError(what + ": expected an integer, got '" + s + "'");
    }
}

std::uint64_t parse_uint_setting(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const std::uint64_t v = std::stoull(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw envar::ParseError(what + ": expected an unsigned integer, got '" + s + "'");
    }
}

std::string rstr(const BigRational& q) {
    return envar::num_string(q) + "/" + envar::den_string(q);
}

std::vector<Label> split_labels(const std::string& csv) {
    std::vector<Label> out;
    std::string item;
    std::istringstream in(csv);
    while (std::getline(in, item, ',')) {
        const auto a = item.find_first_not_of(" \t");
        const auto b = item.find_last_not_of(" \t");
        if (a == std::string::npos) throw envar::ParseError("empty label in '" + csv + "'");
        out.push_back(item.substr(a, b - a + 1));
    }
    if (out.empty()) throw envar::ParseError("no labels in '" + csv + "'");
    return out;
}

envar::FinegrainOptions finegrain_options(const RunConfig& cfg, std::optional<Index> pad = {}) {
    envar::FinegrainOptions opt;
    opt.dimension_cap = cfg.finegrain_cap;
    opt.pad = pad;
    return opt;
}

envar::EnsembleOptions ensemble_options(const RunConfig& cfg) {
    envar::EnsembleOptions opt;
    opt.dimension_cap = cfg.ensemble_dimension_cap;
    opt.copy_cap = cfg.copy_cap;
    return opt;
}

struct Rendered {
    Json outputs;        // payload for the JSON report
    std::string csv;     // table form
    std::string pretty;  // human form
};

// ---- schmidt ----

struct SchmidtArgs {
    std::string state_file;
    std::string cut;
};

Rendered run_schmidt(const SchmidtArgs& a, const RunConfig& cfg, Json& inputs) {
    const PureState state = envar::read_state_file(a.state_file);
    const auto cut = Bipartition::complement_of(state.layout(), split_labels(a.cut));
    const auto sd = envar::schmidt_decompose(state, cut, cfg.tol);
    const std::size_t rank = sd.rank();

    inputs = Json{{"state", a.state_file}, {"cut", a.cut}};

    Rendered r;
    r.outputs["left"] = cut.left;
    r.outputs["right"] = cut.right;
    r.outputs["coefficients"] = sd.coefficients;
    r.outputs["rank"] = rank;

    std::ostringstream csv;
    csv << "k,coefficient\n";
    for (std::size_t k = 0; k < sd.coefficients.size(); ++k)
        csv << k << "," << dstr(sd.coefficients[k]) << "\n";
    r.csv = csv.str();

    std::ostringstream pretty;
    pretty << "cut: {";
    for (std::size_t i = 0; i < cut.left.size(); ++i) pretty << (i ? " " : "") << cut.left[i];
    pretty << "} | {";
    for (std::size_t i = 0; i < cut.right.size(); ++i) pretty << (i ? " " : "") << cut.right[i];
    pretty << "}\nrank: " << rank << "\ncoefficients:";
    for (double c : sd.coefficients) pretty << " " << dstr(c);
    pretty << "\n";
    r.pretty = pretty.str();
    return r;
}

// ---- envariance ----

struct EnvarianceArgs {
    std::string state_file;
    std::string cut;  // empty: the unitary's targets form the left side
    std::string on_label;
    std::string swap_pair;
    std::optional<double> phase;
    std::string unitary_file;
};

Rendered run_envariance(const EnvarianceArgs& a, const RunConfig& cfg, Json& inputs) {
    const PureState state = envar::read_state_file(a.state_file);

    const int picked = int(!a.swap_pair.empty()) + int(a.phase.has_value()) +
                       int(!a.unitary_file.empty());
    if (picked != 1)
        throw envar::ParseError("choose exactly one of --swap, --phase, --unitary");

    LocalUnitary u{{}, envar::Matrix()};
    Json u_echo;
    if (!a.unitary_file.empty()) {
        u = envar::read_unitary_file(a.unitary_file);
        u_echo = Json{{"unitary", a.unitary_file}};
    } else {
        if (a.on_label.empty()) throw envar::ParseError("--swap and --phase require --on LABEL");
        const Index dim = state.layout().dim(a.on_label);
        if (!a.swap_pair.empty()) {
            const auto comma = a.swap_pair.find(',');
            if (comma == std::string::npos)
                throw envar::ParseError("--swap expects two comma-separated levels");
            Index i = 0, j = 0;
            try {
                i = std::stoll(a.swap_pair.substr(0, comma));
                j = std::stoll(a.swap_pair.substr(comma + 1));
            } catch (const std::exception&) {
                throw envar::ParseError("--swap expects two comma-separated levels");
            }
            u = LocalUnitary::single(a.on_label, envar::basis_transposition(dim, i, j));
            u_echo = Json{{"swap", Json::array({i, j})}, {"on", a.on_label}};
        } else {
            // exp(-i*phi) on level 0, identity elsewhere
            u = LocalUnitary::single(a.on_label, envar::level_phase(dim, 0, -*a.phase));
            u_echo = Json{{"phase", *a.phase}, {"on", a.on_label}};
        }
    }

    const auto cut = a.cut.empty()
                         ? Bipartition::complement_of(state.layout(), u.targets)
                         : Bipartition::complement_of(state.layout(), split_labels(a.cut));
    const auto verdict = envar::decide_envariance(state, u, cut, cfg.tol);

    inputs = Json{{"state", a.state_file}, {"cut", a.cut}, {"unitary", u_echo}};

    Rendered r;
    r.outputs["envariant"] = verdict.envariant;
    r.outputs["residual"] = verdict.residual;
    r.outputs["counter"] =
        verdict.counter ? envar::unitary_to_json(*verdict.counter) : Json(nullptr);

    std::ostringstream csv;
    csv << "field,value\n"
        << "envariant," << (verdict.envariant ? "true" : "false") << "\n"
        << "residual," << dstr(verdict.residual) << "\n";
    r.csv = csv.str();

    std::ostringstream pretty;
    pretty << "envariant: " << (verdict.envariant ? "yes" : "no") << "\n"
           << "residual: " << dstr(verdict.residual) << "\n";
    if (verdict.counter) {
        pretty << "counter on {";
        for (std::size_t i = 0; i < verdict.counter->targets.size(); ++i)
            pretty << (i ? " " : "") << verdict.counter->targets[i];
        pretty << "}, dimension " << verdict.counter->matrix.rows() << "\n";
    }
    r.pretty = pretty.str();
    return r;
}

// ---- finegrain ----

struct FinegrainArgs {
    std::int64_t n = 0;
    std::int64_t m = 0;
    std::optional<Index> pad;
};

Rendered run_finegrain(const FinegrainArgs& a, const RunConfig& cfg, Json& inputs) {
    const auto fg =
        envar::finegrain(envar::CommensurateInput{a.n, a.m}, finegrain_options(cfg, a.pad));

    inputs = Json{{"n", a.n}, {"m", a.m}};
    if (a.pad) inputs["pad"] = *a.pad;

    const Index r_total = fg.n + fg.m;
    const double amp = 1.0 / std::sqrt(static_cast<double>(r_total));

    Rendered r;
    r.outputs["n"] = fg.n;
    r.outputs["m"] = fg.m;
    r.outputs["branches"] = r_total;
    r.outputs["amplitude"] = amp;
    r.outputs["branch_map"] = fg.branch_map;
    r.outputs["state"] = envar::state_to_json(fg.state);

    std::ostringstream csv;
    csv << "branch,outcome,amplitude\n";
    for (Index i = 0; i < r_total; ++i)
        csv << (i + 1) << "," << fg.branch_map[static_cast<std::size_t>(i)] << "," << dstr(amp)
            << "\n";
    r.csv = csv.str();

    std::ostringstream pretty;
    pretty << r_total << " equal branches of amplitude " << dstr(amp) << ": branches 1.." << fg.n
           << " -> outcome 0, branches " << (fg.n + 1) << ".." << r_total << " -> outcome 1\n";
    r.pretty = pretty.str();
    return r;
}

// ---- born / dedekind ----

Json step_json(const envar::ProofStep& s) {
    return Json{{"kind", envar::to_string(s.kind)},
                {"claim", s.claim},
                {"value", envar::rational_json(s.value)}};
}

Json dedekind_json(const envar::DedekindBounds& b) {
    Json out;
    out["target"] = envar::rational_json(b.target);
    out["denominator_bound"] = b.denominator_bound.str();
    out["lower"] = envar::rational_json(b.lower);
    out["upper"] = envar::rational_json(b.upper);
    out["gap"] = envar::rational_json(b.upper - b.lower);
    const auto pair_json = [](const std::optional<envar::CommensurateInput>& p) {
        return p ? Json{{"n", p->n.str()}, {"m", p->m.str()}} : Json(nullptr);
    };
    out["lower_pair"] = pair_json(b.lower_pair);
    out["upper_pair"] = pair_json(b.upper_pair);
    return out;
}

Rendered render_dedekind(const envar::DedekindBounds& b) {
    Rendered r;
    r.outputs = dedekind_json(b);

    std::ostringstream csv;
    csv << "bound,num,den\n"
        << "lower," << envar::num_string(b.lower) << "," << envar::den_string(b.lower) << "\n"
        << "upper," << envar::num_string(b.upper) << "," << envar::den_string(b.upper) << "\n";
    r.csv = csv.str();

    std::ostringstream pretty;
    pretty << rstr(b.lower) << " <= " << rstr(b.target) << " <= " << rstr(b.upper)
           << "  (gap " << rstr(b.upper - b.lower) << ")\n";
    r.pretty = pretty.str();
    return r;
}

struct BornArgs {
    std::int64_t n = 0;
    std::int64_t m = 0;
    bool no_additivity = false;
    bool verify = false;
    std::string dedekind_denominator;  // nonempty switches to bounds mode
    std::string target;
};

Rendered run_born(const BornArgs& a, const RunConfig& cfg, Json& inputs) {
    if (!a.dedekind_denominator.empty()) {
        if (a.target.empty())
            throw envar::ParseError("--dedekind requires --target");
        const auto bounds = envar::dedekind_bounds(envar::parse_rational(a.target),
                                                   envar::parse_bigint(a.dedekind_denominator));
        inputs = Json{{"target", a.target}, {"denominator", a.dedekind_denominator}};
        return render_dedekind(bounds);
    }

    if (a.n < 1 || a.m < 1) throw envar::OutOfRange("born: n and m must be positive");
    envar::BornOptions opt;
    opt.finegrain = finegrain_options(cfg);
    opt.verify_envariance = a.verify;
    const auto assignment = a.no_additivity
                                ? envar::born_without_additivity({a.n, a.m}, opt)
                                : envar::born_probabilities({a.n, a.m}, opt);

    inputs = Json{{"n", a.n}, {"m", a.m}, {"no_additivity", a.no_additivity},
                  {"verify_envariance", a.verify}};

    Rendered r;
    r.outputs["p0"] = envar::rational_json(assignment.p0);
    r.outputs["p1"] = envar::rational_json(assignment.p1);
    Json steps = Json::array();
    for (const auto& s : assignment.derivation) steps.push_back(step_json(s));
    r.outputs["derivation"] = std::move(steps);

    std::ostringstream csv;
    csv << "outcome,num,den\n"
        << "0," << envar::num_string(assignment.p0) << "," << envar::den_string(assignment.p0)
        << "\n"
        << "1," << envar::num_string(assignment.p1) << "," << envar::den_string(assignment.p1)
        << "\n";
    r.csv = csv.str();

    std::ostringstream pretty;
    pretty << "p(0) = " << rstr(assignment.p0) << ", p(1) = " << rstr(assignment.p1) << "\n";
    for (const auto& s : assignment.derivation)
        pretty << "  [" << envar::to_string(s.kind) << "] " << s.claim << " => " << rstr(s.value)
               << "\n";
    r.pretty = pretty.str();
    return r;
}

struct DedekindArgs {
    std::string target;
    std::string denominator;
};

Rendered run_dedekind(const DedekindArgs& a, const RunConfig&, Json& inputs) {
    const auto bounds = envar::dedekind_bounds(envar::parse_rational(a.target),
                                               envar::parse_bigint(a.denominator));
    inputs = Json{{"target", a.target}, {"denominator", a.denominator}};
    return render_dedekind(bounds);
}

// ---- ensemble / maverick ----

struct EnsembleArgs {
    std::int64_t M = 0;
    std::string alpha_sq = "1/2";
    bool sectors = false;  // accepted for symmetry; the table is always emitted
    bool dual = false;
    std::string maverick_eps;
    bool force_explicit = false;
    bool force_formula = false;
};

Rendered run_ensemble(const EnsembleArgs& a, const RunConfig& cfg, Json& inputs) {
    const BigRational alpha_sq = envar::parse_rational(a.alpha_sq);
    if (alpha_sq < 0 || alpha_sq > 1)
        throw envar::OutOfRange("ensemble: alpha-sq must lie in [0, 1]");
    if (a.force_explicit && a.force_formula)
        throw envar::ParseError("choose at most one of --explicit and --formula");

    const double ad = alpha_sq.convert_to<double>();
    envar::EnsembleSpec spec{a.M, Complex(std::sqrt(ad), 0), Complex(std::sqrt(1.0 - ad), 0)};
    const auto opt = ensemble_options(cfg);

    const bool fits_explicit =
        a.M >= 1 && a.M <= 30 && (Index(1) << (2 * a.M)) <= opt.dimension_cap;
    if (a.force_explicit && !fits_explicit)
        throw envar::DimensionCap(
            "ensemble: explicit path exceeds the dimension cap; drop --explicit to use the "
            "formula path");
    const bool explicit_path = a.force_explicit || (!a.force_formula && fits_explicit);

    envar::CountSectorDecomposition decomp =
        explicit_path
            ? envar::expand_count_sectors(envar::build_ensemble(spec, opt, cfg.tol), spec, opt,
                                          cfg.tol)
            : envar::expand_count_sectors(spec, opt, cfg.tol);
    const auto dist = envar::count_distribution(a.M, alpha_sq);

    inputs = Json{{"M", a.M}, {"alpha_sq", a.alpha_sq}};

    Rendered r;
    r.outputs["M"] = a.M;
    r.outputs["alpha_sq"] = envar::rational_json(alpha_sq);
    r.outputs["path"] = explicit_path ? "explicit" : "formula";
    Json sectors = Json::array();
    for (const auto& sec : decomp.sectors) {
        sectors.push_back(Json{{"m", sec.m},
                               {"multiplicity", sec.multiplicity.str()},
                               {"gamma_abs", std::abs(sec.amplitude)},
                               {"p", envar::rational_json(
                                         dist.probabilities[static_cast<std::size_t>(sec.m)])}});
    }
    r.outputs["sectors"] = std::move(sectors);

    std::ostringstream csv;
    csv << "m,multiplicity,gamma_abs,p\n";
    for (const auto& sec : decomp.sectors)
        csv << sec.m << "," << sec.multiplicity.str() << "," << dstr(std::abs(sec.amplitude))
            << "," << rstr(dist.probabilities[static_cast<std::size_t>(sec.m)]) << "\n";

    std::ostringstream pretty;
    pretty << "M = " << a.M << ", |alpha|^2 = " << rstr(alpha_sq) << " (" << r.outputs["path"]
           << " path)\n";
    for (const auto& sec : decomp.sectors)
        pretty << "  m=" << sec.m << "  C=" << sec.multiplicity.str()
               << "  |Gamma|=" << dstr(std::abs(sec.amplitude))
               << "  p=" << rstr(dist.probabilities[static_cast<std::size_t>(sec.m)]) << "\n";

    if (a.dual) {
        if (!fits_explicit || a.M > 62 ||
            (Index(1) << (2 * a.M)) * (a.M + 1) > opt.dimension_cap)
            throw envar::DimensionCap(
                "ensemble: --dual needs the explicit counted state; reduce M or raise the cap");
        const auto counted = envar::attach_counter(envar::build_ensemble(spec, opt, cfg.tol),
                                                   spec, opt, cfg.tol);
        std::vector<Label> systems;
        for (Index k = 1; k <= a.M; ++k) systems.push_back("S" + std::to_string(k));
        std::vector<Label> sys_rec = systems;
        for (Index k = 1; k <= a.M; ++k) sys_rec.push_back("A" + std::to_string(k));
        const auto& lay = counted.layout();
        const auto c1 = envar::schmidt_coefficients(
            counted, Bipartition::complement_of(lay, systems));
        const auto c2 = envar::schmidt_coefficients(
            counted, Bipartition::complement_of(lay, sys_rec));
        inputs["dual"] = true;
        r.outputs["dual"] = Json{{"cut_systems", c1}, {"cut_counter", c2}};
        csv << "\ncut,k,coefficient\n";
        for (std::size_t k = 0; k < c1.size(); ++k)
            csv << "systems," << k << "," << dstr(c1[k]) << "\n";
        for (std::size_t k = 0; k < c2.size(); ++k)
            csv << "counter," << k << "," << dstr(c2[k]) << "\n";
        pretty << "cut S | AC coefficients:";
        for (double c : c1) pretty << " " << dstr(c);
        pretty << "\ncut SA | C coefficients:";
        for (double c : c2) pretty << " " << dstr(c);
        pretty << "\n";
    }

    if (!a.maverick_eps.empty()) {
        const BigRational eps = envar::parse_rational(a.maverick_eps);
        const BigRational bias = BigRational(1) - alpha_sq;
        const auto fraction = envar::maverick_fraction(a.M, eps, bias);
        inputs["maverick"] = a.maverick_eps;
        r.outputs["maverick"] = Json{{"epsilon", envar::rational_json(eps)},
                                     {"bias", envar::rational_json(bias)},
                                     {"fraction", envar::rational_json(fraction)}};
        csv << "\nmaverick_epsilon,maverick_fraction\n"
            << rstr(eps) << "," << rstr(fraction) << "\n";
        pretty << "maverick fraction at epsilon " << rstr(eps) << ": " << rstr(fraction) << "\n";
    }

    r.csv = csv.str();
    r.pretty = pretty.str();
    return r;
}

struct MaverickArgs {
    std::int64_t M = 0;
    std::string epsilon;
    std::string bias = "1/2";
};

Rendered run_maverick(const MaverickArgs& a, const RunConfig&, Json& inputs) {
    const BigRational eps = envar::parse_rational(a.epsilon);
    const BigRational bias = envar::parse_rational(a.bias);
    const auto fraction = envar::maverick_fraction(a.M, eps, bias);

    inputs = Json{{"M", a.M}, {"epsilon", a.epsilon}, {"bias", a.bias}};

    Rendered r;
    r.outputs["M"] = a.M;
    r.outputs["epsilon"] = envar::rational_json(eps);
    r.outputs["bias"] = envar::rational_json(bias);
    r.outputs["fraction"] = envar::rational_json(fraction);

    std::ostringstream csv;
    csv << "M,epsilon,bias,fraction\n"
        << a.M << "," << rstr(eps) << "," << rstr(bias) << "," << rstr(fraction) << "\n";
    r.csv = csv.str();

    std::ostringstream pretty;
    pretty << "fraction of sequences deviating more than " << rstr(eps) << " from bias "
           << rstr(bias) << " over " << a.M << " copies: " << rstr(fraction) << "\n";
    r.pretty = pretty.str();
    return r;
}

void emit(const std::string& command, const Rendered& r, Json inputs, const RunConfig& cfg) {
    if (cfg.format == "csv") {
        std::cout << r.csv;
    } else if (cfg.format == "pretty") {
        std::cout << r.pretty;
    } else {
        std::cout << envar::make_report(command, std::move(inputs), r.outputs, cfg).dump(2)
                  << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Envariance, branch counting, and ensemble amplitude extraction"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_flag;
    auto* o_config = app.add_option("--config", config_flag, "Config file (key=value lines)");
    auto* o_format = app.add_option("--format", cfg.format, "Output format")
                         ->check(CLI::IsMember({"json", "csv", "pretty"}));
    auto* o_seed =
        app.add_option("--seed", cfg.seed, "Random seed recorded in the config hash");
    auto* o_tol = app.add_option("--tol", cfg.tol.state, "State-distance tolerance")
                      ->check(CLI::PositiveNumber);
    auto* o_tol_norm =
        app.add_option("--tol-norm", cfg.tol.norm, "Norm tolerance")->check(CLI::PositiveNumber);
    auto* o_tol_unitary = app.add_option("--tol-unitary", cfg.tol.unitary, "Unitarity tolerance")
                              ->check(CLI::PositiveNumber);
    std::int64_t finegrain_cap = 4096;
    auto* o_finegrain_cap =
        app.add_option("--finegrain-cap", finegrain_cap, "Bound on n + m for refined states")
            ->check(CLI::PositiveNumber);
    auto* o_ensemble_cap = app.add_option("--ensemble-cap", cfg.ensemble_dimension_cap,
                                          "Total dimension bound for explicit ensemble states")
                               ->check(CLI::PositiveNumber);
    auto* o_copy_cap = app.add_option("--copy-cap", cfg.copy_cap, "Bound on the copy count M")
                           ->check(CLI::PositiveNumber);

    SchmidtArgs schmidt_args;
    auto* cmd_schmidt = app.add_subcommand("schmidt", "Schmidt coefficients across a cut");
    cmd_schmidt->fallthrough();
    cmd_schmidt->add_option("--state", schmidt_args.state_file, "State file (JSON)")->required();
    cmd_schmidt->add_option("--cut", schmidt_args.cut, "Left-side labels, comma separated")
        ->required();

    EnvarianceArgs env_args;
    auto* cmd_envariance =
        app.add_subcommand("envariance", "Decide envariance and construct the counter");
    cmd_envariance->fallthrough();
    cmd_envariance->add_option("--state", env_args.state_file, "State file (JSON)")->required();
    cmd_envariance->add_option("--cut", env_args.cut,
                               "Left-side labels (default: the unitary's targets)");
    cmd_envariance->add_option("--on", env_args.on_label, "Target label for --swap/--phase");
    cmd_envariance->add_option("--swap", env_args.swap_pair, "Swap two levels: i,j");
    double phase_value = 0.0;
    auto* phase_opt =
        cmd_envariance->add_option("--phase", phase_value, "Rotate level 0 by exp(-i*phi)");
    cmd_envariance->add_option("--unitary", env_args.unitary_file,
                               "Unitary file (JSON: targets, matrix)");

    FinegrainArgs fine_args;
    std::int64_t pad_value = 0;
    auto* cmd_finegrain =
        app.add_subcommand("finegrain", "Refine (n, m) into n+m equal branches");
    cmd_finegrain->fallthrough();
    cmd_finegrain->add_option("-n", fine_args.n, "Weight of outcome 0")->required();
    cmd_finegrain->add_option("-m", fine_args.m, "Weight of outcome 1")->required();
    auto* pad_opt = cmd_finegrain->add_option("--pad", pad_value, "Environment levels (>= n+m)");

    BornArgs born_args;
    auto* cmd_born = app.add_subcommand("born", "Exact outcome probabilities by counting");
    cmd_born->fallthrough();
    cmd_born->add_option("-n", born_args.n, "Weight of outcome 0");
    cmd_born->add_option("-m", born_args.m, "Weight of outcome 1");
    cmd_born->add_flag("--no-additivity", born_args.no_additivity,
                       "Derive through the finite-induction route");
    cmd_born->add_flag("--verify", born_args.verify,
                       "Verify the equiprobability certificate swap by swap");
    cmd_born->add_option("--dedekind", born_args.dedekind_denominator,
                         "Denominator bound: emit rational bounds for --target instead");
    cmd_born->add_option("--target", born_args.target, "Target probability for --dedekind");

    DedekindArgs dede_args;
    auto* cmd_dedekind =
        app.add_subcommand("dedekind", "Rational bounds with a prescribed denominator");
    cmd_dedekind->fallthrough();
    cmd_dedekind->add_option("--target", dede_args.target, "Target in (0, 1)")->required();
    cmd_dedekind->add_option("--denominator", dede_args.denominator, "Denominator bound D")
        ->required();

    EnsembleArgs ens_args;
    auto* cmd_ensemble =
        app.add_subcommand("ensemble", "Count-sector table for the M-copy ensemble");
    cmd_ensemble->fallthrough();
    cmd_ensemble->add_option("-M", ens_args.M, "Number of copies")->required();
    cmd_ensemble->add_option("--alpha-sq", ens_args.alpha_sq, "|alpha|^2 as a rational");
    cmd_ensemble->add_flag("--sectors", ens_args.sectors, "Emit the sector table (default)");
    cmd_ensemble->add_flag("--dual", ens_args.dual,
                           "Add both Schmidt coefficient lists of the counted state");
    cmd_ensemble->add_option("--maverick", ens_args.maverick_eps,
                             "Add the deviant fraction beyond this epsilon");
    cmd_ensemble->add_flag("--explicit", ens_args.force_explicit,
                           "Require the explicit-state path");
    cmd_ensemble->add_flag("--formula", ens_args.force_formula,
                           "Require the closed-form path");

    MaverickArgs mav_args;
    auto* cmd_maverick =
        app.add_subcommand("maverick", "Exact deviant-sequence fraction");
    cmd_maverick->fallthrough();
    cmd_maverick->add_option("-M", mav_args.M, "Number of copies")->required();
    cmd_maverick->add_option("--epsilon", mav_args.epsilon, "Deviation threshold (rational)")
        ->required();
    cmd_maverick->add_option("--bias", mav_args.bias, "Bias |beta|^2 (rational)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (*phase_opt) env_args.phase = phase_value;
    if (*pad_opt) fine_args.pad = pad_value;

    try {
        if (o_config->count() == 0)
            if (const char* e = std::getenv("ENVAR_CONFIG"); e != nullptr && *e != '\0')
                config_flag = e;
        const std::map<std::string, std::string> file_kv =
            config_flag.empty() ? std::map<std::string, std::string>{}
                                : read_config_file(config_flag);
        const SettingSource src{file_kv};
        const auto as_string = [](const std::string& s, const std::string&) { return s; };
        src.resolve(o_format, "ENVAR_FORMAT", "format", cfg.format, as_string);
        src.resolve(o_seed, "ENVAR_SEED", "seed", cfg.seed, parse_uint_setting);
        src.resolve(o_tol, "ENVAR_TOL", "tol", cfg.tol.state, parse_double_setting);
        src.resolve(o_tol_norm, "ENVAR_TOL_NORM", "tol-norm", cfg.tol.norm,
                    parse_double_setting);
        src.resolve(o_tol_unitary, "ENVAR_TOL_UNITARY", "tol-unitary", cfg.tol.unitary,
                    parse_double_setting);
        src.resolve(o_finegrain_cap, "ENVAR_FINEGRAIN_CAP", "finegrain-cap", finegrain_cap,
                    parse_int_setting);
        src.resolve(o_ensemble_cap, "ENVAR_ENSEMBLE_CAP", "ensemble-cap",
                    cfg.ensemble_dimension_cap, parse_int_setting);
        src.resolve(o_copy_cap, "ENVAR_COPY_CAP", "copy-cap", cfg.copy_cap, parse_int_setting);

        if (cfg.format != "json" && cfg.format != "csv" && cfg.format != "pretty")
            throw envar::ParseError("format must be one of json, csv, pretty");
        if (!(cfg.tol.state > 0) || !(cfg.tol.norm > 0) || !(cfg.tol.unitary > 0))
            throw envar::ParseError("tolerances must be positive");
        if (finegrain_cap < 1 || cfg.ensemble_dimension_cap < 1 || cfg.copy_cap < 1)
            throw envar::ParseError("caps must be positive");
        cfg.finegrain_cap = BigInt(finegrain_cap);
        Json inputs;
        Rendered r;
        std::string command;
        if (*cmd_schmidt) {
            command = "schmidt";
            r = run_schmidt(schmidt_args, cfg, inputs);
        } else if (*cmd_envariance) {
            command = "envariance";
            r = run_envariance(env_args, cfg, inputs);
        } else if (*cmd_finegrain) {
            command = "finegrain";
            r = run_finegrain(fine_args, cfg, inputs);
        } else if (*cmd_born) {
            command = "born";
            r = run_born(born_args, cfg, inputs);
        } else if (*cmd_dedekind) {
            command = "dedekind";
            r = run_dedekind(dede_args, cfg, inputs);
        } else if (*cmd_ensemble) {
            command = "ensemble";
            r = run_ensemble(ens_args, cfg, inputs);
        } else if (*cmd_maverick) {
            command = "maverick";
            r = run_maverick(mav_args, cfg, inputs);
        }
        emit(command, r, std::move(inputs), cfg);
    } catch (const envar::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.category() == envar::ErrorCategory::input ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
