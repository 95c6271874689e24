#pragma once

#include "convgrp/duality.hpp"
#include "convgrp/functions.hpp"
#include "convgrp/hull.hpp"
#include "convgrp/instances.hpp"
#include "convgrp/optimize.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace convgrp {

/// Insertion-ordered JSON keeps report output byte-for-byte deterministic.
using Json = nlohmann::ordered_json;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return j;
}

inline std::string directory_of(const std::string& path) {
    auto slash = path.find_last_of('/');
    return slash == std::string::npos ? std::string(".") : path.substr(0, slash);
}

/// FNV-1a 64-bit over the raw file bytes; used only to pin inputs in reports.
inline std::string digest_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::uint64_t h = 1469598103934665603ULL;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

// ---------------------------------------------------------------------------
// scalars

inline void expect_object(const Json& j, const std::string& what) {
    if (!j.is_object()) throw ParseError(what + ": expected a JSON object");
}

inline void reject_unknown_keys(const Json& j, const std::vector<std::string>& allowed,
                                const std::string& what) {
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const auto& a : allowed)
            if (key == a) ok = true;
        if (!ok) throw ParseError(what + ": unknown field \"" + key + "\"");
    }
}

inline Rational rational_from_json(const Json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>());
    throw ParseError("expected a rational as \"p/q\" string or integer");
}

inline ExtScalar ext_from_json(const Json& j) {
    if (j.is_string()) return ExtScalar::parse(j.get<std::string>());
    if (j.is_number_integer()) return ExtScalar(Rational(j.get<long long>()));
    throw ParseError("expected a value as \"p/q\", \"+inf\", \"-inf\" or integer");
}

inline Json rational_to_json(const Rational& q) { return Json(to_string(q)); }
inline Json ext_to_json(const ExtScalar& v) { return Json(v.str()); }

inline QVec qvec_from_json(const Json& j) {
    if (!j.is_array()) throw ParseError("expected an array of rationals");
    QVec out;
    for (const auto& e : j) out.push_back(rational_from_json(e));
    return out;
}

inline Json qvec_to_json(const QVec& v) {
    Json a = Json::array();
    for (const auto& q : v) a.push_back(to_string(q));
    return a;
}

// ---------------------------------------------------------------------------
// windows

inline Window window_from_json(const Json& j) {
    expect_object(j, "window");
    reject_unknown_keys(j, {"radius", "denom_log2", "denominator", "real_max", "real_step"},
                        "window");
    Window w;
    if (j.contains("radius")) w.radius = j.at("radius").get<long long>();
    if (j.contains("denom_log2")) w.denom_log2 = j.at("denom_log2").get<long long>();
    if (j.contains("denominator")) w.denominator = j.at("denominator").get<long long>();
    if (j.contains("real_max")) w.real_max = j.at("real_max").get<double>();
    if (j.contains("real_step")) w.real_step = j.at("real_step").get<double>();
    return w;
}

inline Json window_to_json(const Window& w) {
    Json j = Json::object();
    j["radius"] = w.radius;
    j["denom_log2"] = w.denom_log2;
    j["denominator"] = w.denominator;
    if (w.real_step != 0.0) {
        j["real_max"] = w.real_max;
        j["real_step"] = w.real_step;
    }
    return j;
}

// ---------------------------------------------------------------------------
// instances

inline InstancePtr instance_from_json(const Json& j) {
    expect_object(j, "instance");
    if (!j.contains("kind")) throw ParseError("instance: missing \"kind\"");
    const std::string kind = j.at("kind").get<std::string>();
    auto get_int = [&](const char* key) {
        if (!j.contains(key))
            throw ParseError("instance kind \"" + kind + "\": missing \"" + key + "\"");
        return j.at(key).get<int>();
    };
    if (kind == "lattice") {
        reject_unknown_keys(j, {"kind", "dimension", "window"}, "instance");
        return std::make_shared<LatticeZd>(get_int("dimension"));
    }
    if (kind == "general_lattice") {
        reject_unknown_keys(j, {"kind", "generators", "window"}, "instance");
        if (!j.contains("generators")) throw ParseError("general_lattice: missing generators");
        std::vector<RatVec> gens;
        for (const auto& row : j.at("generators")) {
            RatVec g;
            for (const auto& e : row) g.push_back(rational_from_json(e));
            gens.push_back(std::move(g));
        }
        return std::make_shared<GeneralLattice>(std::move(gens));
    }
    if (kind == "dyadic") {
        reject_unknown_keys(j, {"kind", "dimension", "window"}, "instance");
        return std::make_shared<DyadicRationals>(j.contains("dimension") ? get_int("dimension")
                                                                         : 1);
    }
    if (kind == "finite_cyclic") {
        reject_unknown_keys(j, {"kind", "moduli", "window"}, "instance");
        if (!j.contains("moduli")) throw ParseError("finite_cyclic: missing moduli");
        std::vector<long long> moduli;
        for (const auto& m : j.at("moduli")) moduli.push_back(m.get<long long>());
        return std::make_shared<FiniteCyclic>(std::move(moduli));
    }
    if (kind == "rationals_mod1") {
        reject_unknown_keys(j, {"kind", "window"}, "instance");
        return std::make_shared<RationalsMod1>();
    }
    if (kind == "set_algebra") {
        reject_unknown_keys(j, {"kind", "ground_size", "window"}, "instance");
        return std::make_shared<SetAlgebraGroup>(get_int("ground_size"));
    }
    if (kind == "meet_semilattice") {
        reject_unknown_keys(j, {"kind", "meet_table", "window"}, "instance");
        if (!j.contains("meet_table")) throw ParseError("meet_semilattice: missing meet_table");
        std::vector<std::vector<int>> table;
        for (const auto& row : j.at("meet_table")) {
            std::vector<int> r;
            for (const auto& e : row) r.push_back(e.get<int>());
            table.push_back(std::move(r));
        }
        return std::make_shared<MeetSemilattice>(std::move(table));
    }
    if (kind == "arctan") {
        reject_unknown_keys(j, {"kind", "window"}, "instance");
        return std::make_shared<ArctanSemigroup>();
    }
    throw ParseError("instance: unknown kind \"" + kind + "\"");
}

/// Instance files may carry a default window alongside the kind/parameters.
inline Window instance_default_window(const Json& j) {
    if (j.is_object() && j.contains("window")) return window_from_json(j.at("window"));
    return Window{};
}

/// Accepts either an inline instance object or a path string relative to the
/// referencing file's directory.
inline InstancePtr instance_from_ref(const Json& j, const std::string& base_dir) {
    if (j.is_string()) return instance_from_json(load_json(base_dir + "/" + j.get<std::string>()));
    return instance_from_json(j);
}

// ---------------------------------------------------------------------------
// elements

inline Element element_from_json(const Json& j, const StructureDescriptor& S) {
    const Element z = S.zero();
    if (z.holds_ints()) {
        if (!j.is_array()) throw ParseError("element: expected an array of integers");
        IntVec v;
        for (const auto& e : j) {
            if (e.is_string())
                v.emplace_back(Integer(e.get<std::string>()));
            else
                v.emplace_back(e.get<long long>());
        }
        return Element(std::move(v));
    }
    if (z.holds_rats()) {
        if (!j.is_array()) throw ParseError("element: expected an array of rationals");
        RatVec v;
        for (const auto& e : j) v.push_back(rational_from_json(e));
        return Element(std::move(v));
    }
    if (z.holds_bits()) {
        if (!j.is_number_unsigned() && !j.is_number_integer())
            throw ParseError("element: expected a bitmask integer");
        return Element(Bits{j.get<std::uint32_t>()});
    }
    if (z.holds_node()) {
        if (!j.is_number_integer()) throw ParseError("element: expected a node index");
        return Element(Node{j.get<int>()});
    }
    if (!j.is_number()) throw ParseError("element: expected a real number");
    return Element(Real{j.get<double>()});
}

inline Json element_to_json(const Element& x) {
    if (x.holds_ints()) {
        Json a = Json::array();
        for (const auto& c : x.ints()) a.push_back(c.str());
        return a;
    }
    if (x.holds_rats()) {
        Json a = Json::array();
        for (const auto& c : x.rats()) a.push_back(to_string(c));
        return a;
    }
    if (x.holds_bits()) return Json(x.bits().mask);
    if (x.holds_node()) return Json(x.node().index);
    return Json(x.real().v);
}

/// Set file: {"elements": [elem, ...]}.
inline std::vector<Element> set_from_json(const Json& j, const StructureDescriptor& S) {
    expect_object(j, "set");
    reject_unknown_keys(j, {"elements"}, "set");
    if (!j.contains("elements")) throw ParseError("set: missing \"elements\"");
    std::vector<Element> out;
    for (const auto& e : j.at("elements")) out.push_back(element_from_json(e, S));
    return out;
}

// ---------------------------------------------------------------------------
// function tables

inline OutsidePolicy outside_policy_from_json(const Json& j) {
    const std::string s = j.get<std::string>();
    if (s == "plus_infinity") return OutsidePolicy::PlusInfinity;
    if (s == "undefined") return OutsidePolicy::Undefined;
    throw ParseError("outside_policy: expected \"plus_infinity\" or \"undefined\"");
}

inline FunctionTable table_from_json(const Json& j, const std::string& base_dir) {
    expect_object(j, "function table");
    reject_unknown_keys(j, {"instance", "window", "values", "outside_policy"}, "function table");
    if (!j.contains("instance") || !j.contains("window") || !j.contains("values"))
        throw ParseError("function table: needs \"instance\", \"window\", \"values\"");
    InstancePtr S = instance_from_ref(j.at("instance"), base_dir);
    Window w = window_from_json(j.at("window"));
    std::vector<std::pair<Element, ExtScalar>> values;
    for (const auto& pair : j.at("values")) {
        if (!pair.is_array() || pair.size() != 2)
            throw ParseError("function table: each value is a [element, value] pair");
        values.emplace_back(element_from_json(pair[0], *S), ext_from_json(pair[1]));
    }
    OutsidePolicy policy = OutsidePolicy::PlusInfinity;
    if (j.contains("outside_policy")) policy = outside_policy_from_json(j.at("outside_policy"));
    try {
        return FunctionTable(std::move(S), w, std::move(values), policy);
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("function table: ") + e.what());
    }
}

/// Accepts an inline table object or a path string.
inline FunctionTable table_from_ref(const Json& j, const std::string& base_dir) {
    if (j.is_string()) {
        const std::string path = base_dir + "/" + j.get<std::string>();
        return table_from_json(load_json(path), directory_of(path));
    }
    return table_from_json(j, base_dir);
}

inline Json table_to_json(const FunctionTable& f) {
    Json j = Json::object();
    j["instance"] = f.instance()->name();
    j["window"] = window_to_json(f.window());
    Json vals = Json::array();
    for (const auto& [x, v] : f.values()) vals.push_back(Json::array({element_to_json(x), v.str()}));
    j["values"] = vals;
    j["outside_policy"] =
        f.outside_policy() == OutsidePolicy::PlusInfinity ? "plus_infinity" : "undefined";
    return j;
}

// ---------------------------------------------------------------------------
// maps

/// Map spec: the string "identity", or {"kind": "matrix", "matrix": [[..]]}
/// acting on integer-vector coordinates.
inline AdditiveMap map_from_json(const Json& j, InstancePtr source, InstancePtr target) {
    AdditiveMap T;
    T.source = std::move(source);
    T.target = std::move(target);
    if (j.is_string() && j.get<std::string>() == "identity") {
        T.name = "identity";
        T.apply = [](const Element& x) { return x; };
        return T;
    }
    expect_object(j, "map");
    reject_unknown_keys(j, {"kind", "matrix"}, "map");
    if (!j.contains("kind") || j.at("kind").get<std::string>() != "matrix")
        throw ParseError("map: expected \"identity\" or kind \"matrix\"");
    std::vector<std::vector<Integer>> m;
    for (const auto& row : j.at("matrix")) {
        std::vector<Integer> r;
        for (const auto& e : row)
            r.emplace_back(e.is_string() ? Integer(e.get<std::string>())
                                         : Integer(e.get<long long>()));
        m.push_back(std::move(r));
    }
    if (m.empty()) throw ParseError("map: empty matrix");
    T.name = "matrix";
    T.apply = [m](const Element& x) {
        const auto& v = x.ints();
        IntVec out;
        for (const auto& row : m) {
            if (row.size() != v.size()) throw std::invalid_argument("map matrix: width mismatch");
            Integer s = 0;
            for (std::size_t i = 0; i < v.size(); ++i) s += row[i] * v[i];
            out.push_back(std::move(s));
        }
        return Element(std::move(out));
    };
    return T;
}

// ---------------------------------------------------------------------------
// problem files

struct DualityProblem {
    FunctionTable f, g;
    AdditiveMap map;
    std::vector<Element> core_probes;  ///< directions in the target instance
};

/// Duality/sandwich problem: {"f": table|path, "g": table|path,
/// "map": spec, "core_probes": [elem, ...]}.
inline DualityProblem duality_problem_from_json(const Json& j, const std::string& base_dir) {
    expect_object(j, "duality problem");
    reject_unknown_keys(j, {"f", "g", "map", "core_probes"}, "duality problem");
    if (!j.contains("f") || !j.contains("g"))
        throw ParseError("duality problem: needs \"f\" and \"g\"");
    DualityProblem p{table_from_ref(j.at("f"), base_dir), table_from_ref(j.at("g"), base_dir), {},
                     {}};
    Json map_spec = j.contains("map") ? j.at("map") : Json("identity");
    p.map = map_from_json(map_spec, p.f.instance(), p.g.instance());
    if (j.contains("core_probes"))
        for (const auto& e : j.at("core_probes"))
            p.core_probes.push_back(element_from_json(e, *p.g.instance()));
    return p;
}

struct ConstrainedProblemFile {
    ConstrainedProblem problem;
    std::vector<QVec> rhs_grid;
    std::optional<QVec> b0;
    std::vector<QVec> lambda_grid;
};

/// Constrained problem: {"objective": table|path, "constraints": [table|path],
/// "rhs_grid": [[q..]..], "b0": [q..], "lambda_grid": [[q..]..]}.
inline ConstrainedProblemFile constrained_problem_from_json(const Json& j,
                                                            const std::string& base_dir) {
    expect_object(j, "constrained problem");
    reject_unknown_keys(j, {"objective", "constraints", "rhs_grid", "b0", "lambda_grid"},
                        "constrained problem");
    if (!j.contains("objective") || !j.contains("constraints"))
        throw ParseError("constrained problem: needs \"objective\" and \"constraints\"");
    ConstrainedProblemFile out{{table_from_ref(j.at("objective"), base_dir), {}}, {}, {}, {}};
    for (const auto& c : j.at("constraints"))
        out.problem.constraints.push_back(table_from_ref(c, base_dir));
    validate_problem(out.problem);
    if (j.contains("rhs_grid"))
        for (const auto& b : j.at("rhs_grid")) out.rhs_grid.push_back(qvec_from_json(b));
    if (j.contains("b0")) out.b0 = qvec_from_json(j.at("b0"));
    if (j.contains("lambda_grid"))
        for (const auto& l : j.at("lambda_grid")) out.lambda_grid.push_back(qvec_from_json(l));
    return out;
}

// ---------------------------------------------------------------------------
// result serialization

inline Json combination_to_json(const NCombination& c) {
    Json j = Json::object();
    j["lhs_coeff"] = c.lhs_coeff;
    Json terms = Json::array();
    for (const auto& [m, x] : c.terms) terms.push_back(Json::array({m, element_to_json(x)}));
    j["terms"] = terms;
    return j;
}

inline Json bounds_to_json(const SearchBounds& b) {
    return Json{{"max_terms", b.max_terms}, {"max_coeff", b.max_coeff}};
}

inline Json elements_to_json(const std::vector<Element>& xs) {
    Json a = Json::array();
    for (const auto& x : xs) a.push_back(element_to_json(x));
    return a;
}

inline Json hull_report_to_json(const HullReport& r) {
    Json j = Json::object();
    j["hull"] = elements_to_json(r.hull);
    switch (r.method) {
        case HullMethod::FiniteGroupTheorem: j["method"] = "finite_group"; break;
        case HullMethod::LatticeIntersection: j["method"] = "lattice_intersection"; break;
        case HullMethod::BoundedFixpoint: j["method"] = "bounded_fixpoint"; break;
    }
    j["certified"] = r.certified;
    return j;
}

inline Json convexity_to_json(const ConvexityVerdict& v) {
    Json j = Json::object();
    j["convex"] = v.convex;
    if (v.cert) {
        j["certificate"] = Json{{"combination", combination_to_json(v.cert->combination)},
                                {"violator", element_to_json(v.cert->violator)}};
    }
    j["skipped_residuals"] = v.skipped_residuals;
    return j;
}

inline Json membership_to_json(const MembershipResult& r) {
    Json j = Json::object();
    switch (r.kind) {
        case MembershipKind::Member: j["kind"] = "Member"; break;
        case MembershipKind::NonMemberCertified: j["kind"] = "NonMemberCertified"; break;
        case MembershipKind::UnknownWithinBounds: j["kind"] = "UnknownWithinBounds"; break;
    }
    if (r.certificate) j["certificate"] = combination_to_json(*r.certificate);
    return j;
}

inline Json probe_to_json(const ProbeResult& r) {
    Json j = Json::object();
    if (std::holds_alternative<ProbeDivisible>(r)) {
        j["verdict"] = "Divisible";
    } else if (const auto* nd = std::get_if<ProbeNotDivisible>(&r)) {
        j["verdict"] = "NotDivisible";
        j["witness"] = element_to_json(nd->witness);
    } else {
        j["verdict"] = "Unknown";
    }
    return j;
}

inline Json derivative_to_json(const DirectionalDerivativeReport& r) {
    Json j = Json::object();
    j["x"] = element_to_json(r.x);
    j["h"] = element_to_json(r.h);
    Json samples = Json::array();
    for (const auto& s : r.samples)
        samples.push_back(Json{{"n", s.n}, {"g", element_to_json(s.g)}, {"value", s.value.str()}});
    j["samples"] = samples;
    j["infimum"] = r.infimum.str();
    j["stabilized"] = r.stabilized;
    return j;
}

inline Json subdifferential_to_json(const SubdifferentialRep& r) {
    Json j = Json::object();
    j["x0"] = element_to_json(r.x0);
    j["dimension"] = r.dimension;
    Json rows = Json::array();
    for (std::size_t i = 0; i < r.a.size(); ++i)
        rows.push_back(Json{{"coeffs", qvec_to_json(r.a[i])}, {"rhs", to_string(r.b[i])}});
    j["constraints"] = rows;
    if (r.dimension <= 3) {
        Json verts = Json::array();
        for (const auto& v : r.vertices()) verts.push_back(qvec_to_json(v));
        j["vertices"] = verts;
    }
    return j;
}

inline Json witness_to_json(const AdditiveWitness& w) {
    return Json{{"coeffs", qvec_to_json(w.coeffs)}};
}

inline Json fm_row_to_json(const FMRow& r) {
    return Json{{"coeffs", qvec_to_json(r.coeffs)},
                {"rhs", to_string(r.rhs)},
                {"provenance", qvec_to_json(r.provenance)}};
}

inline Json sandwich_to_json(const SandwichResult& r) {
    Json j = Json::object();
    if (r.witness) {
        j["verdict"] = "Witness";
        j["witness"] = Json{{"coeffs", qvec_to_json(r.witness->a.coeffs)},
                            {"offset", to_string(r.witness->offset)}};
    } else if (r.infeasible) {
        j["verdict"] = "InfeasibleCertificate";
        j["certificate"] = Json{{"upper", fm_row_to_json(r.infeasible->upper)},
                                {"lower", fm_row_to_json(r.infeasible->lower)},
                                {"upper_bound", to_string(r.infeasible->upper_bound)},
                                {"lower_bound", to_string(r.infeasible->lower_bound)}};
    }
    return j;
}

inline Json duality_to_json(const FenchelDualityReport& r) {
    Json j = Json::object();
    j["primal"] = r.primal.str();
    j["dual"] = r.dual.str();
    if (r.witness) j["witness"] = witness_to_json(*r.witness);
    j["weak_holds"] = r.weak_holds;
    j["core_probed"] = r.core_probed;
    j["strong_holds"] = r.strong_holds;
    return j;
}

inline Json interpolation_to_json(const InterpolationResult& r) {
    Json j = Json::object();
    if (r.witness) {
        j["verdict"] = "Witness";
        j["witness"] = witness_to_json(*r.witness);
    } else {
        j["verdict"] = "InfeasibleWithinWindow";
        j["farkas"] = qvec_to_json(r.farkas);
    }
    return j;
}

inline Json max_formula_to_json(const MaxFormulaReport& r) {
    return Json{{"derivative", r.derivative.str()},
                {"best_dual", r.best_dual.str()},
                {"nonempty", r.nonempty},
                {"holds", r.holds}};
}

inline Json value_table_to_json(const ValueFunctionTable& t) {
    Json j = Json::object();
    Json entries = Json::array();
    for (const auto& e : t.entries) {
        Json row = Json::object();
        row["b"] = qvec_to_json(e.b);
        row["value"] = e.value.str();
        row["feasible"] = e.feasible;
        if (e.minimizer) row["minimizer"] = element_to_json(*e.minimizer);
        entries.push_back(row);
    }
    j["entries"] = entries;
    j["window_relative"] = t.window_relative;
    return j;
}

inline Json lagrangian_to_json(const LagrangianReport& r) {
    return Json{{"lambda", qvec_to_json(r.lambda)},
                {"bound", r.bound.str()},
                {"primal", r.primal.str()},
                {"exact", r.exact},
                {"window_relative", r.window_relative}};
}

inline Json subdiff_max_to_json(const SubdiffMaxReport& r) {
    Json j = Json::object();
    Json active = Json::array();
    for (auto i : r.active) active.push_back(i);
    j["active"] = active;
    j["inclusion_holds"] = r.inclusion_holds;
    j["equality_checked"] = r.equality_checked;
    if (r.equality_checked) j["equality_holds"] = r.equality_holds;
    return j;
}

// ---------------------------------------------------------------------------
// report envelope

/// Report schema shared by every command:
/// {command, inputs (path -> content digest), verdict, certificates, truncation}.
inline Json make_report(const std::string& command,
                        const std::map<std::string, std::string>& input_digests,
                        Json verdict, Json certificates, Json truncation) {
    Json j = Json::object();
    j["command"] = command;
    Json inputs = Json::object();
    for (const auto& [path, digest] : input_digests) inputs[path] = digest;
    j["inputs"] = inputs;
    j["verdict"] = std::move(verdict);
    j["certificates"] = std::move(certificates);
    j["truncation"] = std::move(truncation);
    return j;
}

}  // namespace convgrp
