// Batch front door: parse instance/set/function/problem files, dispatch to
// the library, and emit replayable JSON reports.
//
// Exit codes: 0 = verdict computed (including Fails/Infeasible — those are
// results), 1 = usage or parse error, 2 = precondition failure surfaced from
// the library.

#include "convgrp/io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace convgrp;

namespace {

struct Options {
    std::string instance_path, set_path, function_path, problem_path, probes_path;
    std::string generators_path;
    std::string point, x, h, phi;
    std::string strategy = "auto";
    std::string window_spec, schedule_spec = "";
    std::string out_path, verify_path;
    long long n = 0;
    long long bounds_terms = 0, bounds_coeff = 0;
    bool cone = false;
    bool sublinear = false;
};

Window parse_window_spec(const std::string& spec, Window base) {
    if (spec.empty()) return base;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) {
            base.radius = std::stoll(item);
            continue;
        }
        const std::string key = item.substr(0, eq);
        const std::string val = item.substr(eq + 1);
        if (key == "radius")
            base.radius = std::stoll(val);
        else if (key == "denom_log2")
            base.denom_log2 = std::stoll(val);
        else if (key == "denominator")
            base.denominator = std::stoll(val);
        else if (key == "real_max")
            base.real_max = std::stod(val);
        else if (key == "real_step")
            base.real_step = std::stod(val);
        else
            throw ParseError("--window: unknown key \"" + key + "\"");
    }
    return base;
}

std::vector<long long> parse_schedule(const std::string& spec) {
    std::vector<long long> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoll(item));
    if (out.empty()) throw ParseError("--schedule: expected a comma-separated list of integers");
    return out;
}

Element parse_element_arg(const std::string& s, const StructureDescriptor& S,
                          const char* flag_name) {
    Json j;
    try {
        j = Json::parse(s);
    } catch (const std::exception& e) {
        throw ParseError(std::string(flag_name) + ": " + e.what());
    }
    return element_from_json(j, S);
}

HullStrategy parse_strategy(const std::string& s) {
    if (s == "auto") return HullStrategy::Auto;
    if (s == "finite") return HullStrategy::Finite;
    if (s == "lattice") return HullStrategy::Lattice;
    if (s == "fixpoint") return HullStrategy::Fixpoint;
    throw ParseError("--strategy: expected auto|finite|lattice|fixpoint");
}

SearchBounds require_bounds(const Options& o) {
    if (o.bounds_terms < 1 || o.bounds_coeff < 1)
        throw ParseError("this command requires --bounds-terms and --bounds-coeff (>= 1)");
    return SearchBounds{o.bounds_terms, o.bounds_coeff};
}

std::vector<Element> load_probes(const Options& o, const FunctionTable& f) {
    if (!o.probes_path.empty())
        return set_from_json(load_json(o.probes_path), *f.instance());
    return f.instance()->enumerate(f.window());
}

// One entry per input file the command actually read.
std::map<std::string, std::string> digests(std::initializer_list<std::string> paths) {
    std::map<std::string, std::string> out;
    for (const auto& p : paths)
        if (!p.empty()) out[p] = digest_file(p);
    return out;
}

int emit(Json report, const Options& o) {
    if (!o.verify_path.empty()) {
        Json old = load_json(o.verify_path);
        const bool same = old.contains("command") && old.at("command") == report.at("command") &&
                          old.contains("inputs") && old.at("inputs") == report.at("inputs") &&
                          old.contains("verdict") && old.at("verdict") == report.at("verdict") &&
                          old.contains("certificates") &&
                          old.at("certificates") == report.at("certificates");
        report["verified"] = same;
    }
    const std::string text = report.dump(2) + "\n";
    if (o.out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(o.out_path, std::ios::binary);
        if (!out) throw ParseError("cannot write report: " + o.out_path);
        out << text;
    }
    return 0;
}

int cmd_hull(const Options& o) {
    Json inst_json = load_json(o.instance_path);
    InstancePtr S = instance_from_json(inst_json);
    Window w = parse_window_spec(o.window_spec, instance_default_window(inst_json));
    HullStrategy strat = parse_strategy(o.strategy);
    SearchBounds bounds{o.bounds_terms, o.bounds_coeff};
    if (strat == HullStrategy::Auto || strat == HullStrategy::Fixpoint) bounds = require_bounds(o);
    auto A = set_from_json(load_json(o.set_path), *S);
    HullReport r = hull(A, S, strat, bounds, w);
    Json verdict = hull_report_to_json(r);
    Json trunc{{"bounds", bounds_to_json(r.bounds)}, {"window", window_to_json(r.window)}};
    return emit(make_report("hull", digests({o.instance_path, o.set_path}), verdict,
                            Json::object(), trunc),
                o);
}

int cmd_member(const Options& o) {
    Json inst_json = load_json(o.instance_path);
    InstancePtr S = instance_from_json(inst_json);
    Window w = parse_window_spec(o.window_spec, instance_default_window(inst_json));
    SearchBounds bounds = require_bounds(o);
    auto A = set_from_json(load_json(o.set_path), *S);
    Element x = parse_element_arg(o.point, *S, "--point");
    MembershipResult r = member(x, A, S, parse_strategy(o.strategy), bounds, w);
    Json cert = Json::object();
    if (r.certificate) cert["witness"] = combination_to_json(*r.certificate);
    return emit(make_report("member", digests({o.instance_path, o.set_path}),
                            membership_to_json(r), cert,
                            Json{{"bounds", bounds_to_json(bounds)},
                                 {"window", window_to_json(w)}}),
                o);
}

int cmd_check(const Options& o) {
    Json inst_json = load_json(o.instance_path);
    InstancePtr S = instance_from_json(inst_json);
    Window w = parse_window_spec(o.window_spec, instance_default_window(inst_json));
    SearchBounds bounds = require_bounds(o);
    auto A = set_from_json(load_json(o.set_path), *S);
    ConvexityVerdict v = is_convex(ConvexSetRep::explicit_set(A), *S, bounds, w, o.cone);
    Json cert = Json::object();
    if (v.cert)
        cert = Json{{"combination", combination_to_json(v.cert->combination)},
                    {"violator", element_to_json(v.cert->violator)}};
    return emit(make_report("check", digests({o.instance_path, o.set_path}),
                            convexity_to_json(v), cert,
                            Json{{"bounds", bounds_to_json(bounds)},
                                 {"window", window_to_json(w)},
                                 {"skipped_residuals", v.skipped_residuals}}),
                o);
}

int cmd_probe(const Options& o) {
    if (o.n < 2) throw ParseError("probe: --n must be >= 2");
    Json inst_json = load_json(o.instance_path);
    InstancePtr S = instance_from_json(inst_json);
    Window w = parse_window_spec(o.window_spec, instance_default_window(inst_json));
    ProbeResult r = probe_divisibility(*S, o.n, w);
    return emit(make_report("probe", digests({o.instance_path}), probe_to_json(r), Json::object(),
                            Json{{"window", window_to_json(w)}, {"n", o.n}}),
                o);
}

int cmd_deriv(const Options& o) {
    FunctionTable f = table_from_json(load_json(o.function_path), directory_of(o.function_path));
    Element x = parse_element_arg(o.x, *f.instance(), "--x");
    Element h = parse_element_arg(o.h, *f.instance(), "--h");
    auto schedule = parse_schedule(o.schedule_spec);
    auto r = directional_derivative(f, x, h, schedule, o.sublinear);
    return emit(make_report("deriv", digests({o.function_path}), derivative_to_json(r),
                            Json::object(),
                            Json{{"schedule", schedule}, {"window", window_to_json(f.window())}}),
                o);
}

int cmd_subdiff(const Options& o) {
    FunctionTable f = table_from_json(load_json(o.function_path), directory_of(o.function_path));
    Element x0 = parse_element_arg(o.x, *f.instance(), "--x");
    auto probes = load_probes(o, f);
    auto r = subdifferential(f, x0, probes);
    return emit(make_report("subdiff", digests({o.function_path, o.probes_path}),
                            subdifferential_to_json(r), Json::object(),
                            Json{{"probes", probes.size()},
                                 {"window", window_to_json(f.window())}}),
                o);
}

int cmd_conjugate(const Options& o) {
    FunctionTable f = table_from_json(load_json(o.function_path), directory_of(o.function_path));
    Json phi_json;
    try {
        phi_json = Json::parse(o.phi);
    } catch (const std::exception& e) {
        throw ParseError(std::string("--phi: ") + e.what());
    }
    AdditiveWitness phi{f.instance(), qvec_from_json(phi_json)};
    ExtScalar v = conjugate(f, phi);
    return emit(make_report("conjugate", digests({o.function_path}),
                            Json{{"phi", qvec_to_json(phi.coeffs)}, {"value", v.str()}},
                            Json::object(), Json{{"window", window_to_json(f.window())}}),
                o);
}

int cmd_duality(const Options& o) {
    auto p = duality_problem_from_json(load_json(o.problem_path), directory_of(o.problem_path));
    auto r = fenchel_duality(p.f, p.g, p.map, p.core_probes);
    Json cert = Json::object();
    if (r.witness) cert["witness"] = witness_to_json(*r.witness);
    return emit(make_report("duality", digests({o.problem_path}), duality_to_json(r), cert,
                            Json{{"window", window_to_json(p.f.window())},
                                 {"core_probes", p.core_probes.size()}}),
                o);
}

int cmd_sandwich(const Options& o) {
    auto p = duality_problem_from_json(load_json(o.problem_path), directory_of(o.problem_path));
    auto r = sandwich_witness(p.f, p.g, p.map);
    Json verdict = sandwich_to_json(r);
    Json cert = Json::object();
    if (verdict.contains("certificate")) cert = verdict.at("certificate");
    if (verdict.contains("witness")) cert = verdict.at("witness");
    return emit(make_report("sandwich", digests({o.problem_path}), verdict, cert,
                            Json{{"window", window_to_json(p.f.window())}}),
                o);
}

int cmd_extend(const Options& o) {
    FunctionTable f = table_from_json(load_json(o.function_path), directory_of(o.function_path));
    Json gj = load_json(o.generators_path);
    expect_object(gj, "generators file");
    reject_unknown_keys(gj, {"generators"}, "generators file");
    if (!gj.contains("generators")) throw ParseError("generators file: missing \"generators\"");
    std::vector<std::pair<Element, Rational>> gens;
    for (const auto& pair : gj.at("generators")) {
        if (!pair.is_array() || pair.size() != 2)
            throw ParseError("generators file: each entry is a [element, value] pair");
        gens.emplace_back(element_from_json(pair[0], *f.instance()),
                          rational_from_json(pair[1]));
    }
    auto r = hahn_banach_extend(f, gens);
    return emit(make_report("extend", digests({o.function_path, o.generators_path}),
                            interpolation_to_json(r), Json::object(),
                            Json{{"window", window_to_json(f.window())}}),
                o);
}

int cmd_value(const Options& o) {
    auto p = constrained_problem_from_json(load_json(o.problem_path),
                                           directory_of(o.problem_path));
    if (p.rhs_grid.empty()) throw ParseError("value: problem file needs a nonempty \"rhs_grid\"");
    auto t = value_function(p.problem, p.rhs_grid);
    return emit(make_report("value", digests({o.problem_path}), value_table_to_json(t),
                            Json::object(),
                            Json{{"window", window_to_json(p.problem.objective.window())},
                                 {"grid_points", p.rhs_grid.size()}}),
                o);
}

int cmd_lagrange(const Options& o) {
    auto p = constrained_problem_from_json(load_json(o.problem_path),
                                           directory_of(o.problem_path));
    if (!p.b0 || p.lambda_grid.empty())
        throw ParseError("lagrange: problem file needs \"b0\" and a nonempty \"lambda_grid\"");
    auto r = find_multiplier(p.problem, *p.b0, p.lambda_grid);
    return emit(make_report("lagrange", digests({o.problem_path}), lagrangian_to_json(r),
                            Json{{"lambda", qvec_to_json(r.lambda)}},
                            Json{{"window", window_to_json(p.problem.objective.window())},
                                 {"multipliers_tried", p.lambda_grid.size()}}),
                o);
}

int cmd_maxrule(const Options& o) {
    FunctionTable f = table_from_json(load_json(o.function_path), directory_of(o.function_path));
    Element x0 = parse_element_arg(o.x, *f.instance(), "--x");
    Element h = parse_element_arg(o.h, *f.instance(), "--h");
    auto probes = load_probes(o, f);
    auto schedule = parse_schedule(o.schedule_spec);
    auto r = max_formula_check(f, x0, h, probes, schedule);
    return emit(make_report("maxrule", digests({o.function_path, o.probes_path}),
                            max_formula_to_json(r), Json::object(),
                            Json{{"schedule", schedule},
                                 {"probes", probes.size()},
                                 {"window", window_to_json(f.window())}}),
                o);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact convex analysis over commutative monoids and groups"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", o.out_path, "write the report to this file instead of stdout");
        cmd->add_option("--verify", o.verify_path,
                        "replay against a previously written report file");
    };
    auto add_bounds = [&](CLI::App* cmd) {
        cmd->add_option("--bounds-terms", o.bounds_terms, "max terms per combination");
        cmd->add_option("--bounds-coeff", o.bounds_coeff, "max coefficient per term");
    };

    auto* hull_cmd = app.add_subcommand("hull", "combination-closure of a set");
    hull_cmd->add_option("--instance", o.instance_path)->required();
    hull_cmd->add_option("--set", o.set_path)->required();
    hull_cmd->add_option("--strategy", o.strategy, "auto|finite|lattice|fixpoint");
    hull_cmd->add_option("--window", o.window_spec);
    add_bounds(hull_cmd);
    add_common(hull_cmd);

    auto* member_cmd = app.add_subcommand("member", "hull membership with witness");
    member_cmd->add_option("--instance", o.instance_path)->required();
    member_cmd->add_option("--set", o.set_path)->required();
    member_cmd->add_option("--point", o.point, "element as inline JSON")->required();
    member_cmd->add_option("--strategy", o.strategy);
    member_cmd->add_option("--window", o.window_spec);
    add_bounds(member_cmd);
    add_common(member_cmd);

    auto* check_cmd = app.add_subcommand("check", "bounded convexity check of a set");
    check_cmd->add_option("--instance", o.instance_path)->required();
    check_cmd->add_option("--set", o.set_path)->required();
    check_cmd->add_flag("--cone", o.cone, "cone variant: free left coefficient");
    check_cmd->add_option("--window", o.window_spec);
    add_bounds(check_cmd);
    add_common(check_cmd);

    auto* probe_cmd = app.add_subcommand("probe", "n-divisibility probe");
    probe_cmd->add_option("--instance", o.instance_path)->required();
    probe_cmd->add_option("--n", o.n)->required();
    probe_cmd->add_option("--window", o.window_spec);
    add_common(probe_cmd);

    auto* deriv_cmd = app.add_subcommand("deriv", "directional derivative sampling");
    deriv_cmd->add_option("--function", o.function_path)->required();
    deriv_cmd->add_option("--x", o.x, "base point as inline JSON")->required();
    deriv_cmd->add_option("--dir", o.h, "direction as inline JSON")->required();
    deriv_cmd->add_option("--schedule", o.schedule_spec, "comma-separated n values")->required();
    deriv_cmd->add_flag("--sublinear", o.sublinear, "use the division-free sublinear form");
    add_common(deriv_cmd);

    auto* subdiff_cmd = app.add_subcommand("subdiff", "subdifferential polyhedron");
    subdiff_cmd->add_option("--function", o.function_path)->required();
    subdiff_cmd->add_option("--x", o.x, "base point as inline JSON")->required();
    subdiff_cmd->add_option("--probes", o.probes_path, "set file; default: whole window");
    add_common(subdiff_cmd);

    auto* conj_cmd = app.add_subcommand("conjugate", "conjugate value at a dual vector");
    conj_cmd->add_option("--function", o.function_path)->required();
    conj_cmd->add_option("--phi", o.phi, "dual coefficients as inline JSON array")->required();
    add_common(conj_cmd);

    auto* dual_cmd = app.add_subcommand("duality", "primal/dual pair with witness");
    dual_cmd->add_option("--problem", o.problem_path)->required();
    add_common(dual_cmd);

    auto* sand_cmd = app.add_subcommand("sandwich", "affine separator or infeasibility");
    sand_cmd->add_option("--problem", o.problem_path)->required();
    add_common(sand_cmd);

    auto* ext_cmd = app.add_subcommand("extend", "extend additive values under a roof");
    ext_cmd->add_option("--function", o.function_path)->required();
    ext_cmd->add_option("--generators", o.generators_path)->required();
    add_common(ext_cmd);

    auto* value_cmd = app.add_subcommand("value", "value function over a rhs grid");
    value_cmd->add_option("--problem", o.problem_path)->required();
    add_common(value_cmd);

    auto* lag_cmd = app.add_subcommand("lagrange", "multiplier search with weak bound");
    lag_cmd->add_option("--problem", o.problem_path)->required();
    add_common(lag_cmd);

    auto* max_cmd = app.add_subcommand("maxrule", "derivative vs subdifferential maximum");
    max_cmd->add_option("--function", o.function_path)->required();
    max_cmd->add_option("--x", o.x, "base point as inline JSON")->required();
    max_cmd->add_option("--dir", o.h, "direction as inline JSON")->required();
    max_cmd->add_option("--schedule", o.schedule_spec)->required();
    max_cmd->add_option("--probes", o.probes_path, "set file; default: whole window");
    add_common(max_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(hull_cmd)) return cmd_hull(o);
        if (app.got_subcommand(member_cmd)) return cmd_member(o);
        if (app.got_subcommand(check_cmd)) return cmd_check(o);
        if (app.got_subcommand(probe_cmd)) return cmd_probe(o);
        if (app.got_subcommand(deriv_cmd)) return cmd_deriv(o);
        if (app.got_subcommand(subdiff_cmd)) return cmd_subdiff(o);
        if (app.got_subcommand(conj_cmd)) return cmd_conjugate(o);
        if (app.got_subcommand(dual_cmd)) return cmd_duality(o);
        if (app.got_subcommand(sand_cmd)) return cmd_sandwich(o);
        if (app.got_subcommand(ext_cmd)) return cmd_extend(o);
        if (app.got_subcommand(value_cmd)) return cmd_value(o);
        if (app.got_subcommand(lag_cmd)) return cmd_lagrange(o);
        if (app.got_subcommand(max_cmd)) return cmd_maxrule(o);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "precondition failure: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
