#pragma once

#include "convgrp/duality.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace convgrp {

// ---------------------------------------------------------------------------
// Constrained problems and value functions.
// ---------------------------------------------------------------------------

/// Minimise f over the window subject to g_i(x) <= b_i.
struct ConstrainedProblem {
    FunctionTable objective;
    std::vector<FunctionTable> constraints;  ///< at least one, on the same window
};

inline void validate_problem(const ConstrainedProblem& P) {
    if (P.constraints.empty())
        throw std::invalid_argument("ConstrainedProblem: needs at least one constraint");
    for (const auto& g : P.constraints) {
        if (g.instance()->name() != P.objective.instance()->name())
            throw std::invalid_argument("ConstrainedProblem: mixed instances");
        if (g.values().size() != P.objective.values().size())
            throw std::invalid_argument("ConstrainedProblem: mismatched windows");
    }
}

struct ValueFunctionEntry {
    QVec b;
    ExtScalar value;  ///< +inf exactly when no window element is feasible
    bool feasible = false;
    std::optional<Element> minimizer;
};

struct ValueFunctionTable {
    std::vector<ValueFunctionEntry> entries;
    bool window_relative = true;  ///< the infimum ranges over the window only

    const ValueFunctionEntry& at(const QVec& b) const {
        for (const auto& e : entries)
            if (e.b == b) return e;
        throw std::out_of_range("ValueFunctionTable: rhs vector not on the grid");
    }
    bool on_grid(const QVec& b) const {
        for (const auto& e : entries)
            if (e.b == b) return true;
        return false;
    }
};

/// Exact enumeration of v(b) = inf { f(x) : g_i(x) <= b_i } per grid point.
inline ValueFunctionTable value_function(const ConstrainedProblem& P,
                                         const std::vector<QVec>& grid) {
    validate_problem(P);
    const std::size_t k = P.constraints.size();
    ValueFunctionTable table;
    for (const auto& b : grid) {
        if (b.size() != k)
            throw std::invalid_argument("value_function: rhs dimension != constraint count");
        ValueFunctionEntry e{b, ExtScalar::plus_inf(), false, std::nullopt};
        for (const auto& [x, fx] : P.objective.values()) {
            bool ok = true;
            for (std::size_t i = 0; i < k && ok; ++i)
                ok = P.constraints[i].eval(x) <= ExtScalar(b[i]);
            if (!ok) continue;
            e.feasible = true;
            if (fx < e.value) {
                e.value = fx;
                e.minimizer = x;
            }
        }
        table.entries.push_back(std::move(e));
    }
    return table;
}

// ---------------------------------------------------------------------------
// Laws of the value function.
// ---------------------------------------------------------------------------

struct ValueLawReport {
    bool hypotheses_hold = false;
    bool holds = true;
    std::optional<std::pair<QVec, QVec>> certificate;  ///< failing (b, c) or (b, p*b)
};

struct ValueLawsReport {
    ValueLawReport subadditive;
    std::optional<ValueLawReport> homogeneous;  ///< present when a prime was supplied
};

/// Checks v(b+c) <= v(b) + v(c) on all grid pairs with b+c on the grid, and
/// v(p*b) = p*v(b) when a prime is supplied. Hypotheses are verified
/// separately so a failing law with failing hypotheses reads as consistent.
inline ValueLawsReport value_function_laws(const ConstrainedProblem& P,
                                           const std::vector<QVec>& grid,
                                           std::optional<long long> p = std::nullopt) {
    auto v = value_function(P, grid);
    ValueLawsReport rep;

    rep.subadditive.hypotheses_hold = check_subadditive(P.objective).holds;
    for (const auto& g : P.constraints)
        rep.subadditive.hypotheses_hold =
            rep.subadditive.hypotheses_hold && check_subadditive(g).holds;
    for (const auto& eb : v.entries)
        for (const auto& ec : v.entries) {
            QVec sum = vec_add(eb.b, ec.b);
            if (!v.on_grid(sum)) continue;
            if (!(v.at(sum).value <= eb.value + ec.value)) {
                rep.subadditive.holds = false;
                rep.subadditive.certificate = {eb.b, ec.b};
            }
        }

    if (p) {
        ValueLawReport hom;
        const auto& S = *P.objective.instance();
        hom.hypotheses_hold = rep.subadditive.hypotheses_hold &&
                              S.declared_divisibility(*p) == DeclaredDivisibility::Divisible;
        auto p_homogeneous = [&](const FunctionTable& f) {
            for (const auto& [x, fx] : f.values()) {
                Element px = nth_multiple(x, *p, S);
                if (!f.in_window(px)) continue;
                if (f.eval(px) != Rational(*p) * fx) return false;
            }
            return true;
        };
        hom.hypotheses_hold = hom.hypotheses_hold && p_homogeneous(P.objective);
        for (const auto& g : P.constraints)
            hom.hypotheses_hold = hom.hypotheses_hold && p_homogeneous(g);
        for (const auto& eb : v.entries) {
            QVec pb = vec_scale(Rational(*p), eb.b);
            if (!v.on_grid(pb)) continue;
            if (v.at(pb).value != Rational(*p) * eb.value) {
                hom.holds = false;
                hom.certificate = {eb.b, pb};
            }
        }
        rep.homogeneous = hom;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Lagrangian bounds.
// ---------------------------------------------------------------------------

struct NegativeMultiplier : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// L(x, lambda) = f(x) + lambda . g(x), exact.
inline ExtScalar lagrangian(const ConstrainedProblem& P, const Element& x, const QVec& lambda) {
    validate_problem(P);
    if (lambda.size() != P.constraints.size())
        throw std::invalid_argument("lagrangian: multiplier dimension != constraint count");
    ExtScalar L = P.objective.eval(x);
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        if (lambda[i] < 0) throw NegativeMultiplier("lagrangian: multiplier must be >= 0");
        L = L + lambda[i] * P.constraints[i].eval(x);
    }
    return L;
}

struct LagrangianReport {
    QVec lambda;       ///< best multiplier on the supplied grid
    ExtScalar bound;   ///< inf over the window of f(x) + lambda . (g(x) - b0)
    ExtScalar primal;  ///< v(b0)
    bool exact = false;           ///< zero gap: the multiplier certifies v(b0)
    bool window_relative = true;  ///< both infima range over the window only
};

/// Scans the multiplier grid for the best lower bound on v(b0); every bound
/// is weak (<= v(b0)) because feasible points satisfy lambda . (g - b0) <= 0.
inline LagrangianReport find_multiplier(const ConstrainedProblem& P, const QVec& b0,
                                        const std::vector<QVec>& lambda_grid) {
    validate_problem(P);
    LagrangianReport rep;
    rep.primal = value_function(P, {b0}).entries[0].value;
    rep.bound = ExtScalar::minus_inf();
    for (const auto& lambda : lambda_grid) {
        if (lambda.size() != P.constraints.size())
            throw std::invalid_argument("find_multiplier: multiplier dimension mismatch");
        for (const auto& l : lambda)
            if (l < 0) throw NegativeMultiplier("find_multiplier: multiplier must be >= 0");
        ExtScalar inf = ExtScalar::plus_inf();
        for (const auto& [x, fx] : P.objective.values()) {
            ExtScalar L = fx;
            for (std::size_t i = 0; i < lambda.size(); ++i)
                L = L + lambda[i] * (P.constraints[i].eval(x) + ExtScalar(-b0[i]));
            inf = ext_min(inf, L);
        }
        if (inf > rep.bound) {
            rep.bound = inf;
            rep.lambda = lambda;
        }
    }
    rep.exact = rep.bound == rep.primal;
    return rep;
}

// ---------------------------------------------------------------------------
// Subdifferential of a pointwise maximum.
// ---------------------------------------------------------------------------

struct SubdiffMaxReport {
    std::vector<std::size_t> active;  ///< I(x0) = { i : f_i(x0) = max }
    bool inclusion_holds = false;     ///< conv of the union sits inside d(max)(x0)
    bool equality_checked = false;    ///< exact vertex comparison ran (dimension <= 2)
    bool equality_holds = false;
};

/// Checks d(max f_i)(x0) = conv(union of d f_i(x0) over active i) by exact
/// polyhedral comparison of extreme points.
inline SubdiffMaxReport subdiff_of_max_check(const std::vector<FunctionTable>& fs,
                                             const Element& x0,
                                             const std::vector<Element>& probes) {
    if (fs.empty()) throw std::invalid_argument("subdiff_of_max_check: no functions");
    auto mx = pointwise_max(fs);
    SubdiffMaxReport rep;
    ExtScalar top = mx.eval(x0);
    for (std::size_t i = 0; i < fs.size(); ++i)
        if (fs[i].eval(x0) == top) rep.active.push_back(i);

    auto sub_max = subdifferential(mx, x0, probes);
    std::vector<QVec> union_vertices;
    for (auto i : rep.active)
        for (auto& v : subdifferential(fs[i], x0, probes).vertices())
            union_vertices.push_back(std::move(v));

    rep.inclusion_holds = true;
    for (const auto& v : union_vertices)
        if (!sub_max.contains(v)) rep.inclusion_holds = false;

    if (sub_max.dimension <= 2 && !union_vertices.empty()) {
        rep.equality_checked = true;
        rep.equality_holds = rep.inclusion_holds &&
                             detail::extreme_points(union_vertices) ==
                                 detail::extreme_points(sub_max.vertices());
    }
    return rep;
}

}  // namespace convgrp
