#pragma once

#include "convgrp/functions.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace convgrp {

// ---------------------------------------------------------------------------
// Dual descriptions and additive witnesses.
// ---------------------------------------------------------------------------

struct UnsupportedDual : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DualSpaceDescriptor {
    InstancePtr instance;
    DualRep rep = DualRep::TriviallyZero;
    int dimension = 0;  ///< valid for CoefficientVector duals
};

inline DualSpaceDescriptor dual_space(const InstancePtr& S) {
    DualRep rep = S->dual_rep();
    if (rep == DualRep::Unsupported)
        throw UnsupportedDual("dual_space: no dual representation for " + S->name());
    DualSpaceDescriptor d{S, rep, 0};
    if (rep == DualRep::CoefficientVector) d.dimension = S->dual_dimension();
    return d;
}

/// An additive real-valued map, represented by exact coefficients over the
/// instance's coordinates (empty coefficients == the zero map).
struct AdditiveWitness {
    InstancePtr instance;
    QVec coeffs;

    Rational operator()(const Element& x) const {
        if (coeffs.empty()) return Rational(0);
        auto c = instance->coordinates(x);
        if (!c) throw std::invalid_argument("AdditiveWitness: element has no coordinates");
        QVec q(c->begin(), c->end());
        return dot(coeffs, q);
    }
};

/// Spot-check: w(x+y) = w(x) + w(y) over all window pairs.
inline bool additive_on_window(const AdditiveWitness& w, const Window& window) {
    const auto& S = *w.instance;
    auto xs = S.enumerate(window);
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = i; j < xs.size(); ++j)
            if (w(S.add(xs[i], xs[j])) != w(xs[i]) + w(xs[j])) return false;
    return true;
}

/// An affine map extended with +inf/-inf regions; finite elsewhere.
struct GeneralizedAffineWitness {
    AdditiveWitness finite_part;
    Rational offset{0};
    std::function<bool(const Element&)> plus_region;   ///< value is +inf here
    std::function<bool(const Element&)> minus_region;  ///< value is -inf here

    ExtScalar value(const Element& x) const {
        if (plus_region && plus_region(x)) return ExtScalar::plus_inf();
        if (minus_region && minus_region(x)) return ExtScalar::minus_inf();
        return ExtScalar(finite_part(x) + offset);
    }
};

// ---------------------------------------------------------------------------
// Directional derivatives.
// ---------------------------------------------------------------------------

struct CorePrereqFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DirectionalSample {
    long long n = 1;
    Element g;
    ExtScalar value;  ///< n * (f(x+g) - f(x)), minimised over the g resolving n*g = h
};

struct DirectionalDerivativeReport {
    Element x, h;
    std::vector<DirectionalSample> samples;
    ExtScalar infimum = ExtScalar::plus_inf();
    bool stabilized = false;  ///< the last 3 samples agree
};

/// Samples n*(f(x+g) - f(x)) over n*g = h for each n in the schedule and
/// returns the minimum. With `sublinear_form` the equivalent expression
/// f(n*x + h) - n*f(x) is used instead, which needs no division.
inline DirectionalDerivativeReport directional_derivative(const FunctionTable& f, const Element& x,
                                                          const Element& h,
                                                          const std::vector<long long>& n_schedule,
                                                          bool sublinear_form = false) {
    const auto& S = *f.instance();
    ExtScalar fx = f.eval(x);
    if (!fx.is_finite())
        throw CorePrereqFailed("directional_derivative: f(x) is not finite at " + x.str());
    DirectionalDerivativeReport rep{x, h, {}, ExtScalar::plus_inf(), false};
    for (long long n : n_schedule) {
        if (n <= 0) throw std::invalid_argument("directional_derivative: schedule entries >= 1");
        if (sublinear_form) {
            Element nxh = S.add(nth_multiple(x, n, S), h);
            if (!f.in_window(nxh)) continue;
            ExtScalar v = f.eval(nxh);
            if (!v.is_finite()) continue;
            rep.samples.push_back({n, nxh, v + (Rational(n) * (-fx))});
        } else {
            std::optional<DirectionalSample> best;
            for (const auto& g : S.divide(h, n)) {
                Element xg = S.add(x, g);
                if (!f.in_window(xg)) continue;
                ExtScalar v = f.eval(xg);
                if (!v.is_finite()) continue;
                ExtScalar val = Rational(n) * (v + (-fx));
                if (!best || val < best->value) best = DirectionalSample{n, g, val};
            }
            if (best) rep.samples.push_back(*best);
        }
    }
    if (rep.samples.empty())
        throw CorePrereqFailed("directional_derivative: no (n, g) resolved within the schedule");
    for (const auto& s : rep.samples) rep.infimum = ext_min(rep.infimum, s.value);
    const std::size_t k = rep.samples.size();
    rep.stabilized = k >= 3 && rep.samples[k - 1].value == rep.samples[k - 2].value &&
                     rep.samples[k - 2].value == rep.samples[k - 3].value;
    return rep;
}

struct DerivativeLawsReport {
    bool hypotheses_hold = false;  ///< f subadditive with f(p*x) = p*f(x) on the window
    bool minorant_holds = false;   ///< f_x(h) <= f(h) on every probe
    bool antisymmetric_sum = false;  ///< f_x(x) + f_x(-x) <= 0
    bool holds = false;
};

/// Verifies f_x <= f on the probes and f_x(x) + f_x(-x) <= 0, using only
/// stabilized derivative reports; p is the instance's divisibility prime.
inline DerivativeLawsReport derivative_laws_check(const FunctionTable& f, const Element& x,
                                                  const std::vector<Element>& probes, long long p,
                                                  const std::vector<long long>& n_schedule) {
    const auto& S = *f.instance();
    DerivativeLawsReport rep;
    rep.hypotheses_hold = check_subadditive(f).holds;
    for (const auto& [y, v] : f.values()) {
        Element py = nth_multiple(y, p, S);
        if (!f.in_window(py)) continue;
        if (f.eval(py) != Rational(p) * v) rep.hypotheses_hold = false;
    }
    if (!rep.hypotheses_hold) return rep;

    auto stabilized_inf = [&](const Element& h) {
        auto r = directional_derivative(f, x, h, n_schedule);
        if (!r.stabilized)
            throw CorePrereqFailed("derivative_laws_check: report did not stabilize");
        return r.infimum;
    };
    rep.minorant_holds = true;
    for (const auto& h : probes)
        if (!(stabilized_inf(h) <= f.eval(h))) rep.minorant_holds = false;
    rep.antisymmetric_sum = stabilized_inf(x) + stabilized_inf(S.negate(x)) <= ExtScalar(Rational(0));
    rep.holds = rep.minorant_holds && rep.antisymmetric_sum;
    return rep;
}

// ---------------------------------------------------------------------------
// Subdifferentials.
// ---------------------------------------------------------------------------

struct EmptyProbeSet : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Exact H-polyhedron over dual coefficients: one constraint
/// a . coords(h) <= f(x0+h) - f(x0) per probe with a finite right side.
struct SubdifferentialRep {
    Element x0;
    std::vector<std::pair<Element, Rational>> constraints;  ///< (h, f(x0+h) - f(x0))
    QMat a;
    QVec b;
    int dimension = 0;

    bool contains(const QVec& phi) const {
        for (std::size_t i = 0; i < a.size(); ++i)
            if (dot(a[i], phi) > b[i]) return false;
        return true;
    }

    /// Vertex enumeration; intended for dimension <= 3.
    std::vector<QVec> vertices() const { return polyhedron_vertices(a, b); }
};

inline SubdifferentialRep subdifferential(const FunctionTable& f, const Element& x0,
                                          const std::vector<Element>& probes) {
    if (probes.empty()) throw EmptyProbeSet("subdifferential: no probes supplied");
    const auto& S = *f.instance();
    if (S.dual_rep() != DualRep::CoefficientVector)
        throw UnsupportedDual("subdifferential: instance dual has no coefficient form");
    ExtScalar fx0 = f.eval(x0);
    if (!fx0.is_finite())
        throw std::invalid_argument("subdifferential: f(x0) is not finite");
    SubdifferentialRep rep;
    rep.x0 = x0;
    rep.dimension = S.dual_dimension();
    for (const auto& h : probes) {
        ExtScalar fy = f.eval(S.add(x0, h));
        if (!fy.is_finite()) continue;  // vacuous constraint
        Rational rhs = fy.value() - fx0.value();
        auto c = S.coordinates(h);
        if (!c) throw std::invalid_argument("subdifferential: probe has no coordinates");
        rep.constraints.emplace_back(h, rhs);
        rep.a.emplace_back(c->begin(), c->end());
        rep.b.push_back(rhs);
    }
    return rep;
}

struct NotStabilized : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct HypothesisFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MaxFormulaReport {
    ExtScalar derivative;  ///< f_{x0}(h), stabilized
    ExtScalar best_dual;   ///< max a.h over the subdifferential polyhedron
    bool nonempty = false;
    bool holds = false;
};

/// Checks f_{x0}(h) = max { a(h) : a in the subdifferential at x0 }, both
/// sides exact: a stabilized derivative report against a simplex maximum.
inline MaxFormulaReport max_formula_check(const FunctionTable& f, const Element& x0,
                                          const Element& h, const std::vector<Element>& probes,
                                          const std::vector<long long>& n_schedule) {
    const auto& S = *f.instance();
    auto rx = directional_derivative(f, x0, x0, n_schedule);
    auto rnx = directional_derivative(f, x0, S.negate(x0), n_schedule);
    if (!(rx.infimum + rnx.infimum <= ExtScalar(Rational(0))))
        throw HypothesisFailed("max_formula_check: f_x(x) + f_x(-x) > 0");
    auto rep = directional_derivative(f, x0, h, n_schedule);
    if (!rep.stabilized) throw NotStabilized("max_formula_check: derivative did not stabilize");

    auto sub = subdifferential(f, x0, probes);
    auto c = S.coordinates(h);
    if (!c) throw std::invalid_argument("max_formula_check: direction has no coordinates");
    auto lp = lp_maximize(sub.a, sub.b, QVec(c->begin(), c->end()));
    MaxFormulaReport out;
    out.derivative = rep.infimum;
    out.nonempty = lp.status != LpStatus::Infeasible;
    if (lp.status == LpStatus::Optimal) out.best_dual = ExtScalar(lp.value);
    else if (lp.status == LpStatus::Unbounded) out.best_dual = ExtScalar::plus_inf();
    else out.best_dual = ExtScalar::minus_inf();
    out.holds = out.nonempty && out.best_dual == out.derivative;
    return out;
}

// ---------------------------------------------------------------------------
// Conjugates and Fenchel duality.
// ---------------------------------------------------------------------------

/// Window-relative conjugate: sup over the window of phi(x) - f(x).
inline ExtScalar conjugate(const FunctionTable& f, const AdditiveWitness& phi) {
    ExtScalar sup = ExtScalar::minus_inf();
    for (const auto& [x, v] : f.values()) sup = ext_max(sup, ExtScalar(phi(x)) + (-v));
    return sup;
}

struct FenchelYoungReport {
    ExtScalar lhs;  ///< f(x) + f*(phi)
    Rational rhs;   ///< phi(x)
    bool inequality = false;
    bool equality = false;
    bool in_subdifferential = false;  ///< f(x) + phi(h) <= f(x+h) over window differences
    bool equivalence = false;         ///< equality <=> subdifferential membership
};

inline FenchelYoungReport fenchel_young_check(const FunctionTable& f, const AdditiveWitness& phi,
                                              const Element& x) {
    const auto& S = *f.instance();
    FenchelYoungReport rep;
    ExtScalar fx = f.eval(x);
    rep.lhs = fx + conjugate(f, phi);
    rep.rhs = phi(x);
    rep.inequality = rep.lhs >= ExtScalar(rep.rhs);
    rep.equality = rep.lhs == ExtScalar(rep.rhs);
    rep.in_subdifferential = fx.is_finite();
    if (fx.is_finite())
        for (const auto& [y, fy] : f.values()) {
            Element h = S.add(y, S.negate(x));
            if (!(ExtScalar(fx.value() + phi(h)) <= fy)) rep.in_subdifferential = false;
        }
    rep.equivalence = rep.equality == rep.in_subdifferential;
    return rep;
}

struct FenchelDualityReport {
    ExtScalar primal;  ///< P = min over the window of f(x) + g(Tx)
    ExtScalar dual;    ///< D = max over phi of -f*(T* phi) - g*(-phi)
    std::optional<AdditiveWitness> witness;
    bool weak_holds = false;    ///< P >= D
    bool core_probed = false;   ///< core condition verified on the supplied directions
    bool strong_holds = false;  ///< P == D, asserted only when core_probed
};

/// Exact Fenchel duality on windows. The dual problem is one LP: maximize
/// s + t over (phi, s, t) with s <= f(x) - phi(Tx) and t <= g(u) + phi(u)
/// for every finite table row; its optimum is the exact window-relative D.
inline FenchelDualityReport fenchel_duality(const FunctionTable& f, const FunctionTable& g,
                                            const AdditiveMap& T,
                                            const std::vector<Element>& core_probes = {},
                                            long long core_divide_cap = 4) {
    const auto& S1 = *f.instance();
    const auto& S2 = *g.instance();
    // spot-check additivity of T on the source window
    {
        auto xs = S1.enumerate(f.window());
        for (std::size_t i = 0; i < xs.size(); ++i)
            for (std::size_t j = i; j < xs.size(); ++j)
                if (!S2.equal(T.apply(S1.add(xs[i], xs[j])),
                              S2.add(T.apply(xs[i]), T.apply(xs[j]))))
                    throw NotAdditive("fenchel_duality: map " + T.name + " is not additive");
    }
    FenchelDualityReport rep;
    rep.primal = ExtScalar::plus_inf();
    for (const auto& [x, fx] : f.values()) rep.primal = ext_min(rep.primal, fx + g.eval(T.apply(x)));

    if (S2.dual_rep() == DualRep::TriviallyZero) {
        // phi = 0 is the whole dual: D = inf f + inf g
        ExtScalar inf_f = ExtScalar::plus_inf(), inf_g = ExtScalar::plus_inf();
        for (const auto& [x, v] : f.values()) inf_f = ext_min(inf_f, v);
        for (const auto& [u, v] : g.values()) inf_g = ext_min(inf_g, v);
        rep.dual = inf_f + inf_g;
        rep.witness = AdditiveWitness{g.instance(), {}};
    } else if (S2.dual_rep() == DualRep::CoefficientVector) {
        const std::size_t d2 = static_cast<std::size_t>(S2.dual_dimension());
        QMat rows;
        QVec rhs;
        bool f_finite = false, g_finite = false, minus_inf = false;
        for (const auto& [x, fx] : f.values()) {
            if (fx.is_minus_inf()) minus_inf = true;
            if (!fx.is_finite()) continue;
            f_finite = true;
            auto c = S2.coordinates(T.apply(x));
            QVec row(d2 + 2, Rational(0));
            for (std::size_t j = 0; j < d2; ++j) row[j] = (*c)[j];
            row[d2] = 1;  // s + phi.Tx <= f(x)
            rows.push_back(std::move(row));
            rhs.push_back(fx.value());
        }
        for (const auto& [u, gu] : g.values()) {
            if (gu.is_minus_inf()) minus_inf = true;
            if (!gu.is_finite()) continue;
            g_finite = true;
            auto c = S2.coordinates(u);
            QVec row(d2 + 2, Rational(0));
            for (std::size_t j = 0; j < d2; ++j) row[j] = -(*c)[j];
            row[d2 + 1] = 1;  // t
            rows.push_back(std::move(row));
            rhs.push_back(gu.value());
        }
        if (minus_inf) {
            rep.dual = ExtScalar::minus_inf();
        } else if (!f_finite || !g_finite) {
            rep.dual = rep.primal;  // both problems are vacuously +inf
        } else {
            QVec obj(d2 + 2, Rational(0));
            obj[d2] = 1;
            obj[d2 + 1] = 1;
            auto lp = lp_maximize(rows, rhs, obj);
            if (lp.status == LpStatus::Optimal) {
                rep.dual = ExtScalar(lp.value);
                rep.witness = AdditiveWitness{g.instance(), QVec(lp.x.begin(), lp.x.begin() + d2)};
            } else if (lp.status == LpStatus::Unbounded) {
                rep.dual = ExtScalar::plus_inf();
            } else {
                rep.dual = ExtScalar::minus_inf();
            }
        }
    } else {
        throw UnsupportedDual("fenchel_duality: dual of " + S2.name() + " is unsupported");
    }

    rep.weak_holds = rep.primal >= rep.dual;
    if (!core_probes.empty()) {
        // 0 in core(dom(g) - T dom(f)), probed on the supplied directions:
        // each h must be n*w for some w = u - T x with u in dom(g), x in dom(f).
        std::vector<Element> diffs;
        for (const auto& [u, gu] : g.values()) {
            if (!gu.is_finite()) continue;
            for (const auto& [x, fx] : f.values()) {
                if (!fx.is_finite()) continue;
                diffs.push_back(S2.add(u, S2.negate(T.apply(x))));
            }
        }
        rep.core_probed = true;
        for (const auto& h : core_probes) {
            bool ok = false;
            for (long long n = 1; n <= core_divide_cap && !ok; ++n)
                for (const auto& w : S2.divide(h, n))
                    if (list_contains(diffs, S2, w)) { ok = true; break; }
            if (!ok) rep.core_probed = false;
        }
    }
    rep.strong_holds = rep.core_probed && rep.primal == rep.dual;
    return rep;
}

// ---------------------------------------------------------------------------
// Sandwich, Kaufman and Hahn-Banach witnesses.
// ---------------------------------------------------------------------------

struct SeparationPreconditionFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SandwichWitness {
    AdditiveWitness a;
    Rational offset{0};
};

/// Infeasibility certificate: two derived one-variable rows bounding the
/// offset from above and below with contradictory values, each a nonnegative
/// combination (stored in provenance) of the original constraints.
struct SandwichInfeasibility {
    FMRow upper;  ///< c <= upper_bound
    FMRow lower;  ///< -c <= -lower_bound
    Rational upper_bound, lower_bound;
};

struct SandwichResult {
    std::optional<SandwichWitness> witness;
    std::optional<SandwichInfeasibility> infeasible;
};

/// Searches an affine a(x) = coeffs . x + c with g(Tx) <= a(x) <= f(x) on the
/// whole window, by Fourier-Motzkin elimination of the coefficients; derived
/// bounds on c certify infeasibility with full provenance.
inline SandwichResult sandwich_witness(const FunctionTable& f, const FunctionTable& g,
                                       const AdditiveMap& T) {
    const auto& S1 = *f.instance();
    const auto& S2 = *g.instance();
    if (S1.dual_rep() != DualRep::CoefficientVector)
        throw UnsupportedDual("sandwich_witness: source dual has no coefficient form");
    const std::size_t d = static_cast<std::size_t>(S1.dual_dimension());

    QMat rows;
    QVec rhs;
    for (const auto& [x, fx] : f.values()) {
        ExtScalar gv = g.eval(T.apply(x));
        if (!(gv <= fx))
            throw SeparationPreconditionFailed("sandwich_witness: g(Tx) > f(x) at " + x.str());
        auto c = S1.coordinates(x);
        if (fx.is_finite()) {  // coeffs.x + c <= f(x)
            QVec row(c->begin(), c->end());
            row.push_back(Rational(1));
            rows.push_back(std::move(row));
            rhs.push_back(fx.value());
        }
        if (gv.is_finite()) {  // -(coeffs.x) - c <= -g(Tx)
            QVec row;
            for (const auto& ci : *c) row.push_back(-ci);
            row.push_back(Rational(-1));
            rows.push_back(std::move(row));
            rhs.push_back(-gv.value());
        }
    }

    auto fm = fm_initial(rows, rhs);
    for (std::size_t j = 0; j < d; ++j) fm = fm_eliminate_var(fm, j);

    std::optional<FMRow> best_upper, best_lower;
    Rational hi, lo;
    for (const auto& r : fm) {
        const Rational& k = r.coeffs[d];
        if (k > 0) {
            Rational bound = r.rhs / k;
            if (!best_upper || bound < hi) { best_upper = r; hi = bound; }
        } else if (k < 0) {
            Rational bound = r.rhs / k;
            if (!best_lower || bound > lo) { best_lower = r; lo = bound; }
        }
        // k == 0 rows are 0 <= rhs consistency facts; rhs >= 0 is guaranteed
        // by the verified precondition g(Tx) <= f(x)
    }
    SandwichResult res;
    if (best_upper && best_lower && lo > hi) {
        res.infeasible = SandwichInfeasibility{*best_upper, *best_lower, hi, lo};
        return res;
    }
    Rational c = best_upper ? hi : (best_lower ? lo : Rational(0));
    // back-substitute: fix c and find coefficients by exact feasibility
    QMat sub;
    QVec sub_rhs;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        QVec row(rows[i].begin(), rows[i].begin() + d);
        sub.push_back(std::move(row));
        sub_rhs.push_back(rhs[i] - rows[i][d] * c);
    }
    auto lp = lp_feasible(sub, sub_rhs);
    if (lp.status != LpStatus::Optimal)
        throw std::logic_error("sandwich_witness: elimination and feasibility disagree");
    res.witness = SandwichWitness{AdditiveWitness{f.instance(), lp.x}, c};
    return res;
}

struct InterpolationResult {
    std::optional<AdditiveWitness> witness;
    bool infeasible_within_window = false;
    QVec farkas;  ///< certificate when infeasible (over the constraint rows)
};

/// Additive a with g <= a <= f on the window; infeasibility within the window
/// does not contradict the underlying existence statement, which quantifies
/// over the whole carrier.
inline InterpolationResult kaufman_witness(const FunctionTable& f, const FunctionTable& g) {
    if (!check_subadditive(f).holds || !check_subadditive(g.negated()).holds)
        throw SeparationPreconditionFailed("kaufman_witness: subadditivity hypothesis fails");
    const auto& S = *f.instance();
    if (S.dual_rep() != DualRep::CoefficientVector)
        throw UnsupportedDual("kaufman_witness: dual has no coefficient form");
    QMat rows;
    QVec rhs;
    for (const auto& [x, fx] : f.values()) {
        ExtScalar gx = g.eval(x);
        if (!(gx <= fx))
            throw SeparationPreconditionFailed("kaufman_witness: g > f at " + x.str());
        auto c = S.coordinates(x);
        if (fx.is_finite()) {
            rows.emplace_back(c->begin(), c->end());
            rhs.push_back(fx.value());
        }
        if (gx.is_finite()) {
            QVec row;
            for (const auto& ci : *c) row.push_back(-ci);
            rows.push_back(std::move(row));
            rhs.push_back(-gx.value());
        }
    }
    auto lp = lp_feasible(rows, rhs);
    InterpolationResult res;
    if (lp.status == LpStatus::Optimal) {
        res.witness = AdditiveWitness{f.instance(), lp.x};
    } else {
        res.infeasible_within_window = true;
        res.farkas = lp.farkas;
    }
    return res;
}

/// Extends additive values given on subgroup generators to an additive map
/// below an N-sublinear f, by exact feasibility over the window constraints.
inline InterpolationResult hahn_banach_extend(
    const FunctionTable& f, const std::vector<std::pair<Element, Rational>>& gens) {
    const auto& S = *f.instance();
    if (S.dual_rep() != DualRep::CoefficientVector)
        throw UnsupportedDual("hahn_banach_extend: dual has no coefficient form");
    if (!check_n_sublinear(f, 3).holds)
        throw SeparationPreconditionFailed("hahn_banach_extend: f is not N-sublinear in bounds");

    // saturate the subgroup within the window, carrying induced values
    std::vector<std::pair<Element, Rational>> sub{{S.zero(), Rational(0)}};
    auto find = [&](const Element& x) -> const Rational* {
        for (const auto& [e, v] : sub)
            if (S.equal(e, x)) return &v;
        return nullptr;
    };
    bool grew = true;
    auto insert = [&](const Element& x, const Rational& v) {
        if (!f.in_window(x)) return;
        if (const Rational* old = find(x)) {
            if (*old != v)
                throw SeparationPreconditionFailed(
                    "hahn_banach_extend: generator values are not additive");
            return;
        }
        sub.emplace_back(x, v);
        grew = true;
    };
    for (const auto& [x, v] : gens) {
        insert(x, v);
        insert(S.negate(x), -v);
    }
    while (grew) {
        grew = false;
        auto snapshot = sub;
        for (const auto& [x, vx] : snapshot)
            for (const auto& [y, vy] : snapshot) insert(S.add(x, y), vx + vy);
    }
    for (const auto& [x, v] : sub)
        if (!(ExtScalar(v) <= f.eval(x)))
            throw SeparationPreconditionFailed("hahn_banach_extend: h > f on the subgroup at " +
                                               x.str());

    QMat rows;
    QVec rhs;
    for (const auto& [x, v] : sub) {  // a . x = v, both directions
        auto c = S.coordinates(x);
        rows.emplace_back(c->begin(), c->end());
        rhs.push_back(v);
        QVec row;
        for (const auto& ci : *c) row.push_back(-ci);
        rows.push_back(std::move(row));
        rhs.push_back(-v);
    }
    for (const auto& [x, fx] : f.values()) {
        if (!fx.is_finite()) continue;
        auto c = S.coordinates(x);
        rows.emplace_back(c->begin(), c->end());
        rhs.push_back(fx.value());
    }
    auto lp = lp_feasible(rows, rhs);
    InterpolationResult res;
    if (lp.status == LpStatus::Optimal) {
        res.witness = AdditiveWitness{f.instance(), lp.x};
    } else {
        res.infeasible_within_window = true;
        res.farkas = lp.farkas;
    }
    return res;
}

// ---------------------------------------------------------------------------
// One interpolation refinement step.
// ---------------------------------------------------------------------------

enum class RefineSide { Lower, Upper };

struct BoundsExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

/// Enumerates multisets of `count` window elements (with repetition) whose
/// n-fold sum equals `target`; calls fn with the sum of g-values when every
/// value along the way is finite.
template <class F>
inline void for_each_multiset_sum(const std::vector<Element>& window, const StructureDescriptor& S,
                                  const FunctionTable& g, long long count, const Element& target,
                                  F&& fn) {
    std::function<void(std::size_t, long long, const Element&, const Rational&)> rec =
        [&](std::size_t start, long long left, const Element& acc, const Rational& cost) {
            if (left == 0) {
                if (S.equal(acc, target)) fn(cost);
                return;
            }
            for (std::size_t i = start; i < window.size(); ++i) {
                ExtScalar v = g.eval(window[i]);
                if (!v.is_finite()) continue;
                rec(i, left - 1, S.add(acc, window[i]), cost + v.value());
            }
        };
    rec(0, count, S.zero(), Rational(0));
}

}  // namespace detail

/// One refinement step of the interpolation construction: an improved concave
/// minorant (lower side) or convex majorant (upper side) through level r at
/// x0, by bounded enumeration of the defining relations. Verifies
/// g <= h <= f and the level condition at x0 before returning.
inline FunctionTable interpolation_refine_step(const FunctionTable& f, const FunctionTable& g,
                                               const Element& x0, const Rational& r,
                                               RefineSide side, const SearchBounds& bounds) {
    const auto& S = *f.instance();
    const auto window = S.enumerate(f.window());
    bool equal_tables = true;
    for (const auto& x : window) equal_tables = equal_tables && f.eval(x) == g.eval(x);
    if (equal_tables) return f;  // nothing to refine

    if (!(g.eval(x0) < ExtScalar(r) && ExtScalar(r) < f.eval(x0)))
        throw std::invalid_argument("interpolation_refine_step: need g(x0) < r < f(x0)");

    std::vector<std::pair<Element, ExtScalar>> vals;
    if (side == RefineSide::Lower) {
        for (const auto& x : window) {
            ExtScalar best = g.eval(x);
            for (long long k = 1; k <= bounds.max_coeff; ++k) {
                Element kx = nth_multiple(x, k, S);
                for (long long k0 = 0; k0 <= k; ++k0) {
                    Element target = S.add(kx, S.negate(nth_multiple(x0, k0, S)));
                    detail::for_each_multiset_sum(
                        window, S, g, k - k0, target, [&](const Rational& cost) {
                            best = ext_max(best, ExtScalar((Rational(k0) * r + cost) / k));
                        });
                }
            }
            vals.emplace_back(x, best);
        }
    } else {
        for (const auto& x : window) {
            ExtScalar best = f.eval(x);
            for (long long k = 1; k <= bounds.max_coeff; ++k) {
                Element kx = nth_multiple(x, k, S);
                for (long long k0 = 0; k0 <= k; ++k0) {
                    Element base = nth_multiple(x0, k0, S);
                    if (k0 == k) {
                        if (S.equal(kx, base)) best = ext_min(best, ExtScalar(r));
                        continue;
                    }
                    for (const auto& y : window) {
                        ExtScalar fy = f.eval(y);
                        if (!fy.is_finite()) continue;
                        if (!S.equal(kx, S.add(base, nth_multiple(y, k - k0, S)))) continue;
                        best = ext_min(best,
                                       ExtScalar((Rational(k0) * r +
                                                  Rational(k - k0) * fy.value()) /
                                                 k));
                    }
                }
            }
            vals.emplace_back(x, best);
        }
    }
    FunctionTable h(f.instance(), f.window(), std::move(vals), f.outside_policy());
    for (const auto& x : window)
        if (!(g.eval(x) <= h.eval(x) && h.eval(x) <= f.eval(x)))
            throw BoundsExhausted("interpolation_refine_step: refinement left the sandwich at " +
                                  x.str());
    if (side == RefineSide::Lower && !(h.eval(x0) >= ExtScalar(r)))
        throw BoundsExhausted("interpolation_refine_step: no relation raised h(x0) to r");
    if (side == RefineSide::Upper && !(h.eval(x0) <= ExtScalar(r)))
        throw BoundsExhausted("interpolation_refine_step: no relation lowered h(x0) to r");
    return h;
}

// ---------------------------------------------------------------------------
// Partitioning and the sum rule.
// ---------------------------------------------------------------------------

struct NotSeparating : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PartitionResult {
    std::vector<Element> c;  ///< { value < 0 }
    std::vector<Element> d;  ///< { value >= 0 }
};

/// Splits the window along the sign of a generalized affine witness that
/// separates A from B; C and D are disjoint and cover the window by
/// construction.
inline PartitionResult stone_partition(const GeneralizedAffineWitness& w,
                                       const std::vector<Element>& A,
                                       const std::vector<Element>& B, const InstancePtr& S,
                                       const Window& window) {
    auto sign = [&](const Element& x) { return w.value(x) < ExtScalar(Rational(0)); };
    bool a_all_neg = true, a_all_nonneg = true;
    for (const auto& x : A) (sign(x) ? a_all_nonneg : a_all_neg) = false;
    bool b_all_neg = true, b_all_nonneg = true;
    for (const auto& x : B) (sign(x) ? b_all_nonneg : b_all_neg) = false;
    bool separated = (a_all_neg && b_all_nonneg) || (a_all_nonneg && b_all_neg);
    if (!separated) throw NotSeparating("stone_partition: witness does not sign A and B apart");
    PartitionResult res;
    for (const auto& x : S->enumerate(window)) (sign(x) ? res.c : res.d).push_back(x);
    return res;
}

namespace detail {

/// Extreme points of a finite rational point set (points not in the convex
/// hull of the others), by one feasibility LP per point.
inline std::vector<QVec> extreme_points(const std::vector<QVec>& pts) {
    std::vector<QVec> out;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        std::vector<QVec> others;
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (pts[i] != pts[k]) others.push_back(pts[i]);
        bool inside = false;
        if (!others.empty()) {
            const std::size_t n = others.size(), dim = pts[k].size();
            QMat rows;
            QVec rhs;
            for (std::size_t j = 0; j < dim; ++j) {
                QVec row(n), neg(n);
                for (std::size_t i = 0; i < n; ++i) { row[i] = others[i][j]; neg[i] = -others[i][j]; }
                rows.push_back(row);
                rhs.push_back(pts[k][j]);
                rows.push_back(neg);
                rhs.push_back(-pts[k][j]);
            }
            QVec ones(n, Rational(1)), negs(n, Rational(-1));
            rows.push_back(ones);
            rhs.push_back(Rational(1));
            rows.push_back(negs);
            rhs.push_back(Rational(-1));
            for (std::size_t i = 0; i < n; ++i) {
                QVec row(n, Rational(0));
                row[i] = -1;
                rows.push_back(row);
                rhs.push_back(Rational(0));
            }
            inside = lp_feasible(rows, rhs).status == LpStatus::Optimal;
        }
        if (!inside) {
            bool dup = false;
            for (const auto& p : out) dup = dup || p == pts[k];
            if (!dup) out.push_back(pts[k]);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

struct SumRuleReport {
    bool inclusion_holds = false;   ///< vertex sums land inside the combined subdifferential
    bool equality_checked = false;  ///< vertex sets compared exactly (dimension <= 2)
    bool equality_holds = false;
};

/// Checks the subdifferential sum rule at x0: inclusion by pushing vertex
/// sums through the combined constraints, equality (dimension <= 2) by exact
/// vertex-set comparison. t_matrix is the coefficient form of T, mapping
/// source coordinates to target coordinates; it is spot-checked against
/// T.apply on the window.
inline SumRuleReport sum_rule_check(const FunctionTable& f, const FunctionTable& g,
                                    const AdditiveMap& T, const QMat& t_matrix, const Element& x0,
                                    const std::vector<Element>& probes) {
    const auto& S1 = *f.instance();
    const auto& S2 = *g.instance();
    for (const auto& x : S1.enumerate(f.window())) {
        auto cx = S1.coordinates(x);
        auto ct = S2.coordinates(T.apply(x));
        for (std::size_t j = 0; j < t_matrix.size(); ++j) {
            QVec q(cx->begin(), cx->end());
            if (dot(t_matrix[j], q) != (*ct)[j])
                throw NotAdditive("sum_rule_check: t_matrix disagrees with " + T.name);
        }
    }

    FunctionTable sum = FunctionTable::from(
        f.instance(), f.window(), [&](const Element& x) { return f.eval(x) + g.eval(T.apply(x)); },
        f.outside_policy());
    auto sf = subdifferential(f, x0, probes);
    std::vector<Element> tprobes;
    for (const auto& h : probes) tprobes.push_back(T.apply(h));
    auto sg = subdifferential(g, T.apply(x0), tprobes);
    auto ss = subdifferential(sum, x0, probes);

    const std::size_t d1 = static_cast<std::size_t>(S1.dual_dimension());
    auto adjoint = [&](const QVec& psi) {
        QVec out(d1, Rational(0));
        for (std::size_t j = 0; j < t_matrix.size(); ++j)
            for (std::size_t i = 0; i < d1; ++i) out[i] += psi[j] * t_matrix[j][i];
        return out;
    };

    SumRuleReport rep;
    rep.inclusion_holds = true;
    std::vector<QVec> sums;
    for (const auto& p : sf.vertices())
        for (const auto& q : sg.vertices()) {
            QVec phi = adjoint(q);
            for (std::size_t i = 0; i < d1; ++i) phi[i] += p[i];
            if (!ss.contains(phi)) rep.inclusion_holds = false;
            sums.push_back(std::move(phi));
        }
    if (d1 <= 2 && !sums.empty()) {
        rep.equality_checked = true;
        rep.equality_holds = detail::extreme_points(sums) == detail::extreme_points(ss.vertices());
    }
    return rep;
}

}  // namespace convgrp
