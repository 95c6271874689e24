#pragma once

#include "convgrp/hull.hpp"

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>

namespace convgrp {

enum class OutsidePolicy { PlusInfinity, Undefined };

/// An extended-real-valued function given by exact values on a window.
class FunctionTable {
public:
    FunctionTable() = default;
    FunctionTable(InstancePtr instance, Window window,
                  std::vector<std::pair<Element, ExtScalar>> values,
                  OutsidePolicy policy = OutsidePolicy::PlusInfinity)
        : instance_(std::move(instance)), window_(window), values_(std::move(values)),
          policy_(policy) {
        for (const auto& x : instance_->enumerate(window_))
            if (!lookup(x))
                throw std::invalid_argument("FunctionTable: window element without a value: " +
                                            x.str());
    }

    static FunctionTable from(InstancePtr instance, Window window,
                              const std::function<ExtScalar(const Element&)>& fn,
                              OutsidePolicy policy = OutsidePolicy::PlusInfinity) {
        std::vector<std::pair<Element, ExtScalar>> vals;
        for (const auto& x : instance->enumerate(window)) vals.emplace_back(x, fn(x));
        return FunctionTable(std::move(instance), window, std::move(vals), policy);
    }

    const InstancePtr& instance() const { return instance_; }
    const Window& window() const { return window_; }
    OutsidePolicy outside_policy() const { return policy_; }
    const std::vector<std::pair<Element, ExtScalar>>& values() const { return values_; }

    bool in_window(const Element& x) const { return lookup(x) != nullptr; }

    ExtScalar eval(const Element& x) const {
        if (const auto* v = lookup(x)) return *v;
        if (policy_ == OutsidePolicy::PlusInfinity) return ExtScalar::plus_inf();
        throw std::domain_error("FunctionTable: evaluated outside its window: " + x.str());
    }

    FunctionTable negated() const {
        auto vals = values_;
        for (auto& [x, v] : vals) v = -v;
        return FunctionTable(instance_, window_, std::move(vals), policy_);
    }

private:
    const ExtScalar* lookup(const Element& x) const {
        for (const auto& [e, v] : values_)
            if (instance_->equal(e, x)) return &v;
        return nullptr;
    }

    InstancePtr instance_;
    Window window_;
    std::vector<std::pair<Element, ExtScalar>> values_;
    OutsidePolicy policy_ = OutsidePolicy::PlusInfinity;
};

/// Certificate for a failed pairwise law: the pair plus both evaluated sides.
struct PairCert {
    Element x, y;
    ExtScalar lhs, rhs;
};

/// Certificate for a failed combination law: the combination, the residual,
/// and both evaluated sides.
struct CombinationCert {
    NCombination combination;
    Element residual;
    ExtScalar lhs, rhs;
};

struct ClassVerdict {
    bool holds = true;
    std::optional<CombinationCert> comb_cert;
    std::optional<PairCert> pair_cert;
    long long skipped_residuals = 0;
    SearchBounds bounds;
};

/// Bounded convexity check: m*f(x) <= sum m_i f(x_i) for every combination
/// over the window and every in-window residual x. With `p_power` set, the
/// left coefficient is restricted to powers of that prime.
inline ClassVerdict check_convex(const FunctionTable& f, const SearchBounds& bounds,
                                 std::optional<long long> p_power = std::nullopt) {
    ClassVerdict v;
    v.bounds = bounds;
    const auto& S = *f.instance();
    const auto window_elems = S.enumerate(f.window());
    detail::for_each_combination(
        window_elems, S, bounds, [&](const NCombination& comb, const Element& rhs_elem) {
            if (p_power) {
                long long m = comb.lhs_coeff;
                while (m % *p_power == 0) m /= *p_power;
                if (m != 1) return true;
            }
            ExtScalar rhs_val(Rational(0));
            for (const auto& [mi, xi] : comb.terms)
                rhs_val = rhs_val + Rational(mi) * f.eval(xi);
            for (const auto& x : S.divide(rhs_elem, comb.lhs_coeff)) {
                if (!f.in_window(x)) {
                    ++v.skipped_residuals;
                    continue;
                }
                ExtScalar lhs_val = Rational(comb.lhs_coeff) * f.eval(x);
                if (!(lhs_val <= rhs_val)) {
                    v.holds = false;
                    v.comb_cert = CombinationCert{comb, x, lhs_val, rhs_val};
                    return false;
                }
            }
            return true;
        });
    return v;
}

/// f(x+y) <= f(x) + f(y) over all in-window pairs with in-window sum.
inline ClassVerdict check_subadditive(const FunctionTable& f) {
    ClassVerdict v;
    const auto& S = *f.instance();
    const auto xs = S.enumerate(f.window());
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = i; j < xs.size(); ++j) {
            Element s = S.add(xs[i], xs[j]);
            if (!f.in_window(s)) continue;
            ExtScalar lhs = f.eval(s), rhs = f.eval(xs[i]) + f.eval(xs[j]);
            if (!(lhs <= rhs)) {
                v.holds = false;
                v.pair_cert = PairCert{xs[i], xs[j], lhs, rhs};
                return v;
            }
        }
    return v;
}

/// Subadditivity plus positive homogeneity f(m*x) = m*f(x), m <= m_max.
inline ClassVerdict check_n_sublinear(const FunctionTable& f, long long m_max) {
    ClassVerdict v = check_subadditive(f);
    if (!v.holds) return v;
    const auto& S = *f.instance();
    for (const auto& x : S.enumerate(f.window())) {
        for (long long m = 1; m <= m_max; ++m) {
            Element mx = nth_multiple(x, m, S);
            if (!f.in_window(mx)) continue;
            ExtScalar lhs = f.eval(mx), rhs = Rational(m) * f.eval(x);
            if (lhs != rhs) {
                v.holds = false;
                v.pair_cert = PairCert{x, mx, lhs, rhs};
                return v;
            }
        }
    }
    return v;
}

/// Both f and -f are N-sublinear (generalised N-linear maps).
inline ClassVerdict check_generalised_n_linear(const FunctionTable& f, long long m_max) {
    ClassVerdict v = check_n_sublinear(f, m_max);
    if (!v.holds) return v;
    return check_n_sublinear(f.negated(), m_max);
}

struct HomogeneityImplication {
    ClassVerdict subadditive;
    ClassVerdict p_homogeneous;   ///< f(p*x) = p*f(x) on the window
    ClassVerdict convex;          ///< run regardless, for the implication check
    bool hypotheses_hold = false;
    bool implication_holds = false;  ///< hypotheses -> convex (vacuous counts)
    std::optional<ClassVerdict> n_homogeneous;  ///< groups only: all m <= m_max
};

/// Subadditive + p-homogeneous implies convex (and N-sublinear on groups).
inline HomogeneityImplication check_p_homogeneous_implies_convex(const FunctionTable& f,
                                                                 long long p,
                                                                 const SearchBounds& bounds,
                                                                 long long m_max = 6) {
    HomogeneityImplication out;
    out.subadditive = check_subadditive(f);
    const auto& S = *f.instance();
    for (const auto& x : S.enumerate(f.window())) {
        Element px = nth_multiple(x, p, S);
        if (!f.in_window(px)) continue;
        ExtScalar lhs = f.eval(px), rhs = Rational(p) * f.eval(x);
        if (lhs != rhs) {
            out.p_homogeneous.holds = false;
            out.p_homogeneous.pair_cert = PairCert{x, px, lhs, rhs};
            break;
        }
    }
    out.convex = check_convex(f, bounds);
    out.hypotheses_hold = out.subadditive.holds && out.p_homogeneous.holds;
    out.implication_holds = !out.hypotheses_hold || out.convex.holds;
    if (out.hypotheses_hold && S.is_group())
        out.n_homogeneous = check_n_sublinear(f, m_max);
    return out;
}

/// Value-wise maximum of tables sharing an instance and window.
inline FunctionTable pointwise_max(const std::vector<FunctionTable>& fs) {
    if (fs.empty()) throw std::invalid_argument("pointwise_max: no tables");
    const auto& S = *fs[0].instance();
    for (const auto& f : fs) {
        if (f.instance()->name() != fs[0].instance()->name())
            throw std::invalid_argument("pointwise_max: instance mismatch");
        for (const auto& x : S.enumerate(fs[0].window()))
            if (!f.in_window(x)) throw std::invalid_argument("pointwise_max: window mismatch");
    }
    return FunctionTable::from(fs[0].instance(), fs[0].window(), [&](const Element& x) {
        ExtScalar m = fs[0].eval(x);
        for (std::size_t i = 1; i < fs.size(); ++i) m = ext_max(m, fs[i].eval(x));
        return m;
    });
}

// ---------------------------------------------------------------------------

/// Largest subadditive minorant p of f: inf over decompositions x = sum x_i
/// (parts in the window) of sum f(x_i). Computed by relaxation over the
/// extended domain of short window sums; unbounded descent yields -inf.
inline FunctionTable subadditive_minorant_p(const FunctionTable& f, int max_parts = 6) {
    const auto& S = *f.instance();
    const auto W = S.enumerate(f.window());

    // Extended domain: all sums of at most max_parts window elements. Any
    // decomposition of length <= max_parts has all its partial sums here, so
    // binary-split relaxation covers every such multiset.
    std::vector<Element> E = W;
    std::vector<Element> frontier = W;
    for (int round = 1; round < max_parts; ++round) {
        std::vector<Element> next;
        for (const auto& e : frontier)
            for (const auto& w : W) {
                Element s = S.add(e, w);
                if (!list_contains(E, S, s) && !list_contains(next, S, s)) next.push_back(s);
            }
        E.insert(E.end(), next.begin(), next.end());
        frontier = std::move(next);
        if (frontier.empty()) break;
    }

    std::vector<ExtScalar> p(E.size(), ExtScalar::plus_inf());
    for (std::size_t i = 0; i < E.size(); ++i)
        if (f.in_window(E[i])) p[i] = f.eval(E[i]);

    auto index_of = [&](const Element& x) -> long {
        for (std::size_t i = 0; i < E.size(); ++i)
            if (S.equal(E[i], x)) return static_cast<long>(i);
        return -1;
    };
    // sum index table to avoid re-searching
    std::vector<std::vector<long>> sum_idx(E.size(), std::vector<long>(E.size(), -1));
    for (std::size_t i = 0; i < E.size(); ++i)
        for (std::size_t j = i; j < E.size(); ++j)
            sum_idx[i][j] = index_of(S.add(E[i], E[j]));

    const std::size_t limit = E.size() + 2;
    bool changed = true;
    std::size_t rounds = 0;
    std::vector<bool> descending(E.size(), false);
    while (changed) {
        changed = false;
        ++rounds;
        for (std::size_t i = 0; i < E.size(); ++i)
            for (std::size_t j = i; j < E.size(); ++j) {
                long k = sum_idx[i][j];
                if (k < 0) continue;
                ExtScalar cand = p[i] + p[j];
                if (cand < p[k]) {
                    if (rounds > limit) {
                        descending[k] = true;
                        p[k] = ExtScalar::minus_inf();
                    } else {
                        p[k] = cand;
                    }
                    changed = true;
                }
            }
        if (rounds > limit + E.size()) break;  // -inf has fully propagated
    }

    std::vector<std::pair<Element, ExtScalar>> vals;
    for (const auto& x : W) {
        long i = index_of(x);
        vals.emplace_back(x, p[i]);
    }
    return FunctionTable(f.instance(), f.window(), std::move(vals), f.outside_policy());
}

/// Brute-force inf over decompositions of length <= max_parts; the oracle
/// the relaxation is validated against.
inline ExtScalar minorant_bruteforce(const FunctionTable& f, const Element& x, int max_parts) {
    const auto& S = *f.instance();
    const auto W = S.enumerate(f.window());
    ExtScalar best = ExtScalar::plus_inf();
    std::function<void(std::size_t, int, const Element&, const ExtScalar&)> rec =
        [&](std::size_t start, int parts, const Element& sum, const ExtScalar& cost) {
            if (parts > 0 && S.equal(sum, x)) best = ext_min(best, cost);
            if (parts == max_parts) return;
            for (std::size_t i = start; i < W.size(); ++i)
                rec(i, parts + 1, parts == 0 ? W[i] : S.add(sum, W[i]),
                    parts == 0 ? f.eval(W[i]) : cost + f.eval(W[i]));
        };
    rec(0, 0, S.zero(), ExtScalar(Rational(0)));
    return best;
}

struct MinorantResult {
    FunctionTable table;
    bool truncated = false;  ///< infimum taken over a bounded multiplier range
};

/// Homogenized minorant po(x) = inf_m p(m*x)/m. Exact via orbit periodicity
/// on finite instances (with the analytic limit 0 adjoined when the orbit
/// stays positive); bounded elsewhere and tagged truncated.
inline MinorantResult homogenized_minorant_po(const FunctionTable& p, long long m_max = 8) {
    const auto& S = *p.instance();
    const bool finite = S.finite_carrier() && S.exponent().has_value();
    const long long horizon = finite ? *S.exponent() : m_max;

    auto table = FunctionTable::from(p.instance(), p.window(), [&](const Element& x) {
        ExtScalar best = ExtScalar::plus_inf();
        bool saw_finite = false;
        bool all_positive = true;
        for (long long m = 1; m <= horizon; ++m) {
            Element mx = nth_multiple(x, m, S);
            if (!p.in_window(mx)) continue;
            ExtScalar v = p.eval(mx);
            if (v.is_plus_inf()) continue;
            if (v.is_minus_inf()) return ExtScalar::minus_inf();
            saw_finite = true;
            Rational scaled = v.value() / m;
            if (scaled <= 0) all_positive = false;
            best = ext_min(best, ExtScalar(scaled));
        }
        if (!saw_finite) return ExtScalar::plus_inf();
        // On a finite carrier the orbit repeats with period dividing the
        // exponent: positive orbit values give p(mx)/m -> 0+, so the true
        // infimum is 0 (not attained).
        if (finite && all_positive) return ExtScalar(Rational(0));
        return best;
    }, p.outside_policy());
    return MinorantResult{std::move(table), !finite};
}

/// Bounded wedge minorant: inf over relations n1*x1 + n2*x2 = n*x of
/// (n1*f(x1) + n2*g(x2)) / n with n = n1 + n2 <= n_cap.
inline FunctionTable wedge_minorant(const FunctionTable& f, const FunctionTable& g,
                                    long long n_cap) {
    if (f.instance()->name() != g.instance()->name())
        throw std::invalid_argument("wedge_minorant: instance mismatch");
    const auto& S = *f.instance();
    const auto W = S.enumerate(f.window());

    std::vector<std::pair<Element, ExtScalar>> vals;
    for (const auto& x : W) vals.emplace_back(x, ExtScalar::plus_inf());
    auto update = [&](const Element& target, const ExtScalar& cand) {
        for (auto& [e, v] : vals)
            if (S.equal(e, target)) v = ext_min(v, cand);
    };

    for (long long n1 = 0; n1 <= n_cap; ++n1)
        for (long long n2 = 0; n1 + n2 <= n_cap; ++n2) {
            const long long n = n1 + n2;
            if (n == 0) continue;
            auto parts1 = n1 > 0 ? W : std::vector<Element>{S.zero()};
            auto parts2 = n2 > 0 ? W : std::vector<Element>{S.zero()};
            for (const auto& x1 : parts1)
                for (const auto& x2 : parts2) {
                    Element s = S.add(nth_multiple(x1, n1, S), nth_multiple(x2, n2, S));
                    ExtScalar cost(Rational(0));
                    if (n1 > 0) cost = cost + Rational(n1) * f.eval(x1);
                    if (n2 > 0) cost = cost + Rational(n2) * g.eval(x2);
                    if (cost.is_plus_inf()) continue;
                    ExtScalar scaled = cost.is_finite()
                                           ? ExtScalar(cost.value() / n)
                                           : cost;
                    for (const auto& x : W)
                        if (S.equal(nth_multiple(x, n, S), s)) update(x, scaled);
                }
        }
    return FunctionTable(f.instance(), f.window(), std::move(vals), f.outside_policy());
}

// ---------------------------------------------------------------------------

enum class BoundVerdict { Holds, Fails, PreconditionFailed };

struct BoundReport {
    BoundVerdict verdict = BoundVerdict::Holds;
    std::optional<Element> witness;
    std::string reason;
};

/// Quantitative local boundedness: if f <= f(x0) + M on x0 + B with B
/// symmetric, then |f(x0+y) - f(x0)| <= M/m whenever m*y lands in B.
inline BoundReport local_boundedness_bound(const FunctionTable& f, const Element& x0,
                                           const std::vector<Element>& B, const Rational& M,
                                           long long m) {
    BoundReport rep;
    const auto& S = *f.instance();
    if (!S.has_negation()) {
        rep.verdict = BoundVerdict::PreconditionFailed;
        rep.reason = "instance is not a group";
        return rep;
    }
    for (const auto& b : B)
        if (!list_contains(B, S, S.negate(b))) {
            rep.verdict = BoundVerdict::PreconditionFailed;
            rep.reason = "B is not symmetric at " + b.str();
            return rep;
        }
    if (!f.eval(x0).is_finite()) {
        rep.verdict = BoundVerdict::PreconditionFailed;
        rep.reason = "f(x0) is not finite";
        return rep;
    }
    const ExtScalar fx0 = f.eval(x0);
    for (const auto& b : B) {
        Element xb = S.add(x0, b);
        if (!f.in_window(xb)) continue;
        if (!(f.eval(xb) <= fx0 + ExtScalar(M))) {
            rep.verdict = BoundVerdict::PreconditionFailed;
            rep.reason = "upper bound hypothesis fails at " + b.str();
            rep.witness = b;
            return rep;
        }
    }
    for (const auto& y : S.enumerate(f.window())) {
        if (!list_contains(B, S, nth_multiple(y, m, S))) continue;
        Element xy = S.add(x0, y);
        if (!f.in_window(xy)) continue;
        ExtScalar diff = f.eval(xy) - fx0;
        ExtScalar limit{Rational(M) / m};
        if (!(diff <= limit && -diff <= limit)) {
            rep.verdict = BoundVerdict::Fails;
            rep.witness = y;
            return rep;
        }
    }
    return rep;
}

struct SlopeReport {
    BoundVerdict verdict = BoundVerdict::Holds;
    ExtScalar left, middle, right;
    std::string reason;
};

/// Three-slope inequalities for (m1+m2)*x = m1*x1 + m2*x2:
/// (f(x)-f(x1))/m2 <= (f(x2)-f(x1))/(m1+m2) <= (f(x2)-f(x))/m1.
/// Both follow from (m1+m2) f(x) <= m1 f(x1) + m2 f(x2).
inline SlopeReport three_slope_check(const FunctionTable& f, const Element& x, const Element& x1,
                                     const Element& x2, long long m1, long long m2) {
    SlopeReport rep;
    const auto& S = *f.instance();
    Element lhs = nth_multiple(x, m1 + m2, S);
    Element rhs = S.add(nth_multiple(x1, m1, S), nth_multiple(x2, m2, S));
    if (!S.equal(lhs, rhs)) {
        rep.verdict = BoundVerdict::PreconditionFailed;
        rep.reason = "relation (m1+m2)x = m1*x1 + m2*x2 does not hold";
        return rep;
    }
    auto ratio = [](const ExtScalar& a, long long d) {
        return a.is_finite() ? ExtScalar(a.value() / d) : a;
    };
    rep.left = ratio(f.eval(x) - f.eval(x1), m2);
    rep.middle = ratio(f.eval(x2) - f.eval(x1), m1 + m2);
    rep.right = ratio(f.eval(x2) - f.eval(x), m1);
    if (!(rep.left <= rep.middle && rep.middle <= rep.right)) rep.verdict = BoundVerdict::Fails;
    return rep;
}

struct CompositionReport {
    BoundVerdict verdict = BoundVerdict::Holds;
    std::string reason;
    ClassVerdict composed_convexity;
};

/// Sublinear increasing outer composed with convex non-decreasing inner is
/// convex. Hypotheses verified on the windows; inner values are transported
/// into the outer instance through `embed`.
inline CompositionReport monotone_composition_check(
    const FunctionTable& outer, const FunctionTable& inner,
    const std::function<std::optional<Element>(const Rational&)>& embed,
    const SearchBounds& bounds, long long m_max = 4) {
    CompositionReport rep;
    const auto& So = *outer.instance();
    if (!check_n_sublinear(outer, m_max).holds) {
        rep.verdict = BoundVerdict::PreconditionFailed;
        rep.reason = "outer function is not sublinear on its window";
        return rep;
    }
    const auto outs = So.enumerate(outer.window());
    for (const auto& a : outs)
        for (const auto& b : outs) {
            auto cmp = So.compare(a, b);
            if (!cmp) {
                rep.verdict = BoundVerdict::PreconditionFailed;
                rep.reason = "outer instance is not totally ordered";
                return rep;
            }
            if (*cmp <= 0 && !(outer.eval(a) <= outer.eval(b))) {
                rep.verdict = BoundVerdict::PreconditionFailed;
                rep.reason = "outer function is not non-decreasing";
                return rep;
            }
        }
    if (!check_convex(inner, bounds).holds) {
        rep.verdict = BoundVerdict::PreconditionFailed;
        rep.reason = "inner function is not convex on its window";
        return rep;
    }
    auto composed = FunctionTable::from(
        inner.instance(), inner.window(),
        [&](const Element& x) -> ExtScalar {
            ExtScalar g = inner.eval(x);
            if (!g.is_finite()) return ExtScalar::plus_inf();
            auto e = embed(g.value());
            if (!e || !outer.in_window(*e)) return ExtScalar::plus_inf();
            return outer.eval(*e);
        },
        inner.outside_policy());
    rep.composed_convexity = check_convex(composed, bounds);
    if (!rep.composed_convexity.holds) rep.verdict = BoundVerdict::Fails;
    return rep;
}

// ---------------------------------------------------------------------------

enum class AffineClass { EverywhereFinite, IdenticallyPlusInf, IdenticallyMinusInf, AttainsBoth };

/// Classifier for generalised affine tables (f and -f both convex) on group
/// windows: finite everywhere, identically +-inf, or attains both infinities.
inline std::optional<AffineClass> classify_generalised_affine(const FunctionTable& f,
                                                              const SearchBounds& bounds) {
    if (!check_convex(f, bounds).holds) return std::nullopt;
    if (!check_convex(f.negated(), bounds).holds) return std::nullopt;
    bool has_finite = false, has_plus = false, has_minus = false;
    for (const auto& [x, v] : f.values()) {
        if (v.is_finite()) has_finite = true;
        if (v.is_plus_inf()) has_plus = true;
        if (v.is_minus_inf()) has_minus = true;
    }
    if (has_plus && has_minus) return AffineClass::AttainsBoth;
    if (!has_finite && has_plus) return AffineClass::IdenticallyPlusInf;
    if (!has_finite && has_minus) return AffineClass::IdenticallyMinusInf;
    if (has_finite && !has_plus && !has_minus) return AffineClass::EverywhereFinite;
    // finite somewhere plus a single infinity: excluded by the trichotomy on
    // groups, so reaching here means the table violates it
    return std::nullopt;
}

}  // namespace convgrp
