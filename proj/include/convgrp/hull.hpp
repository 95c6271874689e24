#pragma once

#include "convgrp/instances.hpp"
#include "convgrp/linalg.hpp"
#include "convgrp/ncomb.hpp"

#include <functional>
#include <optional>
#include <stdexcept>

namespace convgrp {

/// Search budget for bounded combination enumeration.
struct SearchBounds {
    long long max_terms = 3;
    long long max_coeff = 4;
};

namespace detail {

/// Streams every combination whose terms draw from `gens` (distinct
/// elements, coefficients in [1, max_coeff], at most max_terms terms)
/// without materializing the list: subsets in index order, then a
/// coefficient odometer per subset. fn(comb, rhs) returns false to stop.
template <class F>
bool for_each_combination(const std::vector<Element>& gens, const StructureDescriptor& S,
                          const SearchBounds& b, F&& fn) {
    const std::size_t n = gens.size();
    const std::size_t kmax = std::min<std::size_t>(n, static_cast<std::size_t>(b.max_terms));
    std::vector<std::size_t> idx;
    std::vector<long long> coeffs;

    auto run_subset = [&]() -> bool {
        const std::size_t k = idx.size();
        coeffs.assign(k, 1);
        for (;;) {
            NCombination comb;
            comb.lhs_coeff = 0;
            for (std::size_t i = 0; i < k; ++i) {
                comb.lhs_coeff += coeffs[i];
                comb.terms.emplace_back(coeffs[i], gens[idx[i]]);
            }
            Element rhs = S.zero();
            for (std::size_t i = 0; i < k; ++i)
                rhs = S.add(rhs, nth_multiple(gens[idx[i]], coeffs[i], S));
            if (!fn(comb, rhs)) return false;
            std::size_t p = k;
            while (p > 0) {
                --p;
                if (coeffs[p] < b.max_coeff) {
                    ++coeffs[p];
                    std::fill(coeffs.begin() + static_cast<long>(p) + 1, coeffs.end(), 1);
                    break;
                }
                if (p == 0) return true;
            }
        }
    };

    std::function<bool(std::size_t)> rec = [&](std::size_t start) -> bool {
        if (!idx.empty() && !run_subset()) return false;
        if (idx.size() == kmax) return true;
        for (std::size_t i = start; i < n; ++i) {
            idx.push_back(i);
            if (!rec(i + 1)) return false;
            idx.pop_back();
        }
        return true;
    };
    return rec(0);
}

}  // namespace detail

/// A convex-set candidate: an explicit finite set, or a deterministic
/// membership predicate restricted to a window.
struct ConvexSetRep {
    std::vector<Element> elements;                ///< explicit representation
    std::function<bool(const Element&)> oracle;   ///< optional predicate
    std::string name = "explicit";

    bool is_oracle() const { return static_cast<bool>(oracle); }

    static ConvexSetRep explicit_set(std::vector<Element> xs) {
        ConvexSetRep r;
        r.elements = std::move(xs);
        return r;
    }
    static ConvexSetRep membership_oracle(std::function<bool(const Element&)> pred,
                                          std::string name) {
        ConvexSetRep r;
        r.oracle = std::move(pred);
        r.name = std::move(name);
        return r;
    }
};

inline bool set_contains(const ConvexSetRep& A, const StructureDescriptor& S, const Element& x) {
    if (A.is_oracle()) return A.oracle(x);
    for (const auto& a : A.elements)
        if (S.equal(a, x)) return true;
    return false;
}

inline bool list_contains(const std::vector<Element>& xs, const StructureDescriptor& S,
                          const Element& x) {
    for (const auto& a : xs)
        if (S.equal(a, x)) return true;
    return false;
}

struct NotConvexCert {
    NCombination combination;
    Element violator;
};

struct ConvexityVerdict {
    bool convex = true;                 ///< within the stated bounds
    std::optional<NotConvexCert> cert;
    long long skipped_residuals = 0;    ///< residuals that fell off-window
    SearchBounds bounds;
};

/// Bounded check of the combination-closure property. With `cone` set, the
/// left coefficient ranges freely instead of matching the coefficient sum
/// (the cone variant of the predicate).
inline ConvexityVerdict is_convex(const ConvexSetRep& A, const StructureDescriptor& S,
                                  const SearchBounds& bounds, const Window& window,
                                  bool cone = false) {
    ConvexityVerdict v;
    v.bounds = bounds;
    std::vector<Element> gens;
    if (A.is_oracle()) {
        for (const auto& x : S.enumerate(window))
            if (A.oracle(x)) gens.push_back(x);
    } else {
        gens = A.elements;
    }
    if (gens.empty()) return v;  // the empty set is convex

    const auto window_elems = S.enumerate(window);
    detail::for_each_combination(gens, S, bounds, [&](NCombination comb, const Element& rhs) {
        std::vector<long long> lhs_choices;
        if (cone) {
            for (long long m = 1; m <= bounds.max_coeff * bounds.max_terms; ++m)
                lhs_choices.push_back(m);
        } else {
            lhs_choices.push_back(comb.lhs_coeff);
        }
        for (long long m : lhs_choices) {
            comb.lhs_coeff = m;
            for (const auto& x : S.divide(rhs, m)) {
                if (!list_contains(window_elems, S, x)) {
                    ++v.skipped_residuals;
                    continue;
                }
                if (!set_contains(A, S, x)) {
                    v.convex = false;
                    v.cert = NotConvexCert{comb, x};
                    return false;
                }
            }
        }
        return true;
    });
    return v;
}

// ---------------------------------------------------------------------------

enum class HullMethod { FiniteGroupTheorem, LatticeIntersection, BoundedFixpoint };
enum class HullStrategy { Auto, Finite, Lattice, Fixpoint };

struct HullReport {
    std::vector<Element> hull;   ///< sorted, duplicate-free
    HullMethod method = HullMethod::BoundedFixpoint;
    SearchBounds bounds;
    Window window;
    bool certified = false;
};

struct UnboundedHull : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class RationalMembership { Inside, Outside };

struct SeparationResult {
    RationalMembership verdict = RationalMembership::Inside;
    QVec normal;         ///< a with a.x > b (Outside)
    Rational threshold;  ///< b with a.a_i <= b for all a_i (Outside)
};

/// Exact membership of x in the standard rational convex hull of A, with a
/// separating functional on failure. Bounded to d <= 6.
inline SeparationResult rational_hull_membership(const QVec& x, const std::vector<QVec>& A) {
    if (A.empty()) throw std::invalid_argument("rational_hull_membership: empty set");
    const std::size_t d = x.size();
    if (d > 6) throw DimensionTooLarge("rational_hull_membership: dimension > 6");
    for (const auto& a : A)
        if (a.size() != d)
            throw std::invalid_argument("rational_hull_membership: dimension mismatch");

    // Feasibility of sum lambda_i a_i = x, sum lambda_i = 1, lambda >= 0.
    const std::size_t k = A.size();
    QMat con;
    QVec rhs;
    for (std::size_t j = 0; j < d; ++j) {
        QVec row(k), neg(k);
        for (std::size_t i = 0; i < k; ++i) { row[i] = A[i][j]; neg[i] = -A[i][j]; }
        con.push_back(row); rhs.push_back(x[j]);
        con.push_back(neg); rhs.push_back(-x[j]);
    }
    con.push_back(QVec(k, Rational(1))); rhs.push_back(Rational(1));
    con.push_back(QVec(k, Rational(-1))); rhs.push_back(Rational(-1));
    for (std::size_t i = 0; i < k; ++i) {
        QVec row(k, Rational(0));
        row[i] = Rational(-1);
        con.push_back(row); rhs.push_back(Rational(0));
    }
    if (lp_feasible(con, rhs).status == LpStatus::Optimal) return SeparationResult{};

    // Separating functional: maximize a.x - b inside the normalization box
    // |a_j| <= 1, |b| <= B, subject to a.a_i - b <= 0 for all a_i in A.
    Rational bound = 1;
    for (const auto& a : A)
        for (const auto& c : a) bound += abs(c);
    QMat sep;
    QVec sep_rhs;
    for (const auto& a : A) {
        QVec row(d + 1);
        for (std::size_t j = 0; j < d; ++j) row[j] = a[j];
        row[d] = Rational(-1);
        sep.push_back(row); sep_rhs.push_back(Rational(0));
    }
    for (std::size_t j = 0; j <= d; ++j) {
        QVec up(d + 1, Rational(0)), dn(d + 1, Rational(0));
        up[j] = 1; dn[j] = -1;
        Rational lim = j == d ? bound : Rational(1);
        sep.push_back(up); sep_rhs.push_back(lim);
        sep.push_back(dn); sep_rhs.push_back(lim);
    }
    QVec obj(d + 1);
    for (std::size_t j = 0; j < d; ++j) obj[j] = x[j];
    obj[d] = Rational(-1);
    auto lp = lp_maximize(sep, sep_rhs, obj);
    if (lp.status != LpStatus::Optimal || lp.value <= 0)
        throw std::logic_error("rational_hull_membership: separation LP degenerate");
    SeparationResult r;
    r.verdict = RationalMembership::Outside;
    r.normal.assign(lp.x.begin(), lp.x.begin() + static_cast<long>(d));
    r.threshold = lp.x[d];
    return r;
}

// ---------------------------------------------------------------------------

namespace detail {

/// Integer grid covering the bounding box of a coordinate set.
inline void lattice_box_points(const std::vector<QVec>& coords, std::size_t d,
                               std::vector<IntVec>& out) {
    std::vector<Integer> lo(d), hi(d);
    for (std::size_t j = 0; j < d; ++j) {
        Rational mn = coords[0][j], mx = coords[0][j];
        for (const auto& c : coords) {
            if (c[j] < mn) mn = c[j];
            if (c[j] > mx) mx = c[j];
        }
        Integer fl = numerator(mn) / denominator(mn);
        if (Rational(fl) > mn) --fl;
        Integer ce = numerator(mx) / denominator(mx);
        if (Rational(ce) < mx) ++ce;
        lo[j] = fl;
        hi[j] = ce;
    }
    IntVec cur;
    std::function<void()> rec = [&]() {
        if (cur.size() == d) {
            out.push_back(cur);
            return;
        }
        for (Integer v = lo[cur.size()]; v <= hi[cur.size()]; ++v) {
            cur.push_back(v);
            rec();
            cur.pop_back();
        }
    };
    rec();
}

inline std::vector<Element> sorted_unique(std::vector<Element> xs) {
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

}  // namespace detail

/// All window residuals of combinations drawn from A within bounds — the
/// one-shot combination formula for the hull, without saturation.
inline std::vector<Element> bounded_residual_set(const std::vector<Element>& A,
                                                 const StructureDescriptor& S,
                                                 const SearchBounds& bounds,
                                                 const Window& window) {
    const auto window_elems = S.enumerate(window);
    std::vector<Element> out;
    detail::for_each_combination(A, S, bounds, [&](const NCombination& comb, const Element& rhs) {
        for (const auto& x : S.divide(rhs, comb.lhs_coeff))
            if (list_contains(window_elems, S, x) && !list_contains(out, S, x))
                out.push_back(x);
        return true;
    });
    return detail::sorted_unique(std::move(out));
}

/// Convex hull of a finite set, with strategy selection. The lattice path is
/// exact (real hull intersected with the lattice); the finite-group path
/// returns the carrier; the fixpoint path saturates combination residuals
/// within the window and is certified only on finite carriers.
inline HullReport hull(const std::vector<Element>& A, const InstancePtr& S,
                       HullStrategy strategy, const SearchBounds& bounds, const Window& window) {
    HullReport rep;
    rep.bounds = bounds;
    rep.window = window;
    if (A.empty()) {
        rep.certified = true;
        return rep;
    }

    const auto* zd = dynamic_cast<const LatticeZd*>(S.get());
    const auto* gl = dynamic_cast<const GeneralLattice*>(S.get());
    const auto* setalg = dynamic_cast<const SetAlgebraGroup*>(S.get());
    const auto* qmod1 = dynamic_cast<const RationalsMod1*>(S.get());

    HullStrategy chosen = strategy;
    if (chosen == HullStrategy::Auto) {
        if (zd || gl) chosen = HullStrategy::Lattice;
        else if (setalg) chosen = HullStrategy::Fixpoint;  // finite-sums closure below
        else if ((S->finite_carrier() && S->is_group()) || qmod1) chosen = HullStrategy::Finite;
        else chosen = HullStrategy::Fixpoint;
    }

    if (chosen == HullStrategy::Finite) {
        // In a finite group of exponent e, e*x = e*a makes every carrier
        // element a residual of a one-term combination over {a}; torsion
        // carriers of the rationals mod 1 admit the same argument per
        // window element.
        if (setalg)
            throw std::invalid_argument(
                "hull: the symmetric-difference carrier uses its sum formula, not carrier collapse");
        if (!(S->finite_carrier() && S->is_group()) && !qmod1)
            throw std::invalid_argument("hull: finite strategy needs a finite group");
        rep.hull = detail::sorted_unique(S->enumerate(window));
        rep.method = HullMethod::FiniteGroupTheorem;
        rep.certified = true;
        return rep;
    }

    if (chosen == HullStrategy::Lattice) {
        if (!zd && !gl)
            throw std::invalid_argument("hull: lattice strategy needs a lattice instance");
        const std::size_t d =
            zd ? static_cast<std::size_t>(zd->dimension()) : gl->generators().size();
        std::vector<QVec> coords;
        for (const auto& a : A) coords.push_back(*S->coordinates(a));
        std::vector<IntVec> grid;
        detail::lattice_box_points(coords, d, grid);
        for (auto& p : grid) {
            QVec q(d);
            for (std::size_t j = 0; j < d; ++j) q[j] = Rational(p[j]);
            if (rational_hull_membership(q, coords).verdict == RationalMembership::Inside)
                rep.hull.push_back(Element(p));
        }
        rep.hull = detail::sorted_unique(std::move(rep.hull));
        rep.method = HullMethod::LatticeIntersection;
        rep.certified = true;
        return rep;
    }

    // Fixpoint. Symmetric-difference carriers get the exact finite-sums
    // closure; everything else saturates combination residuals, processing
    // in later rounds only combinations that touch a fresh element.
    if (setalg) {
        std::vector<Element> cur = detail::sorted_unique(A);
        bool grew = true;
        while (grew) {
            grew = false;
            std::vector<Element> next = cur;
            for (const auto& x : cur)
                for (const auto& a : A) {
                    Element s = S->add(x, a);
                    if (!list_contains(next, *S, s)) {
                        next.push_back(s);
                        grew = true;
                    }
                }
            cur = detail::sorted_unique(std::move(next));
        }
        rep.hull = std::move(cur);
        rep.method = HullMethod::BoundedFixpoint;
        rep.certified = true;
        return rep;
    }

    SearchBounds eff = bounds;
    if (auto e = S->exponent()) {
        eff.max_coeff = std::max(eff.max_coeff, 2 * *e);
        eff.max_terms = std::max<long long>(eff.max_terms, static_cast<long long>(A.size()));
    }
    const auto window_elems = S->enumerate(window);
    std::vector<Element> cur = detail::sorted_unique(A);

    // One full round of residuals of combinations over `cur` (every
    // combination, since `fresh` ranges over all of `cur` in the callers
    // below when a complete sweep is needed).
    auto full_round = [&](const std::vector<Element>& fresh) {
        std::vector<Element> found;
        detail::for_each_combination(
            cur, *S, eff, [&](const NCombination& comb, const Element& rhs) {
                bool touches_fresh = false;
                for (const auto& [mi, xi] : comb.terms)
                    if (list_contains(fresh, *S, xi)) { touches_fresh = true; break; }
                if (!touches_fresh) return true;
                for (const auto& x : S->divide(rhs, comb.lhs_coeff)) {
                    if (!list_contains(window_elems, *S, x)) continue;
                    if (!list_contains(cur, *S, x) && !list_contains(found, *S, x))
                        found.push_back(x);
                }
                return true;
            });
        return found;
    };

    // Torsion-free integer lattices admit two exact shortcuts that leave the
    // least fixpoint unchanged but avoid the coefficient blow-up:
    //   1. Two-term combinations produce exactly the lattice points on the
    //      open segment [x, y] whose reduced parameter p/q satisfies
    //      max(p, q - p) <= max_coeff, so segments can be walked directly.
    //   2. Once the current set equals the real-hull lattice intersection
    //      (within the window), every further residual lies in
    //      conv(cur) \cap Z^d = cur, so saturation has provably closed.
    // A full enumeration round still runs whenever segment growth stalls
    // before reaching that target, preserving the exact fixpoint semantics.
    if (zd && zd->dimension() <= 6 && eff.max_terms >= 2) {
        const auto d = static_cast<std::size_t>(zd->dimension());
        std::vector<Element> target;
        {
            HullReport lat = hull(A, S, HullStrategy::Lattice, bounds, window);
            for (const auto& e : lat.hull)
                if (list_contains(window_elems, *S, e)) target.push_back(e);
            for (const auto& a : A)
                if (!list_contains(target, *S, a)) target.push_back(a);
            target = detail::sorted_unique(std::move(target));
        }
        auto segment_points = [&](const Element& x, const Element& y,
                                  std::vector<Element>& out) {
            IntVec diff(d);
            Integer g = 0;
            for (std::size_t j = 0; j < d; ++j) {
                diff[j] = y.ints()[j] - x.ints()[j];
                g = boost::multiprecision::gcd(g, abs(diff[j]));
            }
            for (Integer k = 1; k < g; ++k) {
                Integer c = boost::multiprecision::gcd(k, g);
                Integer p = k / c, q = g / c;  // reduced segment parameter
                if (p > eff.max_coeff || q - p > eff.max_coeff) continue;
                IntVec pt(d);
                for (std::size_t j = 0; j < d; ++j) pt[j] = x.ints()[j] + diff[j] * k / g;
                Element e{std::move(pt)};
                if (list_contains(window_elems, *S, e) && !list_contains(cur, *S, e) &&
                    !list_contains(out, *S, e))
                    out.push_back(std::move(e));
            }
        };
        // Exact reachability of z as a residual of one combination over
        // `cur`: some subset {x_1..x_k}, k <= max_terms, admits integer
        // m_i in [1, max_coeff] with sum m_i (x_i - z) = 0. Decided by
        // enumerating the free variables of the kernel of [x_i - z].
        auto reachable = [&](const Element& z) -> bool {
            const long long C = eff.max_coeff;
            const std::size_t n = cur.size();
            const std::size_t K =
                std::min<std::size_t>(n, static_cast<std::size_t>(eff.max_terms));
            std::vector<QVec> vs(n, QVec(d));
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < d; ++j)
                    vs[i][j] = Rational(cur[i].ints()[j] - z.ints()[j]);
            std::vector<std::size_t> ix;
            auto subset_ok = [&]() -> bool {
                const std::size_t k = ix.size();
                QMat V(d, QVec(k));
                for (std::size_t j = 0; j < d; ++j)
                    for (std::size_t c = 0; c < k; ++c) V[j][c] = vs[ix[c]][j];
                auto pivots = rref(V);
                if (pivots.size() == k) return false;  // trivial kernel only
                std::vector<std::size_t> free_cols;
                for (std::size_t c = 0, p = 0; c < k; ++c) {
                    if (p < pivots.size() && pivots[p] == c) ++p;
                    else free_cols.push_back(c);
                }
                std::vector<long long> assign(free_cols.size(), 1);
                while (true) {
                    bool ok = true;
                    for (std::size_t r = 0; r < pivots.size() && ok; ++r) {
                        Rational val = 0;
                        for (std::size_t t = 0; t < free_cols.size(); ++t)
                            val -= V[r][free_cols[t]] * Rational(assign[t]);
                        if (denominator(val) != 1 || val < 1 || val > C) ok = false;
                    }
                    if (ok) return true;
                    std::size_t t = 0;
                    while (t < assign.size() && assign[t] == C) assign[t++] = 1;
                    if (t == assign.size()) return false;
                    ++assign[t];
                }
            };
            std::function<bool(std::size_t)> rec = [&](std::size_t start) -> bool {
                if (ix.size() >= 2 && subset_ok()) return true;
                if (ix.size() == K) return false;
                for (std::size_t i = start; i < n; ++i) {
                    ix.push_back(i);
                    if (rec(i + 1)) { ix.pop_back(); return true; }
                    ix.pop_back();
                }
                return false;
            };
            return rec(0);
        };

        std::vector<Element> fresh = cur;
        while (true) {
            if (cur == target) break;  // provably closed, see above
            std::vector<Element> found;
            for (const auto& x : fresh)
                for (const auto& y : cur)
                    if (!(x == y)) segment_points(x, y, found);
            if (found.empty()) {
                // Segment growth stalled: decide each remaining target point
                // exactly; an empty sweep certifies the fixpoint has closed.
                for (const auto& z : target)
                    if (!list_contains(cur, *S, z) && reachable(z)) found.push_back(z);
                if (found.empty()) break;
            }
            fresh = found;
            cur.insert(cur.end(), found.begin(), found.end());
            cur = detail::sorted_unique(std::move(cur));
        }
        rep.hull = std::move(cur);
        rep.method = HullMethod::BoundedFixpoint;
        rep.certified = S->finite_carrier();
        return rep;
    }

    std::vector<Element> fresh = cur;  // elements added in the previous round
    while (!fresh.empty()) {
        std::vector<Element> found = full_round(fresh);
        fresh = found;
        cur.insert(cur.end(), found.begin(), found.end());
        cur = detail::sorted_unique(std::move(cur));
    }
    rep.hull = std::move(cur);
    rep.method = HullMethod::BoundedFixpoint;
    rep.certified = S->finite_carrier();
    return rep;
}

// ---------------------------------------------------------------------------

enum class MembershipKind { Member, NonMemberCertified, UnknownWithinBounds };

struct MembershipResult {
    MembershipKind kind = MembershipKind::UnknownWithinBounds;
    std::optional<NCombination> certificate;  ///< witness for Member
};

/// Is x in the convex hull of A? Lattice instances decide exactly via the
/// rational hull; otherwise a bounded witness search, with certified
/// exclusion when a certified hull is available.
inline MembershipResult member(const Element& x, const std::vector<Element>& A,
                               const InstancePtr& S, HullStrategy strategy,
                               const SearchBounds& bounds, const Window& window) {
    MembershipResult res;
    if (A.empty()) {
        res.kind = MembershipKind::NonMemberCertified;
        return res;
    }
    const bool lattice_path =
        (strategy == HullStrategy::Lattice || strategy == HullStrategy::Auto) &&
        (dynamic_cast<const LatticeZd*>(S.get()) || dynamic_cast<const GeneralLattice*>(S.get()));

    // Symmetric-difference carriers decide via their finite-sums hull so that
    // membership agrees with hull() on this instance.
    if (dynamic_cast<const SetAlgebraGroup*>(S.get())) {
        auto h = hull(A, S, HullStrategy::Auto, bounds, window);
        res.kind = list_contains(h.hull, *S, x) ? MembershipKind::Member
                                                : MembershipKind::NonMemberCertified;
        return res;
    }

    if (lattice_path) {
        std::vector<QVec> coords;
        for (const auto& a : A) coords.push_back(*S->coordinates(a));
        const QVec xq = *S->coordinates(x);
        auto sep = rational_hull_membership(xq, coords);
        if (sep.verdict == RationalMembership::Outside) {
            res.kind = MembershipKind::NonMemberCertified;
            return res;
        }
        // Recover integer multipliers from a feasible lambda and clear
        // denominators: L*x = sum (L*lambda_i) a_i with L = lcm of them.
        const std::size_t k = A.size();
        QMat con;
        QVec rhs;
        for (std::size_t j = 0; j < xq.size(); ++j) {
            QVec row(k), neg(k);
            for (std::size_t i = 0; i < k; ++i) { row[i] = coords[i][j]; neg[i] = -coords[i][j]; }
            con.push_back(row); rhs.push_back(xq[j]);
            con.push_back(neg); rhs.push_back(-xq[j]);
        }
        con.push_back(QVec(k, Rational(1))); rhs.push_back(Rational(1));
        con.push_back(QVec(k, Rational(-1))); rhs.push_back(Rational(-1));
        for (std::size_t i = 0; i < k; ++i) {
            QVec row(k, Rational(0));
            row[i] = Rational(-1);
            con.push_back(row); rhs.push_back(Rational(0));
        }
        auto feas = lp_feasible(con, rhs);
        if (feas.status != LpStatus::Optimal)
            throw std::logic_error("member: separation and feasibility disagree");
        Integer L = 1;
        for (const auto& l : feas.x) L = boost::multiprecision::lcm(L, denominator(l));
        NCombination comb;
        comb.lhs_coeff = static_cast<long long>(L);
        for (std::size_t i = 0; i < k; ++i) {
            Rational li = feas.x[i] * L;
            if (li > 0)
                comb.terms.emplace_back(static_cast<long long>(numerator(li)), A[i]);
        }
        res.kind = MembershipKind::Member;
        res.certificate = comb;
        return res;
    }

    std::optional<NCombination> witness;
    detail::for_each_combination(A, *S, bounds, [&](const NCombination& comb, const Element& rhs) {
        for (const auto& r : S->divide(rhs, comb.lhs_coeff)) {
            if (S->equal(r, x)) {
                witness = comb;
                return false;
            }
        }
        return true;
    });
    if (witness) {
        res.kind = MembershipKind::Member;
        res.certificate = witness;
        return res;
    }
    auto h = hull(A, S, strategy, bounds, window);
    if (list_contains(h.hull, *S, x)) {
        res.kind = MembershipKind::Member;  // reached during saturation
        return res;
    }
    if (h.certified) res.kind = MembershipKind::NonMemberCertified;
    return res;
}

// ---------------------------------------------------------------------------

/// An additive map between instances, spot-checked before use.
struct AdditiveMap {
    InstancePtr source;
    InstancePtr target;
    std::function<Element(const Element&)> apply;
    std::string name = "map";
};

struct NotAdditive : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class MapDirection { Forward, Inverse };

/// Checks convexity of the image (forward) or preimage (inverse) of A under
/// T. Additivity is spot-checked on the source window first.
inline ConvexityVerdict check_image_convexity(const AdditiveMap& T, const std::vector<Element>& A,
                                              MapDirection direction, const SearchBounds& bounds,
                                              const Window& source_window,
                                              const Window& target_window) {
    const auto xs = T.source->enumerate(source_window);
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = i; j < xs.size(); ++j) {
            Element lhs = T.apply(T.source->add(xs[i], xs[j]));
            Element rhs = T.target->add(T.apply(xs[i]), T.apply(xs[j]));
            if (!T.target->equal(lhs, rhs))
                throw NotAdditive(T.name + ": T(x+y) != T(x)+T(y) at " + xs[i].str() + ", " +
                                  xs[j].str());
        }
    if (direction == MapDirection::Forward) {
        std::vector<Element> image;
        for (const auto& a : A)
            if (!list_contains(image, *T.target, T.apply(a))) image.push_back(T.apply(a));
        return is_convex(ConvexSetRep::explicit_set(image), *T.target, bounds, target_window);
    }
    std::vector<Element> preimage;
    for (const auto& x : xs)
        if (list_contains(A, *T.target, T.apply(x))) preimage.push_back(x);
    return is_convex(ConvexSetRep::explicit_set(preimage), *T.source, bounds, source_window);
}

}  // namespace convgrp
