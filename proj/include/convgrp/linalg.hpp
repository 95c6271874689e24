#pragma once

#include "convgrp/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace convgrp {

using QVec = std::vector<Rational>;
using QMat = std::vector<QVec>;

inline Rational dot(const QVec& a, const QVec& b) {
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline QVec vec_add(const QVec& a, const QVec& b) {
    QVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline QVec vec_scale(const Rational& s, const QVec& a) {
    QVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
    return r;
}

/// Rank of a rational matrix by Gaussian elimination.
inline int rank(QMat m) {
    const std::size_t rows = m.size();
    if (rows == 0) return 0;
    const std::size_t cols = m[0].size();
    int r = 0;
    for (std::size_t c = 0; c < cols && static_cast<std::size_t>(r) < rows; ++c) {
        std::size_t pivot = r;
        while (pivot < rows && m[pivot][c] == 0) ++pivot;
        if (pivot == rows) continue;
        std::swap(m[r], m[pivot]);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == static_cast<std::size_t>(r) || m[i][c] == 0) continue;
            Rational f = m[i][c] / m[r][c];
            for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
        }
        ++r;
    }
    return r;
}

/// Solves A x = b exactly. Returns a solution if the system is consistent;
/// when A has full column rank the solution is unique.
inline std::optional<QVec> solve_linear(QMat a, QVec b) {
    const std::size_t rows = a.size();
    const std::size_t cols = rows == 0 ? 0 : a[0].size();
    std::vector<int> pivot_col(rows, -1);
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && a[p][c] == 0) ++p;
        if (p == rows) continue;
        std::swap(a[r], a[p]);
        std::swap(b[r], b[p]);
        Rational inv = a[r][c];
        for (std::size_t j = 0; j < cols; ++j) a[r][j] /= inv;
        b[r] /= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            Rational f = a[i][c];
            for (std::size_t j = 0; j < cols; ++j) a[i][j] -= f * a[r][j];
            b[i] -= f * b[r];
        }
        pivot_col[r] = static_cast<int>(c);
        ++r;
    }
    for (std::size_t i = r; i < rows; ++i)
        if (b[i] != 0) return std::nullopt;
    QVec x(cols, Rational(0));
    for (std::size_t i = 0; i < r; ++i) x[pivot_col[i]] = b[i];
    return x;
}

/// Reduced row echelon form in place; returns the pivot column of each of the
/// leading rows (rank = returned size).
inline std::vector<std::size_t> rref(QMat& a) {
    const std::size_t rows = a.size();
    const std::size_t cols = rows == 0 ? 0 : a[0].size();
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && a[p][c] == 0) ++p;
        if (p == rows) continue;
        std::swap(a[r], a[p]);
        Rational inv = a[r][c];
        for (std::size_t j = 0; j < cols; ++j) a[r][j] /= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            Rational f = a[i][c];
            for (std::size_t j = 0; j < cols; ++j) a[i][j] -= f * a[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

// ---------------------------------------------------------------------------
// Exact LP: maximize c.x subject to A x <= b with x free.
// Dictionary simplex with Bland's rule over rationals; always terminates.
// ---------------------------------------------------------------------------

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    QVec x;         ///< optimal point (Optimal)
    Rational value; ///< optimal objective value (Optimal)
    QVec dual;      ///< y >= 0 with y^T A = c, y^T b = value (Optimal)
    QVec farkas;    ///< y >= 0 with y^T A = 0, y^T b < 0 (Infeasible)
};

namespace detail {

/// Dictionary simplex over variables split as x = u - v, u,v >= 0.
class Simplex {
public:
    Simplex(const QMat& a, const QVec& b, const QVec& c)
        : m_(a.size()), m0_(a.size()), n_(a.empty() ? c.size() : a[0].size()) {
        // Columns 0..2n-1: u then v; columns 2n..2n+m-1: slacks; 2n+m: artificial.
        nz_ = 2 * n_;
        total_ = nz_ + m_ + 1;
        art_ = static_cast<int>(nz_ + m_);
        // row i: slack_i = b_i - sum Atilde_ij z_j + t
        rows_.assign(m_, QVec(nz_ + 2, Rational(0)));
        basic_.resize(m_);
        nonbasic_.clear();
        for (std::size_t j = 0; j < nz_; ++j) nonbasic_.push_back(static_cast<int>(j));
        nonbasic_.push_back(art_);
        for (std::size_t i = 0; i < m_; ++i) {
            basic_[i] = static_cast<int>(nz_ + i);
            rows_[i][0] = b[i];
            for (std::size_t j = 0; j < n_; ++j) {
                rows_[i][1 + j] = -a[i][j];
                rows_[i][1 + n_ + j] = a[i][j];
            }
            rows_[i][1 + nz_] = Rational(1);  // +t column
        }
        c_ = c;
    }

    LpResult run() {
        LpResult res;
        bool need_phase1 = false;
        for (std::size_t i = 0; i < m_; ++i)
            if (rows_[i][0] < 0) need_phase1 = true;

        if (need_phase1) {
            // objective: maximize -t
            obj_.assign(1 + nonbasic_.size(), Rational(0));
            set_obj_coeff(art_, Rational(-1));
            // make feasible: pivot t into the most negative row
            std::size_t worst = 0;
            for (std::size_t i = 1; i < m_; ++i)
                if (rows_[i][0] < rows_[worst][0]) worst = i;
            pivot(worst, col_of(art_));
            solve();
            if (obj_[0] < 0) {
                res.status = LpStatus::Infeasible;
                res.farkas = extract_duals();
                return res;
            }
            // drive t out of the basis if it lingers at value zero
            for (std::size_t i = 0; i < m_; ++i) {
                if (basic_[i] == art_) {
                    for (std::size_t jc = 0; jc < nonbasic_.size(); ++jc) {
                        if (nonbasic_[jc] != art_ && rows_[i][1 + jc] != 0) {
                            pivot(i, jc);
                            break;
                        }
                    }
                    break;
                }
            }
        }
        // pin the artificial variable at zero
        drop_column(art_);

        // phase 2 objective: c over x = u - v, expressed in nonbasics
        obj_.assign(1 + nonbasic_.size(), Rational(0));
        for (std::size_t j = 0; j < n_; ++j) {
            add_var_to_obj(static_cast<int>(j), c_[j]);
            add_var_to_obj(static_cast<int>(n_ + j), -c_[j]);
        }
        if (!solve()) {
            res.status = LpStatus::Unbounded;
            return res;
        }
        res.status = LpStatus::Optimal;
        res.value = obj_[0];
        QVec z(total_, Rational(0));
        for (std::size_t i = 0; i < m_; ++i) z[basic_[i]] = rows_[i][0];
        res.x.assign(n_, Rational(0));
        for (std::size_t j = 0; j < n_; ++j) res.x[j] = z[j] - z[n_ + j];
        res.dual = extract_duals();
        return res;
    }

private:
    std::size_t col_of(int var) const {
        for (std::size_t j = 0; j < nonbasic_.size(); ++j)
            if (nonbasic_[j] == var) return j;
        throw std::logic_error("simplex: variable not nonbasic");
    }

    void set_obj_coeff(int var, Rational v) { add_var_to_obj(var, v); }

    /// Adds coeff * var to the objective, substituting if var is basic.
    void add_var_to_obj(int var, const Rational& coeff) {
        if (coeff == 0) return;
        for (std::size_t i = 0; i < m_; ++i) {
            if (basic_[i] == var) {
                obj_[0] += coeff * rows_[i][0];
                for (std::size_t j = 0; j < nonbasic_.size(); ++j)
                    obj_[1 + j] += coeff * rows_[i][1 + j];
                return;
            }
        }
        obj_[1 + col_of(var)] += coeff;
    }

    /// Bland-rule simplex loop; returns false on unboundedness.
    bool solve() {
        for (;;) {
            int enter = -1;
            for (std::size_t j = 0; j < nonbasic_.size(); ++j) {
                if (obj_[1 + j] > 0 &&
                    (enter < 0 || nonbasic_[j] < nonbasic_[enter]))
                    enter = static_cast<int>(j);
            }
            if (enter < 0) return true;
            int leave = -1;
            Rational best;
            for (std::size_t i = 0; i < m_; ++i) {
                if (rows_[i][1 + enter] >= 0) continue;
                Rational t = -rows_[i][0] / rows_[i][1 + enter];
                if (leave < 0 || t < best ||
                    (t == best && basic_[i] < basic_[leave])) {
                    leave = static_cast<int>(i);
                    best = t;
                }
            }
            if (leave < 0) return false;
            pivot(static_cast<std::size_t>(leave), static_cast<std::size_t>(enter));
        }
    }

    void pivot(std::size_t row, std::size_t col) {
        // basic_[row] leaves, nonbasic_[col] enters
        QVec& r = rows_[row];
        Rational piv = r[1 + col];
        int entering = nonbasic_[col];
        int leaving = basic_[row];
        // solve the pivot row for the entering variable;
        // position col now carries the leaving variable
        QVec row_new(r.size(), Rational(0));
        row_new[0] = -r[0] / piv;
        for (std::size_t j = 0; j + 1 < r.size(); ++j) row_new[1 + j] = -r[1 + j] / piv;
        row_new[1 + col] = Rational(1) / piv;
        // substitute into other rows and the objective
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == row) continue;
            Rational f = rows_[i][1 + col];
            if (f == 0) continue;
            rows_[i][1 + col] = Rational(0);
            rows_[i][0] += f * row_new[0];
            for (std::size_t j = 0; j + 1 < r.size(); ++j)
                rows_[i][1 + j] += f * row_new[1 + j];
        }
        if (!obj_.empty()) {
            Rational f = obj_[1 + col];
            if (f != 0) {
                obj_[1 + col] = Rational(0);
                obj_[0] += f * row_new[0];
                for (std::size_t j = 0; j + 1 < r.size(); ++j)
                    obj_[1 + j] += f * row_new[1 + j];
            }
        }
        rows_[row] = row_new;
        basic_[row] = entering;
        nonbasic_[col] = leaving;
    }

    /// y_i = -(objective coefficient of slack_i); 0 when slack_i is basic.
    QVec extract_duals() const {
        QVec y(m0_, Rational(0));
        for (std::size_t j = 0; j < nonbasic_.size(); ++j) {
            int v = nonbasic_[j];
            if (v >= static_cast<int>(nz_) && v < static_cast<int>(nz_ + m0_))
                y[v - static_cast<int>(nz_)] = -obj_[1 + j];
        }
        return y;
    }

    void drop_column(int var) {
        for (std::size_t j = 0; j < nonbasic_.size(); ++j) {
            if (nonbasic_[j] == var) {
                nonbasic_.erase(nonbasic_.begin() + static_cast<long>(j));
                for (auto& r : rows_) r.erase(r.begin() + static_cast<long>(1 + j));
                if (!obj_.empty()) obj_.erase(obj_.begin() + static_cast<long>(1 + j));
                return;
            }
        }
        // basic at value zero in an all-zero row: the row is redundant
        for (std::size_t i = 0; i < m_; ++i) {
            if (basic_[i] == var) {
                rows_.erase(rows_.begin() + static_cast<long>(i));
                basic_.erase(basic_.begin() + static_cast<long>(i));
                --m_;
                return;
            }
        }
        throw std::logic_error("simplex: artificial variable not found");
    }

    std::size_t m_, m0_, n_, nz_, total_;
    int art_;
    QMat rows_;             ///< rows_[i] = (const, coeffs over nonbasics)
    QVec obj_;              ///< (const, coeffs over nonbasics)
    std::vector<int> basic_, nonbasic_;
    QVec c_;
};

}  // namespace detail

inline LpResult lp_maximize(const QMat& a, const QVec& b, const QVec& c) {
    if (a.empty()) {
        LpResult r;
        bool zero = true;
        for (const auto& ci : c) zero = zero && ci == 0;
        r.status = zero ? LpStatus::Optimal : LpStatus::Unbounded;
        r.x.assign(c.size(), Rational(0));
        r.value = 0;
        return r;
    }
    return detail::Simplex(a, b, c).run();
}

/// Feasibility of A x <= b; on success any feasible point (a vertex of the
/// lifted standard-form polyhedron), on failure a Farkas vector.
inline LpResult lp_feasible(const QMat& a, const QVec& b) {
    std::size_t n = a.empty() ? 0 : a[0].size();
    return lp_maximize(a, b, QVec(n, Rational(0)));
}

// ---------------------------------------------------------------------------
// Fourier-Motzkin elimination with provenance.
// System rows: coeffs . vars <= rhs. Provenance tracks each derived row as a
// nonnegative combination of the original rows.
// ---------------------------------------------------------------------------

struct FMRow {
    QVec coeffs;
    Rational rhs;
    QVec provenance;  ///< multipliers over the original rows
};

inline std::vector<FMRow> fm_initial(const QMat& a, const QVec& b) {
    std::vector<FMRow> rows;
    rows.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        FMRow r{a[i], b[i], QVec(a.size(), Rational(0))};
        r.provenance[i] = 1;
        rows.push_back(std::move(r));
    }
    return rows;
}

inline void fm_normalize(FMRow& r) {
    Rational lead = 0;
    for (const auto& c : r.coeffs)
        if (c != 0) { lead = abs(c); break; }
    if (lead == 0 || lead == 1) return;
    for (auto& c : r.coeffs) c /= lead;
    r.rhs /= lead;
    for (auto& p : r.provenance) p /= lead;
}

/// Eliminates variable `var`; exact combination of one positive and one
/// negative row per pair. Duplicate derived rows are pruned.
inline std::vector<FMRow> fm_eliminate_var(const std::vector<FMRow>& rows, std::size_t var) {
    std::vector<const FMRow*> pos, neg, none;
    for (const auto& r : rows) {
        if (r.coeffs[var] > 0) pos.push_back(&r);
        else if (r.coeffs[var] < 0) neg.push_back(&r);
        else none.push_back(&r);
    }
    std::vector<FMRow> out;
    for (const auto* r : none) out.push_back(*r);
    for (const auto* p : pos) {
        for (const auto* n : neg) {
            Rational cp = p->coeffs[var], cn = -n->coeffs[var];
            FMRow r;
            r.coeffs.resize(p->coeffs.size());
            for (std::size_t j = 0; j < r.coeffs.size(); ++j)
                r.coeffs[j] = cn * p->coeffs[j] + cp * n->coeffs[j];
            r.rhs = cn * p->rhs + cp * n->rhs;
            r.provenance.resize(p->provenance.size());
            for (std::size_t j = 0; j < r.provenance.size(); ++j)
                r.provenance[j] = cn * p->provenance[j] + cp * n->provenance[j];
            fm_normalize(r);
            bool dup = false;
            for (const auto& q : out)
                if (q.coeffs == r.coeffs && q.rhs == r.rhs) { dup = true; break; }
            if (!dup) out.push_back(std::move(r));
        }
    }
    return out;
}

/// Vertices of {x in Q^d : A x <= b} for small d, by enumerating active
/// constraint subsets. Intended for d <= 3.
inline std::vector<QVec> polyhedron_vertices(const QMat& a, const QVec& b) {
    std::vector<QVec> vertices;
    if (a.empty()) return vertices;
    const std::size_t m = a.size(), d = a[0].size();
    std::vector<std::size_t> idx(d);
    auto feasible = [&](const QVec& x) {
        for (std::size_t i = 0; i < m; ++i)
            if (dot(a[i], x) > b[i]) return false;
        return true;
    };
    // iterate over all d-subsets of rows
    std::vector<std::size_t> comb(d);
    auto try_subset = [&](const std::vector<std::size_t>& s) {
        QMat sub;
        QVec rhs;
        for (auto i : s) { sub.push_back(a[i]); rhs.push_back(b[i]); }
        if (rank(sub) != static_cast<int>(d)) return;
        auto x = solve_linear(sub, rhs);
        if (!x || !feasible(*x)) return;
        for (const auto& v : vertices)
            if (v == *x) return;
        vertices.push_back(*x);
    };
    std::vector<std::size_t> stack;
    std::function<void(std::size_t)> rec = [&](std::size_t start) {
        if (stack.size() == d) { try_subset(stack); return; }
        for (std::size_t i = start; i < m; ++i) {
            stack.push_back(i);
            rec(i + 1);
            stack.pop_back();
        }
    };
    rec(0);
    std::sort(vertices.begin(), vertices.end());
    return vertices;
}

}  // namespace convgrp
