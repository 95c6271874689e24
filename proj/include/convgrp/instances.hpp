#pragma once

#include "convgrp/linalg.hpp"
#include "convgrp/structure.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace convgrp {

namespace detail {

inline bool is_power_of_two(const Integer& n) {
    if (n <= 0) return false;
    Integer m = n;
    while (m % 2 == 0) m /= 2;
    return m == 1;
}

/// n = 2^a * odd_part(n)
inline Integer odd_part(Integer n) {
    while (n % 2 == 0) n /= 2;
    return n;
}

inline void enumerate_box(long long radius, std::size_t dim,
                          std::vector<IntVec>& out, IntVec& cur) {
    if (cur.size() == dim) {
        out.push_back(cur);
        return;
    }
    for (long long c = -radius; c <= radius; ++c) {
        cur.emplace_back(c);
        enumerate_box(radius, dim, out, cur);
        cur.pop_back();
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// The lattice Z^d with coordinate-wise addition.
class LatticeZd : public StructureDescriptor {
public:
    explicit LatticeZd(int dimension) : d_(dimension) {
        if (dimension < 1) throw std::invalid_argument("LatticeZd: dimension must be positive");
    }

    std::string name() const override { return "zd(" + std::to_string(d_) + ")"; }
    Element zero() const override { return Element(IntVec(d_, Integer(0))); }

    Element add(const Element& a, const Element& b) const override {
        IntVec r(d_);
        for (int i = 0; i < d_; ++i) r[i] = a.ints()[i] + b.ints()[i];
        return Element(std::move(r));
    }

    bool has_negation() const override { return true; }
    Element negate(const Element& a) const override {
        IntVec r(d_);
        for (int i = 0; i < d_; ++i) r[i] = -a.ints()[i];
        return Element(std::move(r));
    }

    std::vector<Element> divide(const Element& y, long long n) const override {
        IntVec r(d_);
        for (int i = 0; i < d_; ++i) {
            if (y.ints()[i] % n != 0) return {};
            r[i] = y.ints()[i] / n;
        }
        return {Element(std::move(r))};
    }

    bool divide_complete() const override { return true; }

    std::vector<Element> enumerate(const Window& w) const override {
        std::vector<IntVec> coords;
        IntVec cur;
        detail::enumerate_box(w.radius, d_, coords, cur);
        std::vector<Element> out;
        out.reserve(coords.size());
        for (auto& c : coords) out.emplace_back(std::move(c));
        return out;
    }

    DeclaredDivisibility declared_divisibility(long long n) const override {
        return n == 1 ? DeclaredDivisibility::Divisible : DeclaredDivisibility::NotDivisible;
    }

    DualRep dual_rep() const override { return DualRep::CoefficientVector; }
    int dual_dimension() const override { return d_; }

    std::optional<RatVec> coordinates(const Element& x) const override {
        RatVec r(d_);
        for (int i = 0; i < d_; ++i) r[i] = Rational(x.ints()[i]);
        return r;
    }

    std::optional<int> compare(const Element& a, const Element& b) const override {
        if (d_ != 1) return std::nullopt;
        if (a.ints()[0] < b.ints()[0]) return -1;
        if (a.ints()[0] > b.ints()[0]) return 1;
        return 0;
    }

    int dimension() const { return d_; }

private:
    int d_;
};

// ---------------------------------------------------------------------------

/// span_Z{v_1..v_k} in Q^d. Elements are integer coefficient vectors; all
/// algebra delegates to Z^k through T(a) = sum a_i v_i.
class GeneralLattice : public StructureDescriptor {
public:
    explicit GeneralLattice(std::vector<RatVec> generators)
        : gens_(std::move(generators)), base_(static_cast<int>(gens_.size())) {
        if (gens_.empty()) throw std::invalid_argument("GeneralLattice: no generators");
        ambient_ = gens_[0].size();
        for (const auto& g : gens_)
            if (g.size() != ambient_)
                throw std::invalid_argument("GeneralLattice: generator dimension mismatch");
        // Z-independence of rational vectors == Q-linear independence
        QMat m(ambient_, QVec(gens_.size()));
        for (std::size_t i = 0; i < ambient_; ++i)
            for (std::size_t j = 0; j < gens_.size(); ++j) m[i][j] = gens_[j][i];
        if (rank(m) != static_cast<int>(gens_.size()))
            throw std::invalid_argument("GeneralLattice: generators are Z-dependent");
    }

    std::string name() const override { return "general_lattice(k=" + std::to_string(gens_.size()) + ")"; }
    Element zero() const override { return base_.zero(); }
    Element add(const Element& a, const Element& b) const override { return base_.add(a, b); }
    bool has_negation() const override { return true; }
    Element negate(const Element& a) const override { return base_.negate(a); }
    std::vector<Element> divide(const Element& y, long long n) const override {
        return base_.divide(y, n);
    }
    bool divide_complete() const override { return true; }
    std::vector<Element> enumerate(const Window& w) const override { return base_.enumerate(w); }
    DeclaredDivisibility declared_divisibility(long long n) const override {
        return base_.declared_divisibility(n);
    }
    DualRep dual_rep() const override { return DualRep::CoefficientVector; }
    int dual_dimension() const override { return static_cast<int>(gens_.size()); }
    std::optional<RatVec> coordinates(const Element& x) const override {
        return base_.coordinates(x);
    }

    /// T(a) = sum a_i v_i, exact in Q^d.
    RatVec transform(const Element& a) const {
        RatVec out(ambient_, Rational(0));
        for (std::size_t j = 0; j < gens_.size(); ++j)
            for (std::size_t i = 0; i < ambient_; ++i)
                out[i] += Rational(a.ints()[j]) * gens_[j][i];
        return out;
    }

    /// T^{-1} on lattice points; empty when the vector is off-lattice.
    std::optional<Element> inverse_transform(const RatVec& v) const {
        QMat m(ambient_, QVec(gens_.size()));
        for (std::size_t i = 0; i < ambient_; ++i)
            for (std::size_t j = 0; j < gens_.size(); ++j) m[i][j] = gens_[j][i];
        auto sol = solve_linear(m, v);
        if (!sol) return std::nullopt;
        IntVec a(gens_.size());
        for (std::size_t j = 0; j < gens_.size(); ++j) {
            if (denominator((*sol)[j]) != 1) return std::nullopt;
            a[j] = numerator((*sol)[j]);
        }
        return Element(std::move(a));
    }

    const std::vector<RatVec>& generators() const { return gens_; }
    std::size_t ambient_dimension() const { return ambient_; }

private:
    std::vector<RatVec> gens_;
    std::size_t ambient_ = 0;
    LatticeZd base_;
};

// ---------------------------------------------------------------------------

/// (Z[1/2])^d: rationals with power-of-two denominators. 2-semidivisible,
/// not divisible.
class DyadicRationals : public StructureDescriptor {
public:
    explicit DyadicRationals(int dimension = 1) : d_(dimension) {
        if (dimension < 1) throw std::invalid_argument("DyadicRationals: dimension must be positive");
    }

    std::string name() const override { return "dyadic(" + std::to_string(d_) + ")"; }
    Element zero() const override { return Element(RatVec(d_, Rational(0))); }

    Element add(const Element& a, const Element& b) const override {
        RatVec r(d_);
        for (int i = 0; i < d_; ++i) r[i] = a.rats()[i] + b.rats()[i];
        return Element(std::move(r));
    }

    bool has_negation() const override { return true; }
    Element negate(const Element& a) const override {
        RatVec r(d_);
        for (int i = 0; i < d_; ++i) r[i] = -a.rats()[i];
        return Element(std::move(r));
    }

    std::vector<Element> divide(const Element& y, long long n) const override {
        RatVec r(d_);
        for (int i = 0; i < d_; ++i) {
            Rational x = y.rats()[i] / n;
            if (!detail::is_power_of_two(denominator(x))) return {};
            r[i] = x;
        }
        return {Element(std::move(r))};
    }

    bool divide_complete() const override { return true; }

    std::vector<Element> enumerate(const Window& w) const override {
        Integer scale = 1;
        for (long long e = 0; e < w.denom_log2; ++e) scale *= 2;
        Integer lim = w.radius * scale;
        std::vector<Element> out;
        RatVec cur;
        std::function<void()> rec = [&]() {
            if (static_cast<int>(cur.size()) == d_) {
                out.emplace_back(cur);
                return;
            }
            for (Integer k = -lim; k <= lim; ++k) {
                cur.emplace_back(Rational(k, scale));
                rec();
                cur.pop_back();
            }
        };
        rec();
        return out;
    }

    DeclaredDivisibility declared_divisibility(long long n) const override {
        return detail::is_power_of_two(Integer(n)) ? DeclaredDivisibility::Divisible
                                                   : DeclaredDivisibility::NotDivisible;
    }

    DualRep dual_rep() const override { return DualRep::CoefficientVector; }
    int dual_dimension() const override { return d_; }
    std::optional<RatVec> coordinates(const Element& x) const override { return x.rats(); }

    std::optional<int> compare(const Element& a, const Element& b) const override {
        if (d_ != 1) return std::nullopt;
        if (a.rats()[0] < b.rats()[0]) return -1;
        if (a.rats()[0] > b.rats()[0]) return 1;
        return 0;
    }

    int dimension() const { return d_; }

private:
    int d_;
};

// ---------------------------------------------------------------------------

/// Products of cyclic groups Z/n_1 x ... x Z/n_k (finite abelian).
class FiniteCyclic : public StructureDescriptor {
public:
    explicit FiniteCyclic(std::vector<long long> moduli) : moduli_(std::move(moduli)) {
        if (moduli_.empty()) throw std::invalid_argument("FiniteCyclic: no moduli");
        long long e = 1, card = 1;
        for (auto m : moduli_) {
            if (m < 1) throw std::invalid_argument("FiniteCyclic: modulus must be positive");
            e = std::lcm(e, m);
            card *= m;
            if (card > 1'000'000) throw std::invalid_argument("FiniteCyclic: carrier too large");
        }
        exponent_ = e;
        cardinality_ = card;
    }

    std::string name() const override {
        std::string s = "finite_cyclic(";
        for (std::size_t i = 0; i < moduli_.size(); ++i)
            s += (i ? "x" : "") + std::to_string(moduli_[i]);
        return s + ")";
    }

    Element zero() const override { return Element(IntVec(moduli_.size(), Integer(0))); }

    Element add(const Element& a, const Element& b) const override {
        IntVec r(moduli_.size());
        for (std::size_t i = 0; i < moduli_.size(); ++i)
            r[i] = (a.ints()[i] + b.ints()[i]) % moduli_[i];
        return Element(std::move(r));
    }

    bool has_negation() const override { return true; }
    Element negate(const Element& a) const override {
        IntVec r(moduli_.size());
        for (std::size_t i = 0; i < moduli_.size(); ++i)
            r[i] = (moduli_[i] - a.ints()[i]) % moduli_[i];
        return Element(std::move(r));
    }

    std::vector<Element> divide(const Element& y, long long n) const override {
        std::vector<Element> out;
        IntVec r(moduli_.size());
        for (const auto& x : carrier()) {
            IntVec nx(moduli_.size());
            for (std::size_t i = 0; i < moduli_.size(); ++i)
                nx[i] = (x.ints()[i] * (n % moduli_[i])) % moduli_[i];
            if (nx == y.ints()) out.push_back(x);
        }
        return out;
    }

    bool divide_complete() const override { return true; }

    std::vector<Element> enumerate(const Window&) const override { return carrier(); }

    DeclaredDivisibility declared_divisibility(long long n) const override {
        if (std::gcd(n, exponent_) == 1) return DeclaredDivisibility::Divisible;
        return DeclaredDivisibility::Unknown;  // exhaustive probe decides
    }

    std::optional<long long> exponent() const override { return exponent_; }
    bool finite_carrier() const override { return true; }
    DualRep dual_rep() const override { return DualRep::TriviallyZero; }

    const std::vector<long long>& moduli() const { return moduli_; }

private:
    std::vector<Element> carrier() const {
        std::vector<Element> out;
        IntVec cur;
        std::function<void()> rec = [&]() {
            if (cur.size() == moduli_.size()) {
                out.emplace_back(cur);
                return;
            }
            for (long long v = 0; v < moduli_[cur.size()]; ++v) {
                cur.emplace_back(v);
                rec();
                cur.pop_back();
            }
        };
        rec();
        return out;
    }

    std::vector<long long> moduli_;
    long long exponent_ = 1;
    long long cardinality_ = 1;
};

// ---------------------------------------------------------------------------

/// Q/Z: exact rationals in [0,1) with addition mod 1. Every element has
/// finite order; divide(y, n) has exactly n solutions.
class RationalsMod1 : public StructureDescriptor {
public:
    std::string name() const override { return "rationals_mod1"; }
    Element zero() const override { return Element(RatVec{Rational(0)}); }

    Element add(const Element& a, const Element& b) const override {
        Rational s = a.rats()[0] + b.rats()[0];
        if (s >= 1) s -= 1;
        return Element(RatVec{s});
    }

    bool has_negation() const override { return true; }
    Element negate(const Element& a) const override {
        Rational v = a.rats()[0];
        return Element(RatVec{v == 0 ? Rational(0) : Rational(1) - v});
    }

    std::vector<Element> divide(const Element& y, long long n) const override {
        std::vector<Element> out;
        out.reserve(n);
        for (long long k = 0; k < n; ++k)
            out.push_back(Element(RatVec{(y.rats()[0] + k) / n}));
        return out;
    }

    bool divide_complete() const override { return true; }

    std::vector<Element> enumerate(const Window& w) const override {
        std::vector<Element> out;
        for (long long k = 0; k < w.denominator; ++k)
            out.push_back(Element(RatVec{Rational(k, w.denominator)}));
        return out;
    }

    DeclaredDivisibility declared_divisibility(long long) const override {
        return DeclaredDivisibility::Divisible;
    }

    DualRep dual_rep() const override { return DualRep::TriviallyZero; }
};

// ---------------------------------------------------------------------------

/// Subsets of a finite ground set under symmetric difference. Every element
/// is its own inverse: (2n)A = 0 and (2n-1)A = A.
class SetAlgebraGroup : public StructureDescriptor {
public:
    explicit SetAlgebraGroup(int ground_size) : s_(ground_size) {
        if (ground_size < 1 || ground_size > 24)
            throw std::invalid_argument("SetAlgebraGroup: ground size must be in [1,24]");
    }

    std::string name() const override { return "set_algebra(" + std::to_string(s_) + ")"; }
    Element zero() const override { return Element(Bits{0}); }

    Element add(const Element& a, const Element& b) const override {
        return Element(Bits{a.bits().mask ^ b.bits().mask});
    }

    bool has_negation() const override { return true; }
    Element negate(const Element& a) const override { return a; }

    std::vector<Element> divide(const Element& y, long long n) const override {
        if (n % 2 == 1) return {y};
        if (y.bits().mask != 0) return {};
        return enumerate(Window{});  // 2n * anything = 0
    }

    bool divide_complete() const override { return true; }

    std::vector<Element> enumerate(const Window&) const override {
        std::vector<Element> out;
        out.reserve(std::size_t(1) << s_);
        for (std::uint32_t m = 0; m < (std::uint32_t(1) << s_); ++m)
            out.push_back(Element(Bits{m}));
        return out;
    }

    DeclaredDivisibility declared_divisibility(long long n) const override {
        return n % 2 == 1 ? DeclaredDivisibility::Divisible : DeclaredDivisibility::NotDivisible;
    }

    std::optional<long long> exponent() const override { return 2; }
    bool finite_carrier() const override { return true; }
    DualRep dual_rep() const override { return DualRep::TriviallyZero; }

    int ground_size() const { return s_; }

private:
    int s_;
};

// ---------------------------------------------------------------------------

/// Finite meet-semilattice as an idempotent commutative monoid (add = meet,
/// unit = top). Divisible since x ^ x = x.
class MeetSemilattice : public StructureDescriptor {
public:
    explicit MeetSemilattice(std::vector<std::vector<int>> meet_table)
        : table_(std::move(meet_table)) {
        const int k = static_cast<int>(table_.size());
        if (k == 0) throw std::invalid_argument("MeetSemilattice: empty table");
        for (const auto& row : table_) {
            if (static_cast<int>(row.size()) != k)
                throw std::invalid_argument("MeetSemilattice: table not square");
            for (int v : row)
                if (v < 0 || v >= k)
                    throw std::invalid_argument("MeetSemilattice: entry out of range");
        }
        for (int x = 0; x < k; ++x) {
            if (table_[x][x] != x)
                throw std::invalid_argument("MeetSemilattice: meet not idempotent");
            for (int y = 0; y < k; ++y) {
                if (table_[x][y] != table_[y][x])
                    throw std::invalid_argument("MeetSemilattice: meet not commutative");
                for (int z = 0; z < k; ++z)
                    if (table_[table_[x][y]][z] != table_[x][table_[y][z]])
                        throw std::invalid_argument("MeetSemilattice: meet not associative");
            }
        }
        top_ = -1;
        for (int t = 0; t < k; ++t) {
            bool neutral = true;
            for (int x = 0; x < k; ++x) neutral = neutral && table_[t][x] == x;
            if (neutral) { top_ = t; break; }
        }
        if (top_ < 0) throw std::invalid_argument("MeetSemilattice: no top (unit) element");
    }

    std::string name() const override { return "meet_semilattice(" + std::to_string(table_.size()) + ")"; }
    Element zero() const override { return Element(Node{top_}); }

    Element add(const Element& a, const Element& b) const override {
        return Element(Node{table_[a.node().index][b.node().index]});
    }

    bool has_negation() const override { return false; }

    std::vector<Element> divide(const Element& y, long long) const override {
        return {y};  // n*x = x, so the only solution of n*x = y is y itself
    }

    bool divide_complete() const override { return true; }

    std::vector<Element> enumerate(const Window&) const override {
        std::vector<Element> out;
        for (int i = 0; i < static_cast<int>(table_.size()); ++i)
            out.push_back(Element(Node{i}));
        return out;
    }

    DeclaredDivisibility declared_divisibility(long long) const override {
        return DeclaredDivisibility::Divisible;
    }

    bool finite_carrier() const override { return true; }
    bool is_group() const override { return false; }
    DualRep dual_rep() const override { return DualRep::TriviallyZero; }

private:
    std::vector<std::vector<int>> table_;
    int top_ = -1;
};

// ---------------------------------------------------------------------------

/// ([0,inf), a (+) b = (a+b)/(1+ab)): the single floating-point instance.
/// Divisible precisely for odd n (declared metadata; see probe tests).
class ArctanSemigroup : public StructureDescriptor {
public:
    static constexpr double kTol = 1e-9;

    std::string name() const override { return "arctan"; }
    Element zero() const override { return Element(Real{0.0}); }

    Element add(const Element& a, const Element& b) const override {
        double x = a.real().v, y = b.real().v;
        return Element(Real{(x + y) / (1.0 + x * y)});
    }

    bool has_negation() const override { return false; }

    std::vector<Element> divide(const Element& y, long long n) const override {
        double v = y.real().v;
        std::vector<Element> out;
        if (std::abs(v - 1.0) <= kTol) {
            out.push_back(Element(Real{1.0}));
            return out;
        }
        if (v < 1.0) {
            double t = std::atanh(v);
            out.push_back(Element(Real{std::tanh(t / n)}));
            if (n % 2 == 0 && v > 0.0)
                out.push_back(Element(Real{1.0 / std::tanh(t / n)}));
            return out;
        }
        // v > 1: n-fold sums exceed 1 only for odd n (coth branch)
        if (n % 2 == 1) {
            double t = std::atanh(1.0 / v);
            out.push_back(Element(Real{1.0 / std::tanh(t / n)}));
        }
        return out;
    }

    bool divide_complete() const override { return true; }

    std::vector<Element> enumerate(const Window& w) const override {
        std::vector<Element> out;
        if (w.real_step <= 0) return out;
        for (double v = 0.0; v <= w.real_max + kTol; v += w.real_step)
            out.push_back(Element(Real{v}));
        return out;
    }

    DeclaredDivisibility declared_divisibility(long long n) const override {
        return n % 2 == 1 ? DeclaredDivisibility::Divisible : DeclaredDivisibility::NotDivisible;
    }

    DualRep dual_rep() const override { return DualRep::Unsupported; }

    bool equal(const Element& a, const Element& b) const override {
        return std::abs(a.real().v - b.real().v) <= kTol;
    }

    std::optional<int> compare(const Element& a, const Element& b) const override {
        if (equal(a, b)) return 0;
        return a.real().v < b.real().v ? -1 : 1;
    }
};

/// n-fold (+)-sum in closed form: tanh/coth of scaled artanh. Matches
/// iterated addition within 1e-9.
inline double arctan_n_fold(double a, long long n) {
    if (a < 0) throw std::invalid_argument("arctan_n_fold: negative argument");
    if (n <= 0) throw std::invalid_argument("arctan_n_fold: n must be positive");
    if (a == 0.0) return 0.0;
    if (a == 1.0) return 1.0;
    if (a < 1.0) return std::tanh(n * std::atanh(a));
    double t = std::atanh(1.0 / a);  // a = coth(t)
    return n % 2 == 0 ? std::tanh(n * t) : 1.0 / std::tanh(n * t);
}

}  // namespace convgrp
