#pragma once

#include "convgrp/rational.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace convgrp {

/// Bitmask carrier of the symmetric-difference group.
struct Bits {
    std::uint32_t mask = 0;
    friend auto operator<=>(const Bits&, const Bits&) = default;
};

/// Node index into a finite meet-semilattice table.
struct Node {
    int index = 0;
    friend auto operator<=>(const Node&, const Node&) = default;
};

/// Nonnegative real of the arctan semigroup (the single inexact carrier).
struct Real {
    double v = 0.0;
    friend auto operator<=>(const Real&, const Real&) = default;
};

using IntVec = std::vector<Integer>;
using RatVec = std::vector<Rational>;

/// Opaque instance payload. Equality is canonical: payloads compare equal
/// iff they denote the same element of the owning instance.
class Element {
public:
    using Storage = std::variant<IntVec, RatVec, Bits, Node, Real>;

    Element() : data_(IntVec{}) {}
    Element(IntVec v) : data_(std::move(v)) {}
    Element(RatVec v) : data_(std::move(v)) {}
    Element(Bits b) : data_(b) {}
    Element(Node n) : data_(n) {}
    Element(Real r) : data_(r) {}

    const IntVec& ints() const { return std::get<IntVec>(data_); }
    const RatVec& rats() const { return std::get<RatVec>(data_); }
    Bits bits() const { return std::get<Bits>(data_); }
    Node node() const { return std::get<Node>(data_); }
    Real real() const { return std::get<Real>(data_); }

    bool holds_ints() const { return std::holds_alternative<IntVec>(data_); }
    bool holds_rats() const { return std::holds_alternative<RatVec>(data_); }
    bool holds_bits() const { return std::holds_alternative<Bits>(data_); }
    bool holds_node() const { return std::holds_alternative<Node>(data_); }
    bool holds_real() const { return std::holds_alternative<Real>(data_); }

    friend bool operator==(const Element& a, const Element& b) { return a.data_ == b.data_; }

    friend bool operator<(const Element& a, const Element& b) {
        if (a.data_.index() != b.data_.index()) return a.data_.index() < b.data_.index();
        return std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                return x < std::get<T>(b.data_);
            },
            a.data_);
    }
    friend bool operator!=(const Element& a, const Element& b) { return !(a == b); }

    std::string str() const {
        return std::visit(
            [](const auto& x) -> std::string {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, IntVec>) {
                    std::string s = "(";
                    for (std::size_t i = 0; i < x.size(); ++i)
                        s += (i ? "," : "") + x[i].str();
                    return s + ")";
                } else if constexpr (std::is_same_v<T, RatVec>) {
                    std::string s = "(";
                    for (std::size_t i = 0; i < x.size(); ++i)
                        s += (i ? "," : "") + convgrp::to_string(x[i]);
                    return s + ")";
                } else if constexpr (std::is_same_v<T, Bits>) {
                    return "b" + std::to_string(x.mask);
                } else if constexpr (std::is_same_v<T, Node>) {
                    return "n" + std::to_string(x.index);
                } else {
                    return std::to_string(x.v);
                }
            },
            data_);
    }

private:
    Storage data_;
};

inline Element make_int_vec(std::vector<long long> v) {
    IntVec out;
    out.reserve(v.size());
    for (auto c : v) out.emplace_back(c);
    return Element(std::move(out));
}

}  // namespace convgrp
