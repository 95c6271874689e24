#pragma once

#include "convgrp/structure.hpp"

#include <algorithm>
#include <stdexcept>
#include <variant>

namespace convgrp {

/// The relation m*x = sum_i m_i * x_i with m = sum_i m_i. Residuals x are
/// the group-theoretic analogue of convex combinations of the x_i.
struct NCombination {
    long long lhs_coeff = 0;                            ///< m
    std::vector<std::pair<long long, Element>> terms;   ///< (m_i, x_i), m_i >= 1

    bool well_formed() const {
        if (terms.empty()) return false;
        long long s = 0;
        for (const auto& [mi, xi] : terms) {
            if (mi < 1) return false;
            s += mi;
        }
        return s == lhs_coeff;
    }

    std::string str() const {
        std::string s = std::to_string(lhs_coeff) + "*x =";
        for (std::size_t i = 0; i < terms.size(); ++i)
            s += (i ? " + " : " ") + std::to_string(terms[i].first) + "*" + terms[i].second.str();
        return s;
    }
};

/// x added to itself n times (n = 0 gives zero), by doubling.
inline Element nth_multiple(const Element& x, long long n, const StructureDescriptor& S) {
    if (n < 0) throw std::invalid_argument("nth_multiple: n must be nonnegative");
    Element acc = S.zero();
    Element pow = x;
    while (n > 0) {
        if (n & 1) acc = S.add(acc, pow);
        n >>= 1;
        if (n > 0) pow = S.add(pow, pow);
    }
    return acc;
}

/// Sum of the right-hand side of a combination.
inline Element combination_rhs(const NCombination& c, const StructureDescriptor& S) {
    Element s = S.zero();
    for (const auto& [mi, xi] : c.terms) s = S.add(s, nth_multiple(xi, mi, S));
    return s;
}

/// All solutions x of m*x = sum m_i x_i. Empty, singleton, or larger
/// (torsion carriers admit several residuals).
inline std::vector<Element> combine_residual(const NCombination& c, const StructureDescriptor& S) {
    if (!c.well_formed()) throw std::invalid_argument("combine_residual: ill-formed combination");
    return S.divide(combination_rhs(c, S), c.lhs_coeff);
}

struct ProbeDivisible {};
struct ProbeNotDivisible { Element witness; };
struct ProbeUnknown {};
using ProbeResult = std::variant<ProbeDivisible, ProbeNotDivisible, ProbeUnknown>;

/// Decide whether n*X = X, certified where possible: a sampled y with
/// divide(y, n) empty is a counterexample; a positive answer needs either a
/// declaration or a full sweep of a complete divide().
inline ProbeResult probe_divisibility(const StructureDescriptor& S, long long n,
                                      const Window& sample) {
    auto declared = S.declared_divisibility(n);
    const auto ys = S.enumerate(sample);
    if (ys.empty()) throw std::invalid_argument("probe_divisibility: empty sample window");
    for (const auto& y : ys)
        if (S.divide(y, n).empty()) return ProbeNotDivisible{y};
    if (declared == DeclaredDivisibility::Divisible) return ProbeDivisible{};
    if (S.divide_complete() && S.finite_carrier()) return ProbeDivisible{};
    return ProbeUnknown{};
}

/// Every combination over distinct generators with at most max_terms terms
/// and coefficients in [1, max_coeff]; deterministic order (lexicographic in
/// the full coefficient vector over the generator list).
inline std::vector<NCombination> enumerate_combinations(const std::vector<Element>& generators,
                                                        long long max_terms,
                                                        long long max_coeff) {
    if (generators.empty()) throw std::invalid_argument("enumerate_combinations: no generators");
    if (max_terms < 1 || max_coeff < 1)
        throw std::invalid_argument("enumerate_combinations: bounds must be >= 1");
    std::vector<NCombination> out;
    std::vector<long long> coeffs(generators.size(), 0);
    const std::size_t g = generators.size();
    while (true) {
        long long nonzero = 0, total = 0;
        for (long long c : coeffs) {
            if (c > 0) ++nonzero;
            total += c;
        }
        if (nonzero >= 1 && nonzero <= max_terms) {
            NCombination comb;
            comb.lhs_coeff = total;
            for (std::size_t i = 0; i < g; ++i)
                if (coeffs[i] > 0) comb.terms.emplace_back(coeffs[i], generators[i]);
            out.push_back(std::move(comb));
        }
        // odometer increment, least-significant index last
        std::size_t i = g;
        while (i > 0) {
            --i;
            if (coeffs[i] < max_coeff) {
                ++coeffs[i];
                std::fill(coeffs.begin() + static_cast<long>(i) + 1, coeffs.end(), 0);
                break;
            }
            if (i == 0) return out;
        }
    }
}

}  // namespace convgrp
