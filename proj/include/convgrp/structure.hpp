#pragma once

#include "convgrp/element.hpp"

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace convgrp {

/// Explicit finite truncation of a (possibly infinite) carrier. Fields are
/// interpreted per instance; unused fields are ignored.
struct Window {
    long long radius = 0;      ///< coordinate box |x_i| <= radius (lattices, dyadics)
    long long denom_log2 = 0;  ///< dyadics: denominators up to 2^denom_log2
    long long denominator = 1; ///< rationals mod 1: multiples of 1/denominator
    double real_max = 0.0;     ///< arctan: grid upper end
    double real_step = 0.0;    ///< arctan: grid step
};

enum class DeclaredDivisibility { Divisible, NotDivisible, Unknown };

/// Representation of the additive dual X* = {additive maps X -> R}.
enum class DualRep { CoefficientVector, TriviallyZero, Unsupported };

/// A pluggable commutative-monoid/group instance. All operations are pure;
/// descriptors are immutable after construction and safe to share.
class StructureDescriptor {
public:
    virtual ~StructureDescriptor() = default;

    virtual std::string name() const = 0;
    virtual Element zero() const = 0;
    virtual Element add(const Element& a, const Element& b) const = 0;

    virtual bool has_negation() const = 0;
    virtual Element negate(const Element& a) const {
        throw std::logic_error(name() + ": no negation");
    }

    /// All x in the instance with n*x = y. Empty set means no solution.
    virtual std::vector<Element> divide(const Element& y, long long n) const = 0;

    /// Whether divide() is exhaustive (finds every solution in the carrier).
    virtual bool divide_complete() const = 0;

    virtual std::vector<Element> enumerate(const Window& w) const = 0;

    virtual DeclaredDivisibility declared_divisibility(long long n) const = 0;

    /// Least e > 0 with e*x = 0 for all x; empty for infinite-order carriers.
    virtual std::optional<long long> exponent() const { return std::nullopt; }

    /// Carrier is finite and enumerate() ignores the window bounds.
    virtual bool finite_carrier() const { return false; }

    virtual bool is_group() const { return has_negation(); }

    virtual DualRep dual_rep() const = 0;

    /// Dual dimension when dual_rep() == CoefficientVector.
    virtual int dual_dimension() const { return 0; }

    /// Exact rational coordinates for CoefficientVector duals: additive maps
    /// are dot products against these.
    virtual std::optional<RatVec> coordinates(const Element& x) const { return std::nullopt; }

    /// Instance-level equality; exact everywhere except the arctan carrier.
    virtual bool equal(const Element& a, const Element& b) const { return a == b; }

    /// Total order usable for monotonicity checks, when one exists.
    virtual std::optional<int> compare(const Element& a, const Element& b) const {
        return std::nullopt;
    }
};

using InstancePtr = std::shared_ptr<const StructureDescriptor>;

}  // namespace convgrp
