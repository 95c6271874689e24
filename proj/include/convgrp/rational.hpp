#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace convgrp {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Integer numerator(const Rational& q) { return boost::multiprecision::numerator(q); }
inline Integer denominator(const Rational& q) { return boost::multiprecision::denominator(q); }

inline std::string to_string(const Rational& q) {
    std::string s = numerator(q).str();
    if (denominator(q) != 1) s += "/" + denominator(q).str();
    return s;
}

/// Parses "p", "p/q", "+inf" rejected here (see ExtScalar::parse).
inline Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(Integer(s));
    Integer num(s.substr(0, slash));
    Integer den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("rational with zero denominator: " + s);
    return Rational(num, den);
}

/// Extended rational scalar with the convex-analysis convention
/// inf - inf = inf and 0 * inf = inf. A concave variant of addition
/// (minus-infinity dominant) is provided for checks on -f.
class ExtScalar {
public:
    enum class Kind : std::uint8_t { Finite, PlusInf, MinusInf };

    ExtScalar() : kind_(Kind::Finite), value_(0) {}
    ExtScalar(Rational v) : kind_(Kind::Finite), value_(std::move(v)) {}
    ExtScalar(int v) : kind_(Kind::Finite), value_(v) {}

    static ExtScalar plus_inf() { return ExtScalar(Kind::PlusInf); }
    static ExtScalar minus_inf() { return ExtScalar(Kind::MinusInf); }

    bool is_finite() const { return kind_ == Kind::Finite; }
    bool is_plus_inf() const { return kind_ == Kind::PlusInf; }
    bool is_minus_inf() const { return kind_ == Kind::MinusInf; }
    Kind kind() const { return kind_; }

    const Rational& value() const {
        if (!is_finite()) throw std::logic_error("value() on infinite ExtScalar");
        return value_;
    }

    /// Convex addition: +inf dominates everything, including -inf.
    friend ExtScalar operator+(const ExtScalar& a, const ExtScalar& b) {
        if (a.is_plus_inf() || b.is_plus_inf()) return plus_inf();
        if (a.is_minus_inf() || b.is_minus_inf()) return minus_inf();
        return ExtScalar(a.value_ + b.value_);
    }

    /// Concave addition: -inf dominates, the mirror convention for -f.
    friend ExtScalar add_concave(const ExtScalar& a, const ExtScalar& b) {
        if (a.is_minus_inf() || b.is_minus_inf()) return minus_inf();
        if (a.is_plus_inf() || b.is_plus_inf()) return plus_inf();
        return ExtScalar(a.value_ + b.value_);
    }

    ExtScalar operator-() const {
        switch (kind_) {
            case Kind::PlusInf: return minus_inf();
            case Kind::MinusInf: return plus_inf();
            default: return ExtScalar(-value_);
        }
    }

    /// Scaling by a nonnegative rational; 0 * (+-inf) keeps the infinity.
    friend ExtScalar operator*(const Rational& m, const ExtScalar& a) {
        if (m < 0) throw std::invalid_argument("ExtScalar scaling by negative factor");
        if (!a.is_finite()) return a;
        return ExtScalar(m * a.value_);
    }

    friend ExtScalar operator-(const ExtScalar& a, const ExtScalar& b) { return a + (-b); }

    friend bool operator==(const ExtScalar& a, const ExtScalar& b) {
        if (a.kind_ != b.kind_) return false;
        return !a.is_finite() || a.value_ == b.value_;
    }

    friend bool operator<(const ExtScalar& a, const ExtScalar& b) {
        if (a.kind_ == b.kind_) return a.is_finite() && a.value_ < b.value_;
        if (a.is_minus_inf()) return true;
        if (a.is_plus_inf()) return false;
        return b.is_plus_inf();
    }
    friend bool operator>(const ExtScalar& a, const ExtScalar& b) { return b < a; }
    friend bool operator<=(const ExtScalar& a, const ExtScalar& b) { return !(b < a); }
    friend bool operator>=(const ExtScalar& a, const ExtScalar& b) { return !(a < b); }
    friend bool operator!=(const ExtScalar& a, const ExtScalar& b) { return !(a == b); }

    std::string str() const {
        switch (kind_) {
            case Kind::PlusInf: return "+inf";
            case Kind::MinusInf: return "-inf";
            default: return convgrp::to_string(value_);
        }
    }

    static ExtScalar parse(const std::string& s) {
        if (s == "+inf" || s == "inf") return plus_inf();
        if (s == "-inf") return minus_inf();
        return ExtScalar(parse_rational(s));
    }

private:
    explicit ExtScalar(Kind k) : kind_(k), value_(0) {}

    Kind kind_;
    Rational value_;
};

inline ExtScalar ext_min(const ExtScalar& a, const ExtScalar& b) { return a < b ? a : b; }
inline ExtScalar ext_max(const ExtScalar& a, const ExtScalar& b) { return a < b ? b : a; }

}  // namespace convgrp
