#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "convgrp/instances.hpp"
#include "convgrp/ncomb.hpp"

#include <cmath>
#include <set>

using namespace convgrp;

namespace {

// Exhaustive monoid/group laws on a small window.
void check_laws(const StructureDescriptor& S, const Window& w) {
    auto xs = S.enumerate(w);
    REQUIRE(!xs.empty());
    std::set<Element> seen;
    for (const auto& x : xs) CHECK(seen.insert(x).second);  // no duplicates
    const Element z = S.zero();
    for (const auto& x : xs) {
        CHECK(S.equal(S.add(x, z), x));
        if (S.has_negation()) CHECK(S.equal(S.add(x, S.negate(x)), z));
        for (const auto& y : xs) {
            CHECK(S.equal(S.add(x, y), S.add(y, x)));
            for (const auto& u : xs)
                CHECK(S.equal(S.add(S.add(x, y), u), S.add(x, S.add(y, u))));
        }
    }
}

// divide must invert nth_multiple on every window element.
void check_divide_roundtrip(const StructureDescriptor& S, const Window& w, long long n_max) {
    for (const auto& x : S.enumerate(w)) {
        for (long long n = 1; n <= n_max; ++n) {
            Element y = nth_multiple(x, n, S);
            auto sols = S.divide(y, n);
            bool found = false;
            for (const auto& s : sols) {
                CHECK(S.equal(nth_multiple(s, n, S), y));
                if (S.equal(s, x)) found = true;
            }
            CHECK(found);
        }
    }
}

}  // namespace

TEST_CASE("Z^d: arithmetic, exact division, coordinates") {
    LatticeZd Z2(2);
    Element a = make_int_vec({2, 3});
    CHECK(nth_multiple(a, 3, Z2) == make_int_vec({6, 9}));
    CHECK(Z2.divide(make_int_vec({4, 6}), 2) == std::vector<Element>{make_int_vec({2, 3})});
    CHECK(Z2.divide(make_int_vec({1, 2}), 2).empty());
    CHECK(Z2.enumerate(Window{.radius = 1}).size() == 9);
    check_laws(Z2, Window{.radius = 1});
    check_divide_roundtrip(Z2, Window{.radius = 2}, 8);

    LatticeZd Z1(1);
    CHECK(Z1.compare(make_int_vec({-1}), make_int_vec({3})) == -1);
}

TEST_CASE("general lattice: transport to and from ambient coordinates") {
    // generators (1, 1/2) and (0, 1/3) in Q^2
    std::vector<RatVec> gens = {{Rational(1), Rational(1, 2)}, {Rational(0), Rational(1, 3)}};
    GeneralLattice L(gens);
    Element a = make_int_vec({2, 3});
    RatVec v = L.transform(a);
    CHECK(v == RatVec{Rational(2), Rational(2)});
    auto back = L.inverse_transform(v);
    REQUIRE(back.has_value());
    CHECK(*back == a);
    CHECK(!L.inverse_transform(RatVec{Rational(1, 2), Rational(0)}).has_value());
    check_laws(L, Window{.radius = 1});

    // dependent generators rejected
    std::vector<RatVec> dep = {{Rational(1), Rational(2)}, {Rational(2), Rational(4)}};
    CHECK_THROWS(GeneralLattice(dep));
}

TEST_CASE("dyadics: halving always works, thirds do not") {
    DyadicRationals D(1);
    Element one(RatVec{Rational(1)});
    CHECK(D.divide(one, 2) == std::vector<Element>{Element(RatVec{Rational(1, 2)})});
    CHECK(D.divide(one, 4) == std::vector<Element>{Element(RatVec{Rational(1, 4)})});
    CHECK(D.divide(one, 3).empty());
    CHECK(D.divide(Element(RatVec{Rational(3, 2)}), 3) ==
          std::vector<Element>{Element(RatVec{Rational(1, 2)})});
    CHECK(D.declared_divisibility(2) == DeclaredDivisibility::Divisible);
    CHECK(D.declared_divisibility(8) == DeclaredDivisibility::Divisible);
    CHECK(D.declared_divisibility(6) == DeclaredDivisibility::NotDivisible);
    // window of halves: {-1, -1/2, 0, 1/2, 1}
    CHECK(D.enumerate(Window{.radius = 1, .denom_log2 = 1}).size() == 5);
    check_laws(D, Window{.radius = 1, .denom_log2 = 1});
    check_divide_roundtrip(D, Window{.radius = 1, .denom_log2 = 1}, 8);
}

TEST_CASE("finite cyclic products: torsion division") {
    FiniteCyclic Z4({4});
    // 2x = 2 has the two solutions 1 and 3 mod 4
    auto sols = Z4.divide(make_int_vec({2}), 2);
    REQUIRE(sols.size() == 2);
    CHECK(sols[0] == make_int_vec({1}));
    CHECK(sols[1] == make_int_vec({3}));
    CHECK(Z4.divide(make_int_vec({1}), 2).empty());
    CHECK(nth_multiple(make_int_vec({4}), 0, FiniteCyclic({6})) == make_int_vec({0}));
    CHECK(Z4.exponent() == 4);
    CHECK(FiniteCyclic({4, 6}).exponent() == 12);
    CHECK(Z4.enumerate({}).size() == 4);
    CHECK(FiniteCyclic({2, 3}).enumerate({}).size() == 6);
    check_laws(Z4, {});
    check_divide_roundtrip(Z4, {}, 8);
    check_laws(FiniteCyclic({2, 3}), {});
}

TEST_CASE("rationals mod 1: n preimages under multiplication by n") {
    RationalsMod1 Q;
    Element half(RatVec{Rational(1, 2)});
    auto sols = Q.divide(half, 3);
    REQUIRE(sols.size() == 3);
    for (const auto& s : sols) CHECK(nth_multiple(s, 3, Q) == half);
    CHECK(Q.negate(half) == half);
    CHECK(Q.negate(Element(RatVec{Rational(1, 3)})) == Element(RatVec{Rational(2, 3)}));
    CHECK(Q.enumerate(Window{.denominator = 6}).size() == 6);
    check_laws(Q, Window{.denominator = 4});
    check_divide_roundtrip(Q, Window{.denominator = 4}, 6);
}

TEST_CASE("symmetric-difference group: every element is an involution") {
    SetAlgebraGroup G(3);
    Element A(Bits{0b101});
    for (long long n = 1; n <= 5; ++n) {
        CHECK(nth_multiple(A, 2 * n, G) == G.zero());
        CHECK(nth_multiple(A, 2 * n - 1, G) == A);
    }
    CHECK(G.divide(A, 3) == std::vector<Element>{A});
    CHECK(G.divide(A, 2).empty());
    CHECK(G.divide(G.zero(), 2).size() == 8);  // all 2^3 subsets
    CHECK(G.exponent() == 2);
    check_laws(G, {});
    check_divide_roundtrip(G, {}, 8);
    CHECK_THROWS(SetAlgebraGroup(25));
}

TEST_CASE("meet semilattice: table validation and idempotent division") {
    // chain 0 < 1 < 2 with meet = min; top (unit) is index 2
    std::vector<std::vector<int>> chain = {{0, 0, 0}, {0, 1, 1}, {0, 1, 2}};
    MeetSemilattice M(chain);
    CHECK(M.zero() == Element(Node{2}));
    CHECK(M.add(Element(Node{0}), Element(Node{1})) == Element(Node{0}));
    CHECK(M.divide(Element(Node{1}), 5) == std::vector<Element>{Element(Node{1})});
    CHECK(!M.is_group());
    check_laws(M, {});
    check_divide_roundtrip(M, {}, 8);

    std::vector<std::vector<int>> not_idem = {{1, 0}, {0, 1}};
    CHECK_THROWS(MeetSemilattice(not_idem));
    std::vector<std::vector<int>> no_top = {{0, 0}, {0, 0}};
    CHECK_THROWS(MeetSemilattice(no_top));
}

TEST_CASE("arctan semigroup: closed-form n-fold sums match iterated addition") {
    ArctanSemigroup A;
    for (double a : {0.0, 0.3, 0.9, 1.0, 1.5, 3.0}) {
        for (long long n = 1; n <= 6; ++n) {
            Element it = A.zero();
            for (long long k = 0; k < n; ++k) it = A.add(it, Element(Real{a}));
            CHECK(std::abs(it.real().v - arctan_n_fold(a, n)) <= 1e-9);
        }
    }
    // 3a = (3a + a^3) / (1 + 3a^2)
    double a = 0.4;
    CHECK(std::abs(arctan_n_fold(a, 3) - (3 * a + a * a * a) / (1 + 3 * a * a)) <= 1e-12);
    // 2-fold sums never exceed 1, so 2.0 has no half
    CHECK(A.divide(Element(Real{2.0}), 2).empty());
    auto third = A.divide(Element(Real{2.0}), 3);
    REQUIRE(third.size() == 1);
    CHECK(std::abs(arctan_n_fold(third[0].real().v, 3) - 2.0) <= 1e-9);
    check_divide_roundtrip(A, Window{.real_max = 2.0, .real_step = 0.25}, 5);
}

TEST_CASE("divisibility probes match the taxonomy") {
    Window dw{.radius = 2, .denom_log2 = 2};
    DyadicRationals D(1);
    CHECK(std::holds_alternative<ProbeDivisible>(probe_divisibility(D, 2, dw)));
    auto r3 = probe_divisibility(D, 3, dw);
    REQUIRE(std::holds_alternative<ProbeNotDivisible>(r3));

    SetAlgebraGroup G(3);
    CHECK(std::holds_alternative<ProbeDivisible>(probe_divisibility(G, 3, {})));
    CHECK(std::holds_alternative<ProbeNotDivisible>(probe_divisibility(G, 2, {})));

    ArctanSemigroup A;
    Window aw{.real_max = 2.0, .real_step = 0.5};
    CHECK(std::holds_alternative<ProbeNotDivisible>(probe_divisibility(A, 2, aw)));
    CHECK(std::holds_alternative<ProbeNotDivisible>(probe_divisibility(A, 4, aw)));
    CHECK(std::holds_alternative<ProbeDivisible>(probe_divisibility(A, 3, aw)));
    CHECK(std::holds_alternative<ProbeDivisible>(probe_divisibility(A, 5, aw)));

    RationalsMod1 Q;
    Window qw{.denominator = 6};
    for (long long n = 2; n <= 8; ++n)
        CHECK(std::holds_alternative<ProbeDivisible>(probe_divisibility(Q, n, qw)));

    // p-semidivisible: p^l division stays solvable (l <= 3)
    for (const auto& y : D.enumerate(dw))
        for (long long l = 1; l <= 3; ++l)
            CHECK(!D.divide(y, 1LL << l).empty());
}
