#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bht/dyadic.hpp"

using namespace bht;

TEST_CASE("grid_interval produces exact endpoints") {
    auto I = grid_interval(3, 0, 0, 0, 0);
    CHECK(I.lo() == Rational(0));
    CHECK(I.hi() == Rational(1));

    auto J = grid_interval(3, 0, 1, 2, 0);
    CHECK(J.lo() == Rational(4, 3));
    CHECK(J.hi() == Rational(16, 3));
    CHECK(J.length() == Rational(4));

    CHECK_THROWS_AS(grid_interval(3, 1, 0, 0, 5), parameter_error);
    CHECK_THROWS_AS(grid_interval(4, 0, 0, 0, 0), parameter_error);
    CHECK_THROWS_AS(grid_interval(3, 0, 3, 0, 0), parameter_error);
}

TEST_CASE("endpoint reconstruction is exact for random grid parameters") {
    // 2^i (l + L/M) rebuilt from the rational endpoints, no floating point
    for (int M : {3, 5, 9}) {
        for (int i = -6; i <= 6; ++i) {
            int j = ((i % (M - 1)) + (M - 1)) % (M - 1);
            for (int L = 0; L < M; ++L) {
                for (long l : {-17L, -1L, 0L, 3L, 64L}) {
                    auto I = grid_interval(M, j, L, i, BigInt(l));
                    Rational expect = pow2(i) * (Rational(l) + Rational(L, M));
                    CHECK(I.lo() == expect);
                    CHECK(I.hi() - I.lo() == pow2(i));
                }
            }
        }
    }
}

TEST_CASE("dilate is center preserving and exact") {
    auto I = standard_interval(0, 0); // [0,1]
    auto D = dilate(I, Rational(2));
    CHECK(D.lo == Rational(-1, 2));
    CHECK(D.hi == Rational(3, 2));

    auto J = grid_interval(3, 0, 1, 2, 0); // [4/3, 16/3]
    auto E = dilate(J, Rational(1));
    CHECK(E.lo == Rational(4, 3));
    CHECK(E.hi == Rational(16, 3));

    auto W = dilate(I, Rational(3000));
    CHECK(W.lo == Rational(-2999, 2));
    CHECK(W.hi == Rational(3001, 2));

    CHECK_THROWS_AS(dilate(I, Rational(0)), parameter_error);
}

TEST_CASE("dilation composes multiplicatively") {
    auto I = grid_interval(5, 1, 3, 1, -7).interval();
    Rational a(7, 5), b(3, 11);
    auto lhs = dilate(dilate(I, a), b);
    auto rhs = dilate(I, a * b);
    CHECK(lhs.lo == rhs.lo);
    CHECK(lhs.hi == rhs.hi);
}

TEST_CASE("separation predicate") {
    auto a = standard_interval(0, 0); // [0,1]
    auto b = standard_interval(0, 2); // [2,3]
    auto c = standard_interval(0, 5); // [5,6]
    CHECK(separation_ok(a, a, 2));
    CHECK_FALSE(separation_ok(a, b, 2)); // dist 1 < 4
    CHECK(separation_ok(a, c, 2));       // dist 4 >= 4
    auto wide = standard_interval(1, 0);
    CHECK_THROWS_AS(separation_ok(a, wide, 2), parameter_error);
}

TEST_CASE("standard grid intervals are nested or disjoint") {
    std::vector<DyadicInterval> all;
    for (int i = -8; i <= 8; ++i)
        for (long l = -64; l <= 64; ++l) all.push_back(standard_interval(i, BigInt(l)));
    std::size_t violations = 0;
    for (std::size_t p = 0; p < all.size(); ++p) {
        auto Ip = all[p].interval();
        for (std::size_t q = p + 1; q < all.size(); ++q) {
            auto Iq = all[q].interval();
            // open-interior intersection without containment
            bool overlap = Ip.lo < Iq.hi && Iq.lo < Ip.hi;
            if (overlap && !Ip.contains(Iq) && !Iq.contains(Ip)) ++violations;
        }
    }
    CHECK(violations == 0);
}

TEST_CASE("squares: equal sides enforced, enumeration counts") {
    CHECK_THROWS_AS(DyadicSquare(standard_interval(0, 0), standard_interval(1, 0)), parameter_error);
    RationalRect unit{RationalInterval(0, 1), RationalInterval(0, 1)};
    auto sq = squares_in_rect(-2, unit);
    CHECK(sq.size() == 16);
    for (const auto& s : sq) CHECK(s.side() == Rational(1, 4));
}

TEST_CASE("grid params validation") {
    GridParams p;
    p.validate();
    p.J = 0;
    CHECK_THROWS_AS(p.validate(), parameter_error);
    p.J = 2;
    p.C0 = 10;
    CHECK_THROWS_AS(p.validate(), parameter_error);
}

TEST_CASE("torus distance") {
    CHECK(torus_dist(Rational(1, 8), Rational(7, 8), Rational(1)) == Rational(1, 4));
    CHECK(torus_dist(Rational(0), Rational(1, 2), Rational(1)) == Rational(1, 2));
}
