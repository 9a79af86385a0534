#include <catch2/catch_amalgamated.hpp>

#include "recurlab/rational.hpp"
#include "recurlab/real.hpp"

using namespace recurlab;

TEST_CASE("rational parsing and formatting") {
    CHECK(rat_to_string(rat_from_string("1/4")) == "1/4");
    CHECK(rat_to_string(rat_from_string("2/4")) == "1/2");
    CHECK(rat_to_string(rat_from_string("-3/6")) == "-1/2");
    CHECK(rat_to_string(rat_from_string("5")) == "5");
    CHECK_THROWS_AS(rat_from_string("1/0"), Error);
    CHECK_THROWS_AS(rat_from_string("abc"), Error);
    CHECK_THROWS_AS(rat_from_string(""), Error);
}

TEST_CASE("mod1 lands in [0,1)") {
    CHECK(mod1(rat(-1, 3)) == rat(2, 3));
    CHECK(mod1(rat(7, 3)) == rat(1, 3));
    CHECK(mod1(rat(3)) == 0);
    CHECK(mod1(rat(-5, 2)) == rat(1, 2));
}

TEST_CASE("floor and ceil") {
    CHECK(floor_long(rat(7, 2)) == 3);
    CHECK(floor_long(rat(-7, 2)) == -4);
    CHECK(ceil_long(rat(7, 2)) == 4);
    CHECK(ceil_long(rat(4)) == 4);
}

TEST_CASE("checked integer power guards") {
    CHECK(checked_ipow(16, 8) == 4294967296LL);
    CHECK_THROWS_AS(checked_ipow(10, 40), Error);
}

TEST_CASE("sin_pi_turns exact lattice points") {
    CHECK(sin_pi_turns(rat(0)).is_zero());
    CHECK(sin_pi_turns(rat(1, 2)) == Real(1L));
    CHECK(sin_pi_turns(rat(1)) == Real(0L));
    // sin(pi/6) = 1/2 to high precision
    CHECK(abs(sin_pi_turns(rat(1, 6)) - Real(0.5)) < Real(1e-30));
}

TEST_CASE("chord values") {
    CHECK(chord_turns(rat(1, 4), rat(1, 4)).is_zero());
    CHECK(chord_turns(rat(0), rat(1, 2)) == Real(2L));
    // |i - 1| = sqrt(2)
    CHECK(abs(chord_turns(rat(1, 4), rat(0)) - sqrt(Real(2L))) < Real(1e-30));
    // chord is symmetric and wraps
    CHECK(chord_turns(rat(7, 8), rat(1, 8)) == chord_turns(rat(1, 8), rat(7, 8)));
}

TEST_CASE("exact unit circle points") {
    auto q = unit_exact(rat(3, 4));
    REQUIRE(q.has_value());
    CHECK(q->first == 0);
    CHECK(q->second == -1);
    CHECK_FALSE(unit_exact(rat(1, 3)).has_value());
    auto [c, s] = unit_circle(rat(1, 3));
    CHECK(abs(c - Real(-0.5)) < Real(1e-30));
    CHECK(abs(s * s + c * c - Real(1L)) < Real(1e-30));
}

TEST_CASE("real comparisons and printing") {
    Real a(1.5), b(2L);
    CHECK(a < b);
    CHECK(b - a == Real(0.5));
    CHECK(Real(rat(1, 3)).str(8).substr(0, 4) == "0.33");
    CHECK(exp(Real(0L)) == Real(1L));
    CHECK(abs(log(exp(Real(1L))) - Real(1L)) < Real(1e-30));
}
