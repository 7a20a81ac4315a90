#include <doctest.h>

#include "gns/errors.hpp"
#include "gns/rng.hpp"
#include "gns/sampling.hpp"
#include "gns/sets_1d.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace gns;

namespace {
IntervalUnion U(std::vector<Interval> v) { return IntervalUnion(std::move(v)); }
}

TEST_CASE("construction invariants") {
    auto s = U({{2, 3}, {-1, 0.5}, {0.4, 1.0}, {5, 5}});
    REQUIRE(s.size() == 2);
    CHECK(s.intervals()[0].lo == -1);
    CHECK(s.intervals()[0].hi == 1.0);
    CHECK(s.intervals()[1].lo == 2);
    CHECK_THROWS_AS(U({{1, 0}}), DomainError);
    CHECK_THROWS(U({{std::nan(""), 1.0}}));
    std::vector<Interval> many;
    for (int i = 0; i < 65; ++i) many.push_back({2.0 * i, 2.0 * i + 1});
    CHECK_THROWS(U(many));
    // gaps below 1e-12 merge, and re-normalizing is a fixed point
    auto m = U({{0, 1}, {1 + 1e-13, 2}});
    CHECK(m.size() == 1);
    CHECK(U(m.intervals()).intervals().size() == m.size());
    CHECK(U(m.intervals()).hash() == m.hash());
}

TEST_CASE("measure examples") {
    CHECK(measure(IntervalUnion::parse("(-inf,0]")) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(measure(IntervalUnion{}) == 0.0);
    auto s = IntervalUnion::parse("(-inf,0];[1,2]");
    double ref = 0.5 + oracle::gauss_legendre(oracle::dens, 1.0, 2.0);
    CHECK(std::abs(measure(s) - ref) < 1e-14);
    CHECK(std::abs(measure(s) - 0.6359051) < 1e-7);
    CHECK(measure(IntervalUnion::full_line()) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("barycenter examples") {
    CHECK(barycenter(IntervalUnion::parse("(-inf,0]")) == doctest::Approx(-kInvSqrt2Pi).epsilon(1e-15));
    CHECK(std::abs(barycenter(IntervalUnion::parse("(-1,1)"))) < 1e-16);
    CHECK(barycenter(IntervalUnion::parse("[0,inf)")) == doctest::Approx(kInvSqrt2Pi).epsilon(1e-15));
    auto s = IntervalUnion::parse("[-2,-0.5];[0.3,1.7]");
    double ref = oracle::gauss_legendre([](double x) { return x * oracle::dens(x); }, -2, -0.5) +
                 oracle::gauss_legendre([](double x) { return x * oracle::dens(x); }, 0.3, 1.7);
    CHECK(std::abs(barycenter(s) - ref) < 1e-14);
}

TEST_CASE("boundary examples") {
    auto b = boundary(IntervalUnion::parse("(-inf,0]"));
    REQUIRE(b.size() == 1);
    CHECK(b[0].location == 0);
    CHECK(b[0].normal == 1);
    auto c = boundary(IntervalUnion::parse("[1,2]"));
    REQUIRE(c.size() == 2);
    CHECK(c[0].location == 1);
    CHECK(c[0].normal == -1);
    CHECK(c[1].normal == 1);
    auto d = boundary(IntervalUnion::parse("(-inf,0];[3.5,inf)"));
    REQUIRE(d.size() == 2);
    CHECK(d[0].normal == 1);
    CHECK(d[1].location == 3.5);
    CHECK(d[1].normal == -1);
    CHECK(boundary(IntervalUnion::full_line()).empty());
}

TEST_CASE("half spaces") {
    auto h = halfspace_with_measure(0.5, true);
    CHECK(h.threshold == 0.0);
    CHECK(h.side == HalfSide::right_ray);
    auto h8 = halfspace_with_measure(0.8, true);
    CHECK(std::abs(h8.threshold - oracle::phi_inv(0.2)) < 1e-12);
    CHECK(std::abs(h8.threshold + 0.8416212335729143) < 1e-12);
    for (int i = 1; i <= 9; ++i) {
        double a = 0.1 * i;
        CHECK(std::abs(measure(IntervalUnion::from(halfspace_with_measure(a, true))) - a) < 1e-13);
        CHECK(std::abs(measure(IntervalUnion::from(halfspace_with_measure(a, false))) - a) < 1e-13);
        CHECK(barycenter(IntervalUnion::from(halfspace_with_measure(a, true))) > 0);
        CHECK(barycenter(IntervalUnion::from(halfspace_with_measure(a, false))) < 0);
    }
    CHECK_THROWS_AS(halfspace_with_measure(0.0, true), DomainError);
    CHECK_THROWS_AS(halfspace_with_measure(1.0, false), DomainError);
}

TEST_CASE("symmetric difference examples") {
    auto s = IntervalUnion::parse("[-1,2];[3,4]");
    CHECK(symmetric_difference_measure(s, s) == 0.0);
    CHECK(symmetric_difference_measure(IntervalUnion::parse("(-inf,0]"), IntervalUnion::parse("[0,inf)")) ==
          doctest::Approx(1.0).epsilon(1e-15));
    double d = symmetric_difference_measure(IntervalUnion::parse("(-inf,0]"), IntervalUnion::parse("(-inf,1]"));
    CHECK(std::abs(d - oracle::gauss_legendre(oracle::dens, 0, 1)) < 1e-14);
    CHECK(std::abs(d - 0.3413447) < 1e-7);
}

TEST_CASE("set algebra") {
    auto a = IntervalUnion::parse("[-1,1];[2,3]");
    auto b = IntervalUnion::parse("[0,2.5]");
    CHECK(set_intersection(a, b).to_string() == "[0,1];[2,2.5]");
    CHECK(set_union(a, b).to_string() == "[-1,3]");
    CHECK(set_difference(a, b).to_string() == "[-1,0];[2.5,3]");
    CHECK(complement(IntervalUnion{}).to_string() == IntervalUnion::full_line().to_string());
    CHECK(complement(IntervalUnion::full_line()).empty());
}

TEST_CASE("parse and print") {
    CHECK(IntervalUnion::parse("").empty());
    CHECK(IntervalUnion::parse("{}").empty());
    CHECK(IntervalUnion::parse("empty").empty());
    CHECK(IntervalUnion{}.to_string() == "{}");
    CHECK_THROWS_AS(IntervalUnion::parse("garbage"), ParseError);
    CHECK_THROWS_AS(IntervalUnion::parse("[1,0]"), ParseError);
    CHECK_THROWS_AS(IntervalUnion::parse("[0,1,2]"), ParseError);
    CHECK_THROWS_AS(IntervalUnion::parse("[a,1]"), ParseError);
    auto s = IntervalUnion::parse("(-inf, -0.1] ; [0.1234567890123456789, inf)");
    CHECK(s.size() == 2);
    CHECK(std::isinf(s.intervals()[0].lo));
    CHECK(perimeter(s) == doctest::Approx(oracle::dens(0.1) + oracle::dens(0.1234567890123456789)).epsilon(1e-14));
}

TEST_CASE("random set properties") {
    CounterRng rng(11);
    for (int i = 0; i < 300; ++i) {
        auto s = random_interval_union(rng, 4, -4, 4);
        auto c = complement(s);
        CHECK(std::abs(measure(c) - (1.0 - measure(s))) < 1e-13);
        CHECK(std::abs(barycenter(c) + barycenter(s)) < 1e-13);
        auto bs = boundary(s), bc = boundary(c);
        REQUIRE(bs.size() == bc.size());
        for (size_t k = 0; k < bs.size(); ++k) {
            CHECK(bs[k].location == bc[k].location);
            CHECK(bs[k].normal == -bc[k].normal);
        }
        // printing round trip
        auto back = IntervalUnion::parse(s.to_string());
        CHECK(symmetric_difference_measure(s, back) < 1e-12);
        CHECK(back.hash() == s.hash());
    }
}

TEST_CASE("random sets with prescribed measure") {
    CounterRng rng(5);
    for (double a : {0.2, 0.5, 0.8})
        for (int i = 0; i < 50; ++i) CHECK(std::abs(measure(random_set_with_measure(rng, a, 3, -4, 4)) - a) < 1e-12);
}
