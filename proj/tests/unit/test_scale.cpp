#include <doctest.h>

#include <cmath>
#include <vector>

#include "timelinekit/errors.hpp"
#include "timelinekit/scale.hpp"

using namespace timelinekit;

TEST_SUITE("scale") {

TEST_CASE("from_times validation") {
    CHECK_THROWS_AS(ScaleDomain::from_times({}), DegenerateInput);
    CHECK_THROWS_AS(ScaleDomain::from_times({3.0, 1.0}), DegenerateInput);
    ScaleDomain d = ScaleDomain::from_times({2000, 2005, 2010});
    CHECK(d.t0 == doctest::Approx(2000));
    CHECK(d.t1 == doctest::Approx(2010));
    CHECK(d.n == 3);
}

TEST_CASE("chronological is affine") {
    ScaleDomain d = ScaleDomain::from_times({2000, 2005, 2010});
    CHECK(scale_position(2000, Scale::Chronological, d, 400) == doctest::Approx(0));
    CHECK(scale_position(2005, Scale::Chronological, d, 400) == doctest::Approx(200));
    CHECK(scale_position(2010, Scale::Chronological, d, 400) == doctest::Approx(400));
    CHECK(scale_position(2001, Scale::Chronological, d, 400) == doctest::Approx(40));
    // Relative shares the affine mapping over the same domain.
    CHECK(scale_position(2005, Scale::Relative, d, 400) == doctest::Approx(200));
}

TEST_CASE("logarithmic compresses from the domain start") {
    ScaleDomain d = ScaleDomain::from_times({0, 9, 99});
    CHECK(scale_position(0, Scale::Logarithmic, d, 100) == doctest::Approx(0));
    CHECK(scale_position(99, Scale::Logarithmic, d, 100) == doctest::Approx(100));
    // log1p(9)/log1p(99) = ln10 / ln100 = 1/2 exactly.
    CHECK(scale_position(9, Scale::Logarithmic, d, 100) == doctest::Approx(50));
}

TEST_CASE("sequential maps indices to equal slots") {
    ScaleDomain d;
    d.n = 5;
    CHECK(scale_position(0, Scale::Sequential, d, 100) == doctest::Approx(0));
    CHECK(scale_position(1, Scale::Sequential, d, 100) == doctest::Approx(25));
    CHECK(scale_position(4, Scale::Sequential, d, 100) == doctest::Approx(100));
}

TEST_CASE("sequential-interim equals chronological at event times for linear data") {
    ScaleDomain d = ScaleDomain::from_times({0, 10, 40});
    for (double t : {0.0, 10.0, 40.0}) {
        CHECK(scale_position(t, Scale::SequentialInterim, d, 300) ==
              doctest::Approx(scale_position(t, Scale::Chronological, d, 300)));
    }
    CHECK(scale_position(10, Scale::SequentialInterim, d, 300) == doctest::Approx(75));
}

TEST_CASE("monotone non-decreasing over the domain") {
    ScaleDomain d = ScaleDomain::from_times({1, 4, 9, 16});
    for (Scale s : {Scale::Chronological, Scale::Relative, Scale::Logarithmic,
                    Scale::SequentialInterim}) {
        double prev = -1;
        for (double t = 1.0; t <= 16.0; t += 0.25) {
            double p = scale_position(t, s, d, 500);
            CHECK(p >= prev - 1e-9);
            CHECK(p >= -1e-9);
            CHECK(p <= 500 + 1e-9);
            prev = p;
        }
    }
}

TEST_CASE("degenerate domains map to the range midpoint") {
    ScaleDomain single = ScaleDomain::from_times({7});
    CHECK(scale_position(7, Scale::Chronological, single, 100) == doctest::Approx(50));
    CHECK(scale_position(7, Scale::SequentialInterim, single, 100) == doctest::Approx(50));
    ScaleDomain one;
    one.n = 1;
    CHECK(scale_position(0, Scale::Sequential, one, 100) == doctest::Approx(50));
}

TEST_CASE("out-of-domain values throw") {
    ScaleDomain d = ScaleDomain::from_times({2000, 2010});
    CHECK_THROWS_AS(scale_position(1999, Scale::Chronological, d, 100), DomainError);
    CHECK_THROWS_AS(scale_position(2011, Scale::Chronological, d, 100), DomainError);
    ScaleDomain sd;
    sd.n = 3;
    CHECK_THROWS_AS(scale_position(3, Scale::Sequential, sd, 100), DomainError);
    CHECK_THROWS_AS(scale_position(-1, Scale::Sequential, sd, 100), DomainError);
}

}  // TEST_SUITE
