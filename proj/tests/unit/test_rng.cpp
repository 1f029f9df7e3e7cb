#include <doctest.h>

#include <set>
#include <vector>

#include "timelinekit/rng.hpp"

using namespace timelinekit;

TEST_SUITE("rng") {

TEST_CASE("seeding is deterministic and sensitive") {
    Rng a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
    bool differs = false;
    Rng a2(42);
    for (int i = 0; i < 100; ++i) differs |= a2.uniform() != c.uniform();
    CHECK(differs);
    CHECK(derive_seed(1, 2) != derive_seed(1, 3));
    CHECK(derive_seed(1, 2) != derive_seed(2, 2));
    CHECK(derive_seed(1, 2) == derive_seed(1, 2));
    CHECK(mix_seed(7, 9) == mix_seed(7, 9));
}

TEST_CASE("uniform bounds") {
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        double v = rng.uniform(2.0, 5.0);
        CHECK(v >= 2.0);
        CHECK(v < 5.0);
    }
}

TEST_CASE("uniform_int covers its inclusive range") {
    Rng rng(9);
    std::set<int> seen;
    for (int i = 0; i < 1000; ++i) {
        int v = rng.uniform_int(0, 3);
        CHECK(v >= 0);
        CHECK(v <= 3);
        seen.insert(v);
    }
    CHECK(seen.size() == 4);
}

TEST_CASE("chance extremes and rough frequency") {
    Rng rng(11);
    for (int i = 0; i < 100; ++i) {
        CHECK_FALSE(rng.chance(0.0));
        CHECK(rng.chance(1.0));
    }
    int hits = 0;
    for (int i = 0; i < 10000; ++i) hits += rng.chance(0.3) ? 1 : 0;
    CHECK(hits > 2700);
    CHECK(hits < 3300);
}

TEST_CASE("truncated_normal stays within bounds") {
    Rng rng(13);
    for (int i = 0; i < 2000; ++i) {
        double v = rng.truncated_normal(0.9, 0.05, 0.0, 1.0);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    // Zero sigma collapses to the mean.
    CHECK(rng.truncated_normal(0.45, 0.0, 0.0, 1.0) == doctest::Approx(0.45));
}

TEST_CASE("pick and shuffle are deterministic per seed") {
    std::vector<int> items{1, 2, 3, 4, 5};
    Rng a(3), b(3);
    for (int i = 0; i < 20; ++i) CHECK(a.pick(items) == b.pick(items));
    std::vector<int> s1 = items, s2 = items;
    Rng c(3), d(3);
    c.shuffle(s1);
    d.shuffle(s2);
    CHECK(s1 == s2);
}

}  // TEST_SUITE
