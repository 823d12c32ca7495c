#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "dube/rng.hpp"

using dube::Rng;

TEST_CASE("same seed gives the same stream")
{
    Rng a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        CHECK(x == b());
        differs = differs || x != c();
    }
    CHECK(differs);
}

TEST_CASE("derived streams are independent of parent use")
{
    Rng root(7);
    const Rng fresh(7);
    for (int i = 0; i < 10; ++i) {
        root();
    }
    Rng a = root.derive({3, 1});
    Rng b = fresh.derive({3, 1});
    for (int i = 0; i < 20; ++i) {
        CHECK(a() == b());
    }
    CHECK(fresh.derive_seed({3, 1}) != fresh.derive_seed({1, 3}));
    CHECK(fresh.derive_seed({3, 1}) != fresh.derive_seed({3}));
    CHECK(fresh.derive({3, 1}).seed() == fresh.derive_seed({3, 1}));
}

TEST_CASE("uniform lies in [0, 1) with mean near one half")
{
    Rng rng(1);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(sum / 100000.0 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("index covers its range evenly")
{
    Rng rng(2);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) {
        const auto k = rng.index(7);
        REQUIRE(k < 7);
        ++counts[k];
    }
    for (int c : counts) {
        CHECK(std::abs(c - 10000) < 500);
    }
    CHECK(rng.index(1) == 0);
}

TEST_CASE("normal draws have unit moments")
{
    Rng rng(3);
    const int n = 200000;
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        s1 += z;
        s2 += z * z;
    }
    CHECK(std::abs(s1 / n) < 0.01);
    CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.015));
    CHECK(rng.normal(5.0, 0.0) == 5.0);
}
