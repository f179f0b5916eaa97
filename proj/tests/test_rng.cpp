#include "doctest.h"

#include <cmath>

#include "stripbbm/rng.hpp"
#include "stripbbm/stats.hpp"

using namespace stripbbm;

TEST_CASE("streams are deterministic and keyed independently") {
    RngStream a(42, 7, 3), b(42, 7, 3), c(42, 7, 4);
    bool all_equal = true, any_differ = false;
    for (int i = 0; i < 64; ++i) {
        const auto va = a.next_u64();
        all_equal = all_equal && (va == b.next_u64());
        any_differ = any_differ || (va != c.next_u64());
    }
    CHECK(all_equal);
    CHECK(any_differ);
}

TEST_CASE("uniform stays inside the open interval") {
    RngStream rng(1);
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("normal moments") {
    RngStream rng(2024);
    MeanVar mv;
    for (int i = 0; i < 200000; ++i) mv.add(rng.normal());
    CHECK(std::abs(mv.mean()) < 4.0 * mv.std_error());
    CHECK(mv.variance() == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("exponential passes KS against its own law") {
    RngStream rng(5);
    std::vector<double> xs(20000);
    for (auto& x : xs) x = rng.exponential(2.5);
    const double d = ks_statistic(xs, [](double x) { return 1.0 - std::exp(-2.5 * x); });
    CHECK(ks_pvalue(d, xs.size()) > 0.01);
}
