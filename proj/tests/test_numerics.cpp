#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "stripbbm/numerics.hpp"

using namespace stripbbm;

TEST_CASE("simpson integrates smooth functions to high order") {
    // int_0^1 sin(pi x) = 2/pi, on both even and odd interval counts
    for (int m : {101, 102}) {
        std::vector<double> y(static_cast<std::size_t>(m));
        const double h = 1.0 / (m - 1);
        for (int i = 0; i < m; ++i) y[static_cast<std::size_t>(i)] = std::sin(std::numbers::pi * i * h);
        CHECK(simpson(y, h) == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-8));
    }
}

TEST_CASE("fd_derivative4 is 4th order on exp") {
    auto max_err = [](int m) {
        std::vector<double> y(static_cast<std::size_t>(m));
        const double h = 1.0 / (m - 1);
        for (int i = 0; i < m; ++i) y[static_cast<std::size_t>(i)] = std::exp(i * h);
        const auto d = fd_derivative4(y, h);
        double e = 0.0;
        for (int i = 0; i < m; ++i)
            e = std::max(e, std::abs(d[static_cast<std::size_t>(i)] - std::exp(i * h)));
        return e;
    };
    const double e1 = max_err(51), e2 = max_err(101);
    CHECK(e1 / e2 > 12.0);  // halving h should shrink the error ~16x
    CHECK(e2 < 1e-7);
}

TEST_CASE("pchip interpolates data and preserves positivity") {
    // hump profile with zero endpoints, like a survival profile
    const int m = 41;
    std::vector<double> y(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        y[static_cast<std::size_t>(i)] = std::sin(std::numbers::pi * i / (m - 1.0));
    Pchip f(1.0, y);
    for (int i = 0; i < m; ++i)
        CHECK(f(i / (m - 1.0)) == doctest::Approx(y[static_cast<std::size_t>(i)]).epsilon(1e-12));
    for (double x = 0.001; x < 1.0; x += 0.001) {
        CHECK(f(x) >= 0.0);
        CHECK(f(x) <= 1.0 + 1e-12);
    }
    // accuracy on the smooth part
    CHECK(f(0.5005) == doctest::Approx(std::sin(std::numbers::pi * 0.5005)).epsilon(1e-4));
}

TEST_CASE("linear interp endpoints and midpoints") {
    LinearInterp f(2.0, {0.0, 1.0, 0.0});
    CHECK(f(0.0) == 0.0);
    CHECK(f(0.5) == doctest::Approx(0.5));
    CHECK(f(1.0) == doctest::Approx(1.0));
    CHECK(f(1.5) == doctest::Approx(0.5));
    CHECK(f(2.0) == 0.0);
}
