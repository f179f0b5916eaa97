#include "doctest.h"

#include <cmath>

#include "stripbbm/rng.hpp"
#include "stripbbm/stats.hpp"

using namespace stripbbm;

TEST_CASE("chi2 survival function against known quantiles") {
    // classical table entries
    CHECK(chi2_sf(3.841, 1) == doctest::Approx(0.05).epsilon(1e-3));
    CHECK(chi2_sf(36.191, 19) == doctest::Approx(0.01).epsilon(2e-3));
    CHECK(chi2_sf(0.0, 5) == doctest::Approx(1.0));
}

TEST_CASE("regularized gamma identities") {
    for (double a : {0.5, 1.0, 3.5, 10.0}) {
        for (double x : {0.1, 1.0, 5.0, 20.0}) {
            CHECK(regularized_gamma_p(a, x) + regularized_gamma_q(a, x) ==
                  doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    // P(1,x) = 1 - e^{-x}
    CHECK(regularized_gamma_p(1.0, 2.0) == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("chi2 goodness of fit accepts its own distribution") {
    RngStream rng(99);
    std::vector<double> probs{0.1, 0.2, 0.3, 0.25, 0.15};
    std::vector<long long> counts(probs.size(), 0);
    for (int i = 0; i < 20000; ++i) {
        double u = rng.uniform();
        std::size_t k = 0;
        while (k + 1 < probs.size() && u > probs[k]) u -= probs[k], ++k;
        ++counts[k];
    }
    CHECK(chi2_goodness_of_fit(counts, probs).pvalue > 0.01);
}

TEST_CASE("chi2 goodness of fit rejects a shifted distribution") {
    RngStream rng(100);
    std::vector<double> probs{0.1, 0.2, 0.3, 0.25, 0.15};
    std::vector<double> wrong{0.3, 0.25, 0.2, 0.15, 0.1};
    std::vector<long long> counts(probs.size(), 0);
    for (int i = 0; i < 20000; ++i) {
        double u = rng.uniform();
        std::size_t k = 0;
        while (k + 1 < probs.size() && u > probs[k]) u -= probs[k], ++k;
        ++counts[k];
    }
    CHECK(chi2_goodness_of_fit(counts, wrong).pvalue < 1e-6);
}

TEST_CASE("two-sample chi2 on identical and different laws") {
    RngStream rng(7);
    auto draw = [&](const std::vector<double>& probs) {
        double u = rng.uniform();
        std::size_t k = 0;
        while (k + 1 < probs.size() && u > probs[k]) u -= probs[k], ++k;
        return k;
    };
    std::vector<double> p1{0.5, 0.3, 0.2};
    std::vector<double> p2{0.2, 0.3, 0.5};
    std::vector<long long> a(3, 0), b(3, 0), c(3, 0);
    for (int i = 0; i < 10000; ++i) {
        ++a[draw(p1)];
        ++b[draw(p1)];
        ++c[draw(p2)];
    }
    CHECK(chi2_two_sample(a, b).pvalue > 0.01);
    CHECK(chi2_two_sample(a, c).pvalue < 1e-6);
}

TEST_CASE("KS p-value sanity") {
    // for n = 1000, D about 0.019 is typical, D about 0.08 is extreme
    CHECK(ks_pvalue(0.019, 1000) > 0.3);
    CHECK(ks_pvalue(0.08, 1000) < 1e-4);
}
