#include "doctest.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "stripbbm/model.hpp"
#include "stripbbm/rng.hpp"

using namespace stripbbm;

namespace {
const double kPi = std::numbers::pi;

ModelParams dyadic_params(double mu, double beta) {
    return ModelParams(mu, beta, OffspringLaw::dyadic());
}
}  // namespace

TEST_CASE("critical width closed form and absence") {
    CHECK(*critical_width(dyadic_params(0.0, 1.0)) ==
          doctest::Approx(kPi / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(*critical_width(dyadic_params(1.0, 1.0)) == doctest::Approx(kPi).epsilon(1e-12));
    CHECK(!critical_width(dyadic_params(std::sqrt(2.0), 1.0)).has_value());

    // formula on random parameter sets, absence exactly on the sign condition
    RngStream rng(314);
    for (int i = 0; i < 50; ++i) {
        const double mu = 2.0 * rng.uniform();
        const double beta = 0.1 + 2.0 * rng.uniform();
        const auto law = OffspringLaw::from_probs(
            {{0, 0.1}, {2, 0.5}, {3, 0.4}});  // m = 2.2
        ModelParams params(mu, beta, law);
        const double radicand = 2.0 * (law.mean() - 1.0) * beta - mu * mu;
        const auto k0 = critical_width(params);
        if (radicand > 0.0) {
            REQUIRE(k0.has_value());
            CHECK(*k0 == doctest::Approx(kPi / std::sqrt(radicand)).epsilon(1e-12));
        } else {
            CHECK(!k0.has_value());
        }
    }
}

TEST_CASE("lambda rate values and monotonicity") {
    const auto params = dyadic_params(0.0, 1.0);
    const double K0 = *critical_width(params);
    CHECK(lambda_rate(params, K0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(lambda_rate(params, 1e9) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(lambda_rate(params, 1.05 * K0) ==
          doctest::Approx(1.0 - 1.0 / 1.1025).epsilon(1e-12));
    // cross-check lambda(K) = 1 - (K0/K)^2 at mu = 0
    CHECK(lambda_rate(params, 1.3 * K0) ==
          doctest::Approx(1.0 - 1.0 / 1.69).epsilon(1e-12));

    double prev = lambda_rate(params, 0.2 * K0);
    for (int i = 1; i <= 100; ++i) {
        const double K = (0.2 + 0.05 * i) * K0;
        const double lam = lambda_rate(params, K);
        CHECK(lam > prev);
        prev = lam;
    }
    CHECK_THROWS_AS(lambda_rate(params, 0.0), std::invalid_argument);
}

TEST_CASE("asymptotic constant values, limit, and linearity") {
    const auto p0 = dyadic_params(0.0, 1.0);
    const double K0 = *critical_width(p0);
    // at mu = 0 the formula reduces to (K - K0) 3 pi^3 / (8 beta K0^3)
    CHECK(asymptotic_constant(p0, 1.02 * K0) ==
          doctest::Approx(0.02 * K0 * 3.0 * std::sqrt(2.0) / 4.0).epsilon(1e-12));
    CHECK(asymptotic_constant(p0, 1.02 * K0) == doctest::Approx(0.047124).epsilon(1e-4));

    // C_K -> 0 as K -> K0+
    CHECK(asymptotic_constant(p0, K0 * (1.0 + 1e-12)) < 1e-11);

    const auto p1 = dyadic_params(1.0, 1.0);
    // K0 = pi here; both quadratic factors collapse to multiples of pi^2
    const double expected = 0.01 * 20.0 / (12.0 * (std::exp(kPi) + 1.0));
    CHECK(asymptotic_constant(p1, kPi + 0.01) == doctest::Approx(expected).epsilon(1e-12));

    // exact first-order linearity in K - K0
    const double eps = 0.013 * K0;
    CHECK(asymptotic_constant(p0, K0 + 2.0 * eps) ==
          doctest::Approx(2.0 * asymptotic_constant(p0, K0 + eps)).epsilon(1e-12));

    CHECK_THROWS_AS(asymptotic_constant(p0, 0.9 * K0), std::invalid_argument);
}

TEST_CASE("size-biased law") {
    const auto dyadic = OffspringLaw::dyadic();
    const auto sb = size_biased(dyadic);
    CHECK(sb.prob(1) == doctest::Approx(1.0).epsilon(1e-12));

    const auto law13 = OffspringLaw::from_probs({{1, 0.5}, {3, 0.5}});
    const auto sb13 = size_biased(law13);
    CHECK(sb13.prob(0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(sb13.prob(2) == doctest::Approx(0.75).epsilon(1e-12));

    const auto law02 = OffspringLaw::from_probs({{0, 0.2}, {2, 0.8}});
    CHECK(size_biased(law02).prob(1) == doctest::Approx(1.0).epsilon(1e-12));

    // invariant: sums to one, mean equals E[A(A-1)]/m by direct summation
    for (const auto& law : {dyadic, law13, law02,
                            OffspringLaw::from_probs({{0, 0.3}, {1, 0.1}, {4, 0.6}})}) {
        const auto biased = size_biased(law);
        double sum = 0.0, mean = 0.0;
        for (int k = 0; k <= biased.max_k(); ++k) {
            sum += biased.prob(k);
            mean += k * biased.prob(k);
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        double direct = 0.0;  // E[A(A-1)] by straight summation
        for (int k = 0; k <= law.max_k(); ++k) direct += k * (k - 1.0) * law.prob(k);
        CHECK(mean == doctest::Approx(direct / law.mean()).epsilon(1e-12));
    }
}

TEST_CASE("branching mechanism values and convexity") {
    const auto dyadic = OffspringLaw::dyadic();
    CHECK(branching_mechanism(dyadic, 1.0, 0.5) == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK(branching_mechanism(dyadic, 3.7, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
    const auto law02 = OffspringLaw::from_probs({{0, 0.2}, {2, 0.8}});
    CHECK(branching_mechanism(law02, 2.0, 0.0) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK_THROWS_AS(branching_mechanism(dyadic, 1.0, 1.5), std::invalid_argument);

    // F'(1) = (m-1) beta
    CHECK(branching_mechanism_prime(law02, 2.0, 1.0) ==
          doctest::Approx((law02.mean() - 1.0) * 2.0).epsilon(1e-12));

    // chord inequality on random triples
    RngStream rng(8);
    const auto law = OffspringLaw::from_probs({{0, 0.15}, {2, 0.45}, {5, 0.4}});
    for (int i = 0; i < 1000; ++i) {
        double s1 = rng.uniform(), s2 = rng.uniform(), s3 = rng.uniform();
        if (s1 > s2) std::swap(s1, s2);
        if (s2 > s3) std::swap(s2, s3);
        if (s1 > s2) std::swap(s1, s2);
        if (s3 - s1 < 1e-9) continue;
        const double f1 = branching_mechanism(law, 1.3, s1);
        const double f2 = branching_mechanism(law, 1.3, s2);
        const double f3 = branching_mechanism(law, 1.3, s3);
        const double chord = f1 + (f3 - f1) * (s2 - s1) / (s3 - s1);
        CHECK(f2 <= chord + 1e-12);
    }
}

TEST_CASE("offspring law validation") {
    CHECK_THROWS_AS(OffspringLaw::from_probs({{2, 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(OffspringLaw::from_probs({{-1, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(OffspringLaw::from_probs({{2, -1.0}, {3, 2.0}}), std::invalid_argument);
    // truncated law within tolerance renormalizes
    const auto law = OffspringLaw::from_probs({{2, 1.0 - 5e-13}}, 1e-12);
    CHECK(law.prob(2) == doctest::Approx(1.0).epsilon(1e-15));

    CHECK_THROWS_AS(ModelParams(0.0, -1.0, OffspringLaw::dyadic()), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(-0.5, 1.0, OffspringLaw::dyadic()), std::invalid_argument);
}

TEST_CASE("csbp mechanism mapping") {
    // psi(lambda) = -lambda + lambda^2: root 1, dyadic with beta 1
    CsbpMechanism quad{1.0, 1.0, {}};
    const auto mapped = map_csbp_mechanism(quad);
    CHECK(mapped.lambda_star == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(mapped.law.has_value());
    CHECK(mapped.beta == doctest::Approx(1.0));
    for (int i = 0; i <= 100; ++i) {
        const double s = i / 100.0;
        CHECK(mapped.F(s) ==
              doctest::Approx(branching_mechanism(OffspringLaw::dyadic(), 1.0, s))
                  .epsilon(1e-12));
    }

    // general quadratic: lambda* = alpha/b, F = alpha (s^2 - s)
    CsbpMechanism quad2{2.5, 0.5, {}};
    const auto mapped2 = map_csbp_mechanism(quad2);
    CHECK(mapped2.lambda_star == doctest::Approx(5.0).epsilon(1e-12));
    for (int i = 0; i <= 100; ++i) {
        const double s = i / 100.0;
        CHECK(mapped2.F(s) == doctest::Approx(2.5 * (s * s - s)).epsilon(1e-12));
    }

    // atomic jump component: root found by bracketing, F(1) = 0, F(0) = psi(l*)/l* = 0
    CsbpMechanism atomic{1.0, 0.25, {{0.5, 1.2}, {2.0, 0.3}}};
    const auto mapped3 = map_csbp_mechanism(atomic);
    CHECK(atomic.psi(mapped3.lambda_star) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(mapped3.F(1.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(mapped3.F(0.0)) < 1e-9);

    // alpha = 0: no supercritical root
    CHECK_THROWS_AS(map_csbp_mechanism(CsbpMechanism{0.0, 1.0, {}}), std::invalid_argument);
    // linear psi: no positive root
    CHECK_THROWS_AS(map_csbp_mechanism(CsbpMechanism{1.0, 0.0, {}}), std::invalid_argument);
}
