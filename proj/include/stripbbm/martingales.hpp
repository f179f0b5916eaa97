#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "stripbbm/bvp.hpp"
#include "stripbbm/sim.hpp"

namespace stripbbm {

enum class MartingaleKind {
    Upsilon,            // single-particle sin(pi x/K) e^{mu x + (mu^2/2 + pi^2/2K^2) t}
    ZK,                 // sum over particles of e^{mu x - lambda(K) t} sin(pi x/K)
    ProductExtinction,  // prod (1 - p_K(x_u(t)))
    Mfstar,             // sum f*(x_u(t)) e^{-lambda(K) t} on backbone runs
    Mone,               // sum e^{-int F^B'(1, x_u(s)) ds} on backbone runs
};

struct MartingaleSpec {
    MartingaleKind kind;
    ModelParams params;
    double K = 0.0;
    std::shared_ptr<const SurvivalProfile> profile;  // required except Upsilon/ZK
};

class MartingaleEvaluator {
public:
    explicit MartingaleEvaluator(MartingaleSpec spec);

    // value of the functional on a population snapshot
    double operator()(const Snapshot& snapshot) const;
    // deterministic value for a single root particle at x0, time 0
    double initial_value(double x0) const;

    const MartingaleSpec& spec() const { return spec_; }

private:
    MartingaleSpec spec_;
    double lambda_ = 0.0;
    SpatialFn fstar_;  // populated for Mfstar
};

struct MeanTestPoint {
    double t = 0.0;
    double mean = 0.0;
    double se = 0.0;
    double z = 0.0;
};

enum class TestVerdict { Pass, Fail, Inconclusive };

struct MeanTestReport {
    std::vector<MeanTestPoint> points;
    double reference = 0.0;
    double censored_fraction = 0.0;
    TestVerdict verdict = TestVerdict::Fail;
};

// Monte Carlo mean-constancy test: PASS when |mean(t) - reference| <= 3 se at
// every listed time (the 3-sigma threshold doubles as a Bonferroni guard over
// the handful of times). Replicate r comes from generator(r); truncated runs
// are censored and the test is inconclusive when they exceed 1%.
MeanTestReport martingale_mean_test(const MartingaleEvaluator& evaluator,
                                    const std::function<RunResult(std::size_t)>& generator,
                                    const std::vector<double>& times,
                                    std::size_t replicates, double reference,
                                    int threads = 1);

}  // namespace stripbbm
