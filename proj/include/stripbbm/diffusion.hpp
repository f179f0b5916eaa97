#pragma once

#include <memory>
#include <vector>

#include "stripbbm/profile.hpp"
#include "stripbbm/rng.hpp"

namespace stripbbm {

enum class MotionKind {
    KilledDrifted,  // drift -mu, killed at 0 and K
    Conditioned,    // drift (pi/K) cot(pi x/K), never exits
    Red,            // drift -(mu + p'/(1-p)), killed at 0 and K
    Blue,           // drift p'/p - mu, never exits
};

class MotionSpec {
public:
    static MotionSpec killed_drifted(const ModelParams& params, double K);
    static MotionSpec conditioned(const ModelParams& params, double K);
    static MotionSpec red(std::shared_ptr<const SurvivalProfile> profile);
    static MotionSpec blue(std::shared_ptr<const SurvivalProfile> profile);

    MotionKind kind() const { return kind_; }
    const ModelParams& params() const { return params_; }
    double K() const { return K_; }
    const SurvivalProfile* profile() const { return profile_.get(); }

    double drift(double x) const;
    bool kills() const { return kind_ == MotionKind::KilledDrifted || kind_ == MotionKind::Red; }

private:
    MotionSpec(MotionKind kind, ModelParams params, double K,
               std::shared_ptr<const SurvivalProfile> profile);

    MotionKind kind_;
    ModelParams params_;
    double K_;
    std::shared_ptr<const SurvivalProfile> profile_;
};

struct StepOutcome {
    enum class Status { Alive, KilledAt0, KilledAtK };
    Status status = Status::Alive;
    double position = 0.0;  // valid when alive
    double elapsed = 0.0;   // time actually advanced (may be < requested dt)
};

// One Euler-Maruyama update. Killed motions apply the Brownian-bridge
// crossing correction exp(-2 d0 d0'/dt) per boundary; singular-drift motions
// shrink the step near the boundary instead and never kill.
StepOutcome step(const MotionSpec& motion, double x, double dt, RngStream& rng);

struct OccupationHistogram {
    std::vector<double> time_fraction;      // occupation fraction per bin
    std::vector<long long> sample_counts;   // positions sampled every sample_spacing
    double sample_spacing = 0.0;
    double total_time = 0.0;
    double K = 0.0;
};

// Occupation measure of one trajectory of duration T over `bins` equal cells
// of [0,K]. Also collects positions at multiples of sample_spacing, spaced
// far enough apart to be treated as independent draws in chi-square tests.
OccupationHistogram sample_occupation(const MotionSpec& motion, double x0, double T,
                                      int bins, double dt, RngStream& rng,
                                      double sample_spacing = 1.0);

}  // namespace stripbbm
