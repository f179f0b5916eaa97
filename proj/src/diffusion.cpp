#include "stripbbm/diffusion.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace stripbbm {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kBoundaryBuffer = 1e-12;  // relative to K
}  // namespace

MotionSpec::MotionSpec(MotionKind kind, ModelParams params, double K,
                       std::shared_ptr<const SurvivalProfile> profile)
    : kind_(kind), params_(std::move(params)), K_(K), profile_(std::move(profile)) {}

MotionSpec MotionSpec::killed_drifted(const ModelParams& params, double K) {
    if (K <= 0.0) throw std::invalid_argument("MotionSpec: K must be positive");
    return MotionSpec(MotionKind::KilledDrifted, params, K, nullptr);
}

MotionSpec MotionSpec::conditioned(const ModelParams& params, double K) {
    if (K <= 0.0) throw std::invalid_argument("MotionSpec: K must be positive");
    return MotionSpec(MotionKind::Conditioned, params, K, nullptr);
}

MotionSpec MotionSpec::red(std::shared_ptr<const SurvivalProfile> profile) {
    if (!profile || profile->is_trivial())
        throw std::invalid_argument("MotionSpec::red: requires a nontrivial profile");
    const ModelParams params = profile->params();
    const double K = profile->grid().K;
    return MotionSpec(MotionKind::Red, params, K, std::move(profile));
}

MotionSpec MotionSpec::blue(std::shared_ptr<const SurvivalProfile> profile) {
    if (!profile || profile->is_trivial())
        throw std::invalid_argument("MotionSpec::blue: requires a nontrivial profile");
    const ModelParams params = profile->params();
    const double K = profile->grid().K;
    return MotionSpec(MotionKind::Blue, params, K, std::move(profile));
}

double MotionSpec::drift(double x) const {
    switch (kind_) {
        case MotionKind::KilledDrifted:
            return -params_.mu;
        case MotionKind::Conditioned:
            return (kPi / K_) / std::tan(kPi * x / K_);
        case MotionKind::Red:
            return -(params_.mu + profile_->dp_at(x) / (1.0 - profile_->p_at(x)));
        case MotionKind::Blue:
            return profile_->dp_at(x) / profile_->p_at(x) - params_.mu;
    }
    return 0.0;
}

StepOutcome step(const MotionSpec& motion, double x, double dt, RngStream& rng) {
    const double K = motion.K();
    if (!(x > 0.0 && x < K)) throw std::invalid_argument("step: x must lie in (0,K)");
    if (dt <= 0.0) throw std::invalid_argument("step: dt must be positive");
    const double buffer = kBoundaryBuffer * K;

    const double b = motion.drift(x);
    double dt_eff = dt;
    const bool singular =
        motion.kind() == MotionKind::Conditioned || motion.kind() == MotionKind::Blue;
    if (singular) {
        const double dist = std::min(x, K - x);
        const double cap1 = dist / (4.0 * (std::abs(b) + 1.0));
        dt_eff = std::min(dt, std::min(cap1 * cap1, dist * dist / 16.0));
        dt_eff = std::max(dt_eff, 1e-12 * K * 1e-12 * K);  // hard floor
    }

    const double xp = x + b * dt_eff + std::sqrt(dt_eff) * rng.normal();

    if (singular) {
        if (xp <= buffer || xp >= K - buffer)
            throw std::runtime_error(
                "step: entrance-boundary diffusion reached the boundary (step-size bug?)");
        return {StepOutcome::Status::Alive, xp, dt_eff};
    }

    // killed motions: hard exit, then bridge-crossing test per boundary
    if (xp <= buffer) return {StepOutcome::Status::KilledAt0, 0.0, dt_eff};
    if (xp >= K - buffer) return {StepOutcome::Status::KilledAtK, 0.0, dt_eff};
    const double cross0 = std::exp(-2.0 * x * xp / dt_eff);
    if (rng.uniform() < cross0) return {StepOutcome::Status::KilledAt0, 0.0, dt_eff};
    const double crossK = std::exp(-2.0 * (K - x) * (K - xp) / dt_eff);
    if (rng.uniform() < crossK) return {StepOutcome::Status::KilledAtK, 0.0, dt_eff};
    return {StepOutcome::Status::Alive, xp, dt_eff};
}

OccupationHistogram sample_occupation(const MotionSpec& motion, double x0, double T,
                                      int bins, double dt, RngStream& rng,
                                      double sample_spacing) {
    if (bins < 2) throw std::invalid_argument("sample_occupation: need at least 2 bins");
    const double K = motion.K();
    OccupationHistogram h;
    h.time_fraction.assign(static_cast<std::size_t>(bins), 0.0);
    h.sample_counts.assign(static_cast<std::size_t>(bins), 0);
    h.sample_spacing = sample_spacing;
    h.total_time = T;
    h.K = K;

    auto bin_of = [&](double x) {
        int b = static_cast<int>(x / K * static_cast<double>(bins));
        return std::min(std::max(b, 0), bins - 1);
    };

    double x = x0;
    double t = 0.0;
    double next_sample = sample_spacing;
    while (t < T) {
        const StepOutcome out = step(motion, x, std::min(dt, T - t), rng);
        if (out.status != StepOutcome::Status::Alive)
            throw std::runtime_error("sample_occupation: trajectory was killed");
        h.time_fraction[static_cast<std::size_t>(bin_of(x))] += out.elapsed;
        t += out.elapsed;
        x = out.position;
        while (next_sample <= t && next_sample <= T) {
            // position at the sample time approximated by the current endpoint
            ++h.sample_counts[static_cast<std::size_t>(bin_of(x))];
            next_sample += sample_spacing;
        }
    }
    for (double& f : h.time_fraction) f /= T;
    return h;
}

}  // namespace stripbbm
