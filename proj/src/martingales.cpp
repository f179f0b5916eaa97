#include "stripbbm/martingales.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "stripbbm/stats.hpp"

namespace stripbbm {

namespace {
constexpr double kPi = std::numbers::pi;
}

MartingaleEvaluator::MartingaleEvaluator(MartingaleSpec spec) : spec_(std::move(spec)) {
    if (spec_.K <= 0.0) throw std::invalid_argument("MartingaleEvaluator: K must be positive");
    lambda_ = lambda_rate(spec_.params, spec_.K);
    switch (spec_.kind) {
        case MartingaleKind::Upsilon:
        case MartingaleKind::ZK:
            break;
        case MartingaleKind::ProductExtinction:
            if (!spec_.profile)
                throw std::invalid_argument("ProductExtinction requires a profile");
            break;
        case MartingaleKind::Mfstar:
            if (!spec_.profile || spec_.profile->is_trivial())
                throw std::invalid_argument("Mfstar requires a nontrivial profile");
            fstar_ = eigenfunction_fstar(*spec_.profile);
            break;
        case MartingaleKind::Mone:
            if (!spec_.profile || spec_.profile->is_trivial())
                throw std::invalid_argument("Mone requires a nontrivial profile");
            break;
    }
}

double MartingaleEvaluator::operator()(const Snapshot& snap) const {
    const double t = snap.time;
    const double K = spec_.K;
    const double mu = spec_.params.mu;
    switch (spec_.kind) {
        case MartingaleKind::Upsilon: {
            if (snap.particles.size() > 1)
                throw std::invalid_argument("Upsilon: single-particle run expected");
            if (snap.particles.empty()) return 0.0;
            const double x = snap.particles.front().position;
            const double rate = 0.5 * mu * mu + kPi * kPi / (2.0 * K * K);
            return std::sin(kPi * x / K) * std::exp(mu * x + rate * t);
        }
        case MartingaleKind::ZK: {
            double s = 0.0;
            for (const auto& p : snap.particles)
                s += std::exp(mu * p.position - lambda_ * t) * std::sin(kPi * p.position / K);
            return s;
        }
        case MartingaleKind::ProductExtinction: {
            double prod = 1.0;
            for (const auto& p : snap.particles)
                prod *= 1.0 - spec_.profile->p_at(p.position);
            return prod;
        }
        case MartingaleKind::Mfstar: {
            double s = 0.0;
            for (const auto& p : snap.particles)
                s += fstar_(p.position) * std::exp(-lambda_ * t);
            return s;
        }
        case MartingaleKind::Mone: {
            double s = 0.0;
            for (const auto& p : snap.particles) {
                if (p.accumulators.empty())
                    throw std::runtime_error("Mone: missing path-integral accumulator");
                s += std::exp(-p.accumulators.front());
            }
            return s;
        }
    }
    return 0.0;
}

double MartingaleEvaluator::initial_value(double x0) const {
    const double K = spec_.K;
    const double mu = spec_.params.mu;
    switch (spec_.kind) {
        case MartingaleKind::Upsilon:
        case MartingaleKind::ZK:
            return std::sin(kPi * x0 / K) * std::exp(mu * x0);
        case MartingaleKind::ProductExtinction:
            return 1.0 - spec_.profile->p_at(x0);
        case MartingaleKind::Mfstar:
            return fstar_(x0);
        case MartingaleKind::Mone:
            return 1.0;
    }
    return 0.0;
}

MeanTestReport martingale_mean_test(const MartingaleEvaluator& evaluator,
                                    const std::function<RunResult(std::size_t)>& generator,
                                    const std::vector<double>& times,
                                    std::size_t replicates, double reference,
                                    int threads) {
    if (times.empty() || replicates < 2)
        throw std::invalid_argument("martingale_mean_test: need times and replicates");

    std::vector<std::vector<double>> values(replicates);
    std::vector<std::uint8_t> censored(replicates, 0);
    parallel_for(replicates, threads, [&](std::size_t r) {
        const RunResult res = generator(r);
        if (res.truncated) {
            censored[r] = 1;
            return;
        }
        if (res.snapshots.size() != times.size())
            throw std::runtime_error("martingale_mean_test: generator snapshot mismatch");
        auto& v = values[r];
        v.reserve(times.size());
        for (const Snapshot& s : res.snapshots) v.push_back(evaluator(s));
    });

    MeanTestReport report;
    report.reference = reference;
    std::size_t ncens = 0;
    std::vector<MeanVar> acc(times.size());
    for (std::size_t r = 0; r < replicates; ++r) {
        if (censored[r]) {
            ++ncens;
            continue;
        }
        for (std::size_t i = 0; i < times.size(); ++i) acc[i].add(values[r][i]);
    }
    report.censored_fraction = static_cast<double>(ncens) / static_cast<double>(replicates);

    bool pass = true;
    for (std::size_t i = 0; i < times.size(); ++i) {
        MeanTestPoint pt;
        pt.t = times[i];
        pt.mean = acc[i].mean();
        pt.se = acc[i].std_error();
        pt.z = pt.se > 0.0 ? (pt.mean - reference) / pt.se : 0.0;
        if (std::abs(pt.mean - reference) > 3.0 * pt.se) pass = false;
        report.points.push_back(pt);
    }
    if (report.censored_fraction >= 0.01)
        report.verdict = TestVerdict::Inconclusive;
    else
        report.verdict = pass ? TestVerdict::Pass : TestVerdict::Fail;
    return report;
}

}  // namespace stripbbm
