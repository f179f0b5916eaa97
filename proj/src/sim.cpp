#include "stripbbm/sim.hpp"

#include "stripbbm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace stripbbm {

void EventLog::sort_by_time() {
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return a.time < b.time; });
}

std::vector<long long> EventLog::population_curve(std::span<const double> times) const {
    std::vector<long long> out(times.size(), 0);
    long long alive = 0;
    std::size_t e = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        while (e < events.size() && events[e].time <= times[i]) {
            switch (events[e].kind) {
                case EventKind::Birth:
                case EventKind::Immigration:
                    ++alive;
                    break;
                case EventKind::DeathKilled0:
                case EventKind::DeathKilledK:
                case EventKind::DeathBranched:
                    --alive;
                    break;
            }
            ++e;
        }
        out[i] = alive;
    }
    return out;
}

namespace {
const char* kind_name(EventKind k) {
    switch (k) {
        case EventKind::Birth: return "birth";
        case EventKind::DeathKilled0: return "killed0";
        case EventKind::DeathKilledK: return "killedK";
        case EventKind::DeathBranched: return "branched";
        case EventKind::Immigration: return "immigration";
    }
    return "?";
}
}  // namespace

void EventLog::write_csv(std::ostream& os) const {
    os << "time,kind,particle,other,position,color\n";
    char buf[160];
    for (const Event& ev : events) {
        std::snprintf(buf, sizeof buf, "%.17g,%s,%llu,%llu,%.17g,%d\n", ev.time,
                      kind_name(ev.kind), static_cast<unsigned long long>(ev.particle),
                      static_cast<unsigned long long>(ev.other), ev.position,
                      static_cast<int>(ev.color));
        os << buf;
    }
    if (truncated) os << "# truncated\n";
}

namespace {
constexpr char kLogMagic[8] = {'S', 'B', 'B', 'M', 'E', 'L', 'O', 'G'};

template <typename T>
void put(std::ostream& os, T v) {
    char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    os.write(b, sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    char b[sizeof(T)];
    is.read(b, sizeof(T));
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}
}  // namespace

void EventLog::write_binary(std::ostream& os) const {
    os.write(kLogMagic, 8);
    put<std::uint32_t>(os, 1u);  // version
    put<std::uint8_t>(os, truncated ? 1 : 0);
    put<std::uint8_t>(os, 0);
    put<std::uint16_t>(os, 0);
    put<std::uint64_t>(os, events.size());
    for (const Event& ev : events) {
        put<double>(os, ev.time);
        put<double>(os, ev.position);
        put<std::uint64_t>(os, ev.particle);
        put<std::uint64_t>(os, ev.other);
        put<std::uint8_t>(os, static_cast<std::uint8_t>(ev.kind));
        put<std::uint8_t>(os, static_cast<std::uint8_t>(ev.color));
    }
}

EventLog EventLog::read_binary(std::istream& is) {
    char magic[8];
    is.read(magic, 8);
    if (std::memcmp(magic, kLogMagic, 8) != 0)
        throw std::runtime_error("EventLog: bad magic");
    if (get<std::uint32_t>(is) != 1u) throw std::runtime_error("EventLog: bad version");
    EventLog log;
    log.truncated = get<std::uint8_t>(is) != 0;
    (void)get<std::uint8_t>(is);
    (void)get<std::uint16_t>(is);
    const std::uint64_t count = get<std::uint64_t>(is);
    log.events.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        Event& ev = log.events[i];
        ev.time = get<double>(is);
        ev.position = get<double>(is);
        ev.particle = get<std::uint64_t>(is);
        ev.other = get<std::uint64_t>(is);
        ev.kind = static_cast<EventKind>(get<std::uint8_t>(is));
        ev.color = static_cast<Color>(get<std::uint8_t>(is));
    }
    if (!is) throw std::runtime_error("EventLog: short read");
    return log;
}

void SimConfig::validate() const {
    if (K <= 0.0) throw std::invalid_argument("SimConfig: K must be positive");
    if (!(x0 > 0.0 && x0 < K)) throw std::invalid_argument("SimConfig: x0 must lie in (0,K)");
    if (horizon <= 0.0) throw std::invalid_argument("SimConfig: horizon must be positive");
    if (dt <= 0.0) throw std::invalid_argument("SimConfig: dt must be positive");
    if (max_particles < 1) throw std::invalid_argument("SimConfig: cap must be >= 1");
    if (params.offspring.mean() <= 1.0)
        throw std::invalid_argument("SimConfig: offspring law must be supercritical (m > 1)");
}

BranchingRule BranchingRule::constant(double beta, const OffspringLaw& law) {
    if (beta < 0.0) throw std::invalid_argument("BranchingRule: beta must be >= 0");
    BranchingRule rule;
    rule.rate_bound = beta;
    rule.rate = [beta](double) { return beta; };
    const std::vector<double> q = law.probs();
    rule.sample_offspring = [q](double, RngStream& rng) {
        double u = rng.uniform();
        for (std::size_t k = 0; k < q.size(); ++k) {
            u -= q[k];
            if (u <= 0.0) return static_cast<int>(k);
        }
        return static_cast<int>(q.size()) - 1;
    };
    return rule;
}

namespace {

struct PendingParticle {
    std::uint64_t id = 0;
    double birth_time = 0.0;
    double birth_position = 0.0;
    Color color = Color::None;
    std::vector<double> accum;
};

class Engine {
public:
    Engine(const SimConfig& cfg, const std::array<std::optional<Species>, 3>& species,
           const Observer& obs)
        : cfg_(cfg), species_(species), obs_(obs),
          rng_(cfg.seed, cfg.stream, cfg.substream) {
        result_.snapshots.reserve(obs_.snapshot_times.size());
        for (double t : obs_.snapshot_times) result_.snapshots.push_back({t, {}});
        census_diff_.assign(obs_.census_times.size() + 1, 0);
    }

    RunResult run(Color root_color) {
        std::vector<double> accum0(obs_.accumulators.size(), 0.0);
        spawn(root_color, 0.0, cfg_.x0, 0, EventKind::Birth, accum0);
        while (!work_.empty() && !result_.truncated) {
            PendingParticle p = std::move(work_.back());
            work_.pop_back();
            simulate(p);
        }
        finalize();
        return std::move(result_);
    }

private:
    void record(EventKind kind, double t, double x, std::uint64_t id, std::uint64_t other,
                Color color) {
        if (obs_.record_events)
            result_.log.events.push_back({t, x, id, other, kind, color});
    }

    void spawn(Color color, double t, double x, std::uint64_t parent, EventKind kind,
               const std::vector<double>& accum) {
        if (result_.total_born >= cfg_.max_particles) {
            result_.truncated = true;
            return;
        }
        const std::uint64_t id = ++last_id_;
        ++result_.total_born;
        record(kind, t, x, id, parent, color);
        work_.push_back({id, t, x, color, accum});
    }

    void mark_alive_span(double from, double to) {
        // census times c with from <= c < to
        const auto& ct = obs_.census_times;
        const auto lo = std::lower_bound(ct.begin(), ct.end(), from) - ct.begin();
        const auto hi = std::lower_bound(ct.begin(), ct.end(), to) - ct.begin();
        if (lo < hi) {
            ++census_diff_[static_cast<std::size_t>(lo)];
            --census_diff_[static_cast<std::size_t>(hi)];
        }
    }

    void simulate(const PendingParticle& p) {
        const Species& sp = species_at(p.color);
        double t = p.birth_time;
        double x = p.birth_position;
        std::vector<double> accum = p.accum;

        // first snapshot index not yet passed
        std::size_t snap = std::lower_bound(obs_.snapshot_times.begin(),
                                            obs_.snapshot_times.end(), t) -
                           obs_.snapshot_times.begin();
        // snapshots exactly at the birth time see the newborn
        while (snap < obs_.snapshot_times.size() && obs_.snapshot_times[snap] == t) {
            result_.snapshots[snap].particles.push_back({p.id, x, p.color, accum});
            ++snap;
        }

        double next_event = (sp.rate_bound > 0.0)
                                ? t + rng_.exponential(sp.rate_bound)
                                : std::numeric_limits<double>::infinity();
        for (;;) {
            const double target = std::min(cfg_.horizon, next_event);
            // advance the motion to `target`, landing exactly on snapshot times
            while (t < target) {
                double sub = target;
                if (snap < obs_.snapshot_times.size())
                    sub = std::min(sub, obs_.snapshot_times[snap]);
                while (t < sub) {
                    const double want = std::min(cfg_.dt, sub - t);
                    const StepOutcome out = step(sp.motion, x, want, rng_);
                    if (!accum.empty()) {
                        const double xe =
                            out.status == StepOutcome::Status::Alive ? out.position : x;
                        for (std::size_t a = 0; a < accum.size(); ++a)
                            accum[a] += 0.5 * out.elapsed *
                                        (obs_.accumulators[a](x) + obs_.accumulators[a](xe));
                    }
                    t += out.elapsed;
                    if (out.status != StepOutcome::Status::Alive) {
                        record(out.status == StepOutcome::Status::KilledAt0
                                   ? EventKind::DeathKilled0
                                   : EventKind::DeathKilledK,
                               t, out.status == StepOutcome::Status::KilledAt0 ? 0.0 : cfg_.K,
                               p.id, 0, p.color);
                        mark_alive_span(p.birth_time, t);
                        return;
                    }
                    x = out.position;
                }
                while (snap < obs_.snapshot_times.size() &&
                       obs_.snapshot_times[snap] <= t) {
                    result_.snapshots[snap].particles.push_back({p.id, x, p.color, accum});
                    ++snap;
                }
            }
            if (next_event > cfg_.horizon) {
                ++result_.alive_at_horizon;
                mark_alive_span(p.birth_time, std::numeric_limits<double>::infinity());
                return;
            }
            // clock ring: resolve via the species rule
            const EventOutcome outcome = sp.decide(x, rng_);
            if (!outcome.happened) {
                next_event = t + rng_.exponential(sp.rate_bound);
                continue;
            }
            if (outcome.parent_survives) {
                for (int c = 0; c < 3; ++c)
                    for (int i = 0; i < outcome.children[static_cast<std::size_t>(c)]; ++i)
                        spawn(static_cast<Color>(c), t, x, p.id, EventKind::Immigration, accum);
                next_event = t + rng_.exponential(sp.rate_bound);
                continue;
            }
            int total_children = 0;
            for (int c = 0; c < 3; ++c) total_children += outcome.children[static_cast<std::size_t>(c)];
            record(EventKind::DeathBranched, t, x, p.id,
                   static_cast<std::uint64_t>(total_children), p.color);
            mark_alive_span(p.birth_time, t);
            for (int c = 0; c < 3; ++c)
                for (int i = 0; i < outcome.children[static_cast<std::size_t>(c)]; ++i)
                    spawn(static_cast<Color>(c), t, x, p.id, EventKind::Birth, accum);
            return;
        }
    }

    const Species& species_at(Color c) const {
        const auto& s = species_[static_cast<std::size_t>(c)];
        if (!s) throw std::logic_error("Engine: no species registered for this color");
        return *s;
    }

    void finalize() {
        result_.log.truncated = result_.truncated;
        result_.log.sort_by_time();
        result_.census.assign(obs_.census_times.size(), 0);
        long long acc = 0;
        for (std::size_t i = 0; i < obs_.census_times.size(); ++i) {
            acc += census_diff_[i];
            result_.census[i] = acc;
        }
    }

    const SimConfig& cfg_;
    const std::array<std::optional<Species>, 3>& species_;
    const Observer& obs_;
    RngStream rng_;
    std::vector<PendingParticle> work_;
    std::vector<long long> census_diff_;
    std::uint64_t last_id_ = 0;
    RunResult result_;
};

}  // namespace

RunResult run_colored(const SimConfig& cfg,
                      const std::array<std::optional<Species>, 3>& species,
                      Color root_color, const Observer& observer) {
    cfg.validate();
    for (std::size_t i = 1; i < observer.snapshot_times.size(); ++i)
        if (observer.snapshot_times[i] < observer.snapshot_times[i - 1])
            throw std::invalid_argument("Observer: snapshot times must be ascending");
    Engine engine(cfg, species, observer);
    return engine.run(root_color);
}

RunResult run_branching(const SimConfig& cfg, const MotionSpec& motion,
                        const BranchingRule& branching, const Observer& observer) {
    std::array<std::optional<Species>, 3> species;
    Species sp{motion, branching.rate_bound, nullptr};
    const BranchingRule rule = branching;
    sp.decide = [rule](double y, RngStream& rng) {
        EventOutcome out;
        if (rule.rate_bound <= 0.0) return out;
        if (rng.uniform() * rule.rate_bound > rule.rate(y)) return out;  // thinned
        out.happened = true;
        out.children[static_cast<std::size_t>(Color::None)] =
            rule.sample_offspring(y, rng);
        return out;
    };
    // offspring keep the parent color: register the same species for all colors,
    // remapping the child count onto that color
    for (int c = 0; c < 3; ++c) {
        Species s = sp;
        const Color color = static_cast<Color>(c);
        const auto base = sp.decide;
        s.decide = [base, color](double y, RngStream& rng) {
            EventOutcome out = base(y, rng);
            if (out.happened) {
                const int k = out.children[static_cast<std::size_t>(Color::None)];
                out.children = {};
                out.children[static_cast<std::size_t>(color)] = k;
            }
            return out;
        };
        species[static_cast<std::size_t>(c)] = std::move(s);
    }
    return run_colored(cfg, species, Color::None, observer);
}

void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

SurvivalEstimate estimate_survival(const SimConfig& cfg, std::size_t replicates,
                                   int threads) {
    cfg.validate();
    if (replicates == 0) throw std::invalid_argument("estimate_survival: no replicates");
    const MotionSpec motion = MotionSpec::killed_drifted(cfg.params, cfg.K);
    const BranchingRule rule = BranchingRule::constant(cfg.params.beta, cfg.params.offspring);

    std::vector<std::uint8_t> full(replicates, 0), half(replicates, 0), capped(replicates, 0);
    parallel_for(replicates, threads, [&](std::size_t r) {
        SimConfig c = cfg;
        c.substream = r;
        Observer obs;
        obs.record_events = false;
        obs.census_times = {0.5 * cfg.horizon};
        const RunResult res = run_branching(c, motion, rule, obs);
        if (res.truncated) {
            full[r] = half[r] = capped[r] = 1;
        } else {
            full[r] = res.alive_at_horizon > 0 ? 1 : 0;
            half[r] = res.census[0] > 0 ? 1 : 0;
        }
    });

    auto binom = [&](const std::vector<std::uint8_t>& v) {
        double s = 0.0;
        for (auto b : v) s += b;
        const double p = s / static_cast<double>(replicates);
        const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(replicates));
        return std::pair<double, double>(p, se);
    };
    SurvivalEstimate est;
    std::tie(est.estimate, est.std_error) = binom(full);
    std::tie(est.estimate_half, est.std_error_half) = binom(half);
    double c = 0.0;
    for (auto b : capped) c += b;
    est.censored_fraction = c / static_cast<double>(replicates);
    return est;
}

int stopping_line_count(const ModelParams& params, double y, double x, double dt,
                        RngStream& rng) {
    const auto k0 = critical_width(params);
    if (!k0 && params.offspring.mean() > 1.0) {
        // no critical width: every sub-strip is subcritical, proceed
    } else if (k0 && y >= *k0) {
        throw std::invalid_argument("stopping_line_count: y must lie below K0");
    }
    if (!(x > 0.0 && x < y)) throw std::invalid_argument("stopping_line_count: x must lie in (0,y)");
    if (params.offspring.mean() <= 1.0)
        throw std::invalid_argument("stopping_line_count: offspring law must be supercritical");

    constexpr double kHorizon = 1e4;
    constexpr std::size_t kGuard = 10000000;
    const MotionSpec motion = MotionSpec::killed_drifted(params, y);
    const std::vector<double> q = params.offspring.probs();

    struct Item {
        double t, x;
    };
    std::vector<Item> work{{0.0, x}};
    std::size_t born = 1;
    int count = 0;
    while (!work.empty()) {
        Item it = work.back();
        work.pop_back();
        double t = it.t;
        double pos = it.x;
        double next_branch = t + rng.exponential(params.beta);
        for (;;) {
            if (t >= kHorizon)
                throw std::runtime_error("stopping_line_count: enforced horizon exceeded");
            bool done = false;
            while (t < next_branch) {
                const double want = std::min(dt, next_branch - t);
                const StepOutcome out = step(motion, pos, want, rng);
                t += out.elapsed;
                if (out.status == StepOutcome::Status::KilledAt0) {
                    done = true;
                    break;
                }
                if (out.status == StepOutcome::Status::KilledAtK) {
                    ++count;  // first in its line to exit at level y
                    done = true;
                    break;
                }
                pos = out.position;
                if (t >= kHorizon)
                    throw std::runtime_error("stopping_line_count: enforced horizon exceeded");
            }
            if (done) break;
            // branch
            double u = rng.uniform();
            int k = 0;
            for (std::size_t j = 0; j < q.size(); ++j) {
                u -= q[j];
                if (u <= 0.0) {
                    k = static_cast<int>(j);
                    break;
                }
            }
            if (born + static_cast<std::size_t>(k) > kGuard)
                throw std::runtime_error("stopping_line_count: particle guard exceeded");
            born += static_cast<std::size_t>(k);
            for (int j = 0; j < k - 1; ++j) work.push_back({t, pos});
            if (k == 0) break;  // particle dies, no offspring
            next_branch = t + rng.exponential(params.beta);
        }
    }
    return count;
}

GrowthRateEstimate growth_rate_estimate(const SimConfig& cfg, const MotionSpec& motion,
                                        const BranchingRule& branching,
                                        std::size_t replicates, int threads) {
    cfg.validate();
    if (replicates == 0) throw std::invalid_argument("growth_rate_estimate: no replicates");
    const int points = 33;
    std::vector<double> times(points);
    for (int i = 0; i < points; ++i)
        times[static_cast<std::size_t>(i)] =
            cfg.horizon * static_cast<double>(i + 1) / static_cast<double>(points);

    std::vector<double> slopes(replicates, std::numeric_limits<double>::quiet_NaN());
    std::vector<std::uint8_t> censored(replicates, 0);
    parallel_for(replicates, threads, [&](std::size_t r) {
        SimConfig c = cfg;
        c.substream = r;
        Observer obs;
        obs.record_events = false;
        obs.census_times = times;
        const RunResult res = run_branching(c, motion, branching, obs);
        if (res.truncated) {
            censored[r] = 1;
            return;
        }
        // fit over the window [T/2, T]
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int m = 0;
        for (int i = 0; i < points; ++i) {
            const double t = times[static_cast<std::size_t>(i)];
            if (t < 0.5 * cfg.horizon) continue;
            const long long n = res.census[static_cast<std::size_t>(i)];
            if (n <= 0) return;  // extinct inside the window
            const double ln = std::log(static_cast<double>(n));
            sx += t;
            sy += ln;
            sxx += t * t;
            sxy += t * ln;
            ++m;
        }
        if (m < 2) return;
        const double denom = static_cast<double>(m) * sxx - sx * sx;
        slopes[r] = (static_cast<double>(m) * sxy - sx * sy) / denom;
    });

    GrowthRateEstimate est;
    MeanVar mv;
    for (std::size_t r = 0; r < replicates; ++r) {
        est.censored += censored[r];
        if (!std::isnan(slopes[r])) mv.add(slopes[r]);
    }
    est.surviving = mv.count();
    if (est.surviving == 0)
        throw std::runtime_error("growth_rate_estimate: all replicates extinct");
    est.slope = mv.mean();
    return est;
}

}  // namespace stripbbm
