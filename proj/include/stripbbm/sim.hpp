#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "stripbbm/diffusion.hpp"
#include "stripbbm/model.hpp"
#include "stripbbm/rng.hpp"

namespace stripbbm {

enum class Color : std::uint8_t { None = 0, Red = 1, Blue = 2 };

enum class EventKind : std::uint8_t {
    Birth = 0,         // other = parent id (0 for the root)
    DeathKilled0 = 1,  // absorbed at the lower boundary
    DeathKilledK = 2,  // absorbed at the upper boundary
    DeathBranched = 3, // other = offspring count
    Immigration = 4,   // other = source particle id
};

struct Event {
    double time = 0.0;
    double position = 0.0;
    std::uint64_t particle = 0;
    std::uint64_t other = 0;
    EventKind kind = EventKind::Birth;
    Color color = Color::None;
};

// Genealogical record of one run. Events are sorted by time after the run;
// ties keep simulation order. Runs that hit the particle cap carry
// truncated = true and must be treated as censored by observers.
struct EventLog {
    std::vector<Event> events;
    bool truncated = false;

    void sort_by_time();
    // number of particles alive at each query time (replay; count = births +
    // immigrations at times <= t minus deaths at times <= t)
    std::vector<long long> population_curve(std::span<const double> times) const;

    void write_csv(std::ostream& os) const;
    // record-framed little-endian binary; see README
    void write_binary(std::ostream& os) const;
    static EventLog read_binary(std::istream& is);
};

struct SimConfig {
    ModelParams params;
    double K = 0.0;
    double x0 = 0.0;
    double horizon = 0.0;
    double dt = 1e-3;
    std::size_t max_particles = 1000000;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;     // experiment stream
    std::uint64_t substream = 0;  // replicate index

    void validate() const;
};

// Branch-rate description: exact event times come from thinning an
// exponential clock at `rate_bound` >= sup_y rate(y).
struct BranchingRule {
    double rate_bound = 0.0;
    std::function<double(double)> rate;
    std::function<int(double, RngStream&)> sample_offspring;

    static BranchingRule constant(double beta, const OffspringLaw& law);
};

// Resolution of an accepted clock ring for one particle.
struct EventOutcome {
    bool happened = false;          // false: thinned away, particle continues
    bool parent_survives = false;   // true: immigration alongside a living parent
    std::array<int, 3> children{};  // counts by Color index
};

// Per-color dynamics of a multi-type run.
struct Species {
    MotionSpec motion;
    double rate_bound = 0.0;
    std::function<EventOutcome(double y, RngStream&)> decide;
};

struct ParticleState {
    std::uint64_t id = 0;
    double position = 0.0;
    Color color = Color::None;
    std::vector<double> accumulators;  // running path integrals
};

struct Snapshot {
    double time = 0.0;
    std::vector<ParticleState> particles;
};

struct Observer {
    std::vector<double> snapshot_times;  // ascending
    std::vector<std::function<double(double)>> accumulators;  // integrands f(x)
    std::vector<double> census_times;    // ascending; population counts only
    bool record_events = true;
};

struct RunResult {
    EventLog log;
    std::vector<Snapshot> snapshots;
    std::vector<long long> census;
    long long alive_at_horizon = 0;
    std::size_t total_born = 0;
    bool truncated = false;
};

// Event-driven engine over per-color species. Deterministic given the
// config's (seed, stream, substream).
RunResult run_colored(const SimConfig& cfg,
                      const std::array<std::optional<Species>, 3>& species,
                      Color root_color, const Observer& observer = {});

// Single-type run: every particle moves by `motion` and branches by
// `branching`; offspring inherit the parent's color.
RunResult run_branching(const SimConfig& cfg, const MotionSpec& motion,
                        const BranchingRule& branching, const Observer& observer = {});

struct SurvivalEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    double estimate_half = 0.0;   // at horizon/2, the horizon-bias diagnostic
    double std_error_half = 0.0;
    double censored_fraction = 0.0;
};

// Survival proxy "population alive at the horizon"; capped runs count as
// survived. Replicate r uses rng substream r.
SurvivalEstimate estimate_survival(const SimConfig& cfg, std::size_t replicates,
                                   int threads = 1);

// Number of lines first exiting the sub-strip (0,y) at level y, started from
// x in (0,y). Requires y below the critical width so the line is dissecting.
int stopping_line_count(const ModelParams& params, double y, double x, double dt,
                        RngStream& rng);

struct GrowthRateEstimate {
    double slope = 0.0;
    std::size_t surviving = 0;
    std::size_t censored = 0;
};

// Least-squares slope of log|N_t| over [T/2, T], averaged over surviving
// replicates. Throws if every replicate dies out.
GrowthRateEstimate growth_rate_estimate(const SimConfig& cfg, const MotionSpec& motion,
                                        const BranchingRule& branching,
                                        std::size_t replicates, int threads = 1);

// Deterministic chunked parallel map over [0, count).
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace stripbbm
