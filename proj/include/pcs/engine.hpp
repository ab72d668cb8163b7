#pragma once

#include "pcs/crosswalk.hpp"
#include "pcs/pedestrian.hpp"
#include "pcs/spatial_grid.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pcs {

/// A group of pedestrians sharing a starting side, type and placement rule.
struct Cohort {
    Side side = Side::Left;
    int count = 0;
    PedestrianType type = default_type(PedestrianKind::HealthyAdult);
    PlacementDistribution placement;
    /// Explicit standing centres; when non-empty they replace sampling and
    /// must have `count` entries.
    std::vector<Point> positions;
    /// Explicit base speeds (m/s); when non-empty they replace sampling.
    std::vector<double> base_speeds;

    bool operator==(const Cohort&) const = default;
};

enum class DirectionOrder {
    Alternate, ///< left-origin movers first on even steps, right-origin first on odd
    LeftFirst,
    RightFirst,
};

struct EngineConfig {
    double step_len = 1.0;   ///< seconds
    std::uint64_t seed = 0;
    int max_steps = 600;
    int i_increment = 10;    ///< percent added to the reduction per retry
    int stuck_threshold = 3; ///< blocked steps before the right tilt
    DirectionOrder order = DirectionOrder::Alternate;
    SpeedCeiling ceiling = SpeedCeiling::BaseSpeed;

    void validate() const;
    bool operator==(const EngineConfig&) const = default;
};

struct Scenario {
    CrosswalkLayout layout{3.0, 3.6, 43.62, 1.0};
    std::vector<Cohort> cohorts;
    EngineConfig engine;

    [[nodiscard]] int pedestrian_count() const noexcept;
    void validate() const;
    bool operator==(const Scenario&) const = default;
};

struct TraceRecord {
    int step = 0;
    int ped_id = 0;
    double x = 0.0;
    double y = 0.0;
    double speed = 0.0;  ///< m/s used this step, 0 when standing
    double radius = 0.0; ///< occupied radius after the step
    PedState state = PedState::Waiting;

    bool operator==(const TraceRecord&) const = default;
};

using SimulationTrace = std::vector<TraceRecord>;

struct RunSummary {
    std::uint64_t seed = 0;
    int pedestrians = 0;
    int steps = 0;             ///< steps executed
    bool completed = true;     ///< every pedestrian reached the far curb
    double cohort_crossing_time = 0.0; ///< seconds until the last pedestrian finished
    /// Seconds from phase onset to the far curb, indexed by pedestrian id;
    /// empty for pedestrians that did not finish.
    std::vector<std::optional<double>> per_ped_crossing_time;
    long agent_steps = 0;
    long no_move_steps = 0;
    double no_move_fraction = 0.0;
    int stuck_tilt_events = 0;
};

struct RunResult {
    SimulationTrace trace;
    RunSummary summary;
};

/// A chosen step: where the pedestrian goes and at which reduction.
struct Move {
    Point position;
    int reduction_i = 0;
};

enum class MoveMode {
    Forward,   ///< maximise forward progress on the forward semicircle
    TiltRight, ///< step as far right as possible within [-90, 0) degrees
};

/// Candidate search with speed reduction: tries i = 0, inc, 2 inc, ..., 100
/// and returns the first reduction with a free angle. `neighbors` must not
/// contain `self`. Walls of the buffered band are treated like obstacles.
[[nodiscard]] std::optional<Move> try_move(const Pedestrian& self,
                                           std::span<const Pedestrian* const> neighbors,
                                           const CrosswalkLayout& layout, const EngineConfig& config,
                                           MoveMode mode = MoveMode::Forward);

/// Discrete-step crossing simulation. Holds the world state between steps.
class Simulation {
public:
    /// Places pedestrians and samples their speeds from `scenario.engine.seed`.
    explicit Simulation(const Scenario& scenario, bool record_trace = true);
    /// Starts from an explicit population; useful for fixtures.
    Simulation(const CrosswalkLayout& layout, const EngineConfig& config,
               std::vector<Pedestrian> pedestrians, bool record_trace = true);

    /// Advances one step. Throws InternalError if the post-state overlaps or
    /// leaves the crosswalk.
    void step();

    /// Steps until everyone is done or max_steps is reached.
    RunResult run() &&;

    [[nodiscard]] bool finished() const noexcept;
    [[nodiscard]] int steps_taken() const noexcept { return step_; }
    [[nodiscard]] const std::vector<Pedestrian>& pedestrians() const noexcept { return peds_; }
    [[nodiscard]] const CrosswalkLayout& layout() const noexcept { return layout_; }
    [[nodiscard]] const SimulationTrace& trace() const noexcept { return trace_; }
    [[nodiscard]] RunSummary summary() const;

private:
    void act(Pedestrian& ped);
    void check_invariants() const;
    void record(int step, const std::vector<int>& ids);
    [[nodiscard]] std::vector<const Pedestrian*> neighbors_of(const Pedestrian& ped,
                                                              double reach) const;

    CrosswalkLayout layout_;
    EngineConfig config_;
    std::vector<Pedestrian> peds_;
    std::vector<double> step_speed_;
    bool record_trace_;
    SimulationTrace trace_;
    int step_ = 0;
    long agent_steps_ = 0;
    long no_move_steps_ = 0;
    int stuck_tilts_ = 0;
    double max_radius_ = 0.0;
    SpatialGrid grid_{1.0};
};

/// Initial population of a scenario, before any step.
[[nodiscard]] std::vector<Pedestrian> populate(const Scenario& scenario);

[[nodiscard]] RunResult run(const Scenario& scenario, bool record_trace = true);

/// Seed of replication `run_index`: splitmix64(seed + (run_index + 1) * golden).
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t run_index) noexcept;

struct CrossingEstimate {
    double mean = 0.0;             ///< seconds
    std::vector<double> per_run;   ///< seconds, in run-index order
    bool all_completed = true;
};

/// Mean cohort crossing time over `runs` replications with derived seeds.
/// Replications run on up to `workers` threads; the reduction is in run order.
[[nodiscard]] CrossingEstimate estimate_crossing_time(const Scenario& scenario, int runs,
                                                      unsigned workers = 1);

} // namespace pcs
