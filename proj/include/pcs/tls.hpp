#pragma once

// Single-intersection signal experiments. Vehicles are point queues per lane;
// pedestrians accumulate at the four crosswalks and cross in engine runs
// whenever their walk interval starts.

#include "pcs/crosswalk.hpp"
#include "pcs/engine.hpp"
#include "pcs/pedestrian.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pcs {

enum class Approach { North, East, South, West };
enum class Turn { Left, Through, Right };
enum class TlsMode { Static, Dynamic, DynamicWithPcs };

inline constexpr std::array kApproaches{Approach::North, Approach::East, Approach::South,
                                        Approach::West};
inline constexpr std::array kModes{TlsMode::Static, TlsMode::Dynamic, TlsMode::DynamicWithPcs};

[[nodiscard]] std::string_view to_string(Approach a) noexcept;
[[nodiscard]] std::string_view to_string(Turn t) noexcept;
/// "static", "dynamic", "dynamic_with_pcs".
[[nodiscard]] std::string_view to_string(TlsMode m) noexcept;
[[nodiscard]] std::optional<TlsMode> parse_tls_mode(std::string_view name) noexcept;

/// Crosswalks are named after the intersection leg they span, so they share
/// the Approach enumeration.
using CrosswalkId = Approach;

struct Movement {
    Approach approach = Approach::North;
    Turn turn = Turn::Through;
    bool operator==(const Movement&) const = default;
};

/// Crosswalk a turning movement drives across on its way out, if any.
/// Through movements and crosswalks on red legs never conflict.
[[nodiscard]] std::optional<CrosswalkId> yield_crosswalk(Movement m) noexcept;

struct Phase {
    double duration = 0.0; ///< seconds
    std::vector<Approach> green_approaches;
    std::vector<CrosswalkId> walk_crosswalks;
    bool operator==(const Phase&) const = default;
};

struct SignalSchedule {
    TlsMode mode = TlsMode::Static;
    std::vector<Phase> phases;

    [[nodiscard]] double cycle_length() const noexcept;
    /// Phase index active at time t of a periodic schedule.
    [[nodiscard]] std::size_t phase_at(double t) const;
};

/// The fixed 84/3/50/3 s cycle: north-south green with the west and east
/// crosswalks walking, yellow, east-west green with the north and south
/// crosswalks walking, yellow.
[[nodiscard]] SignalSchedule static_schedule();

/// Throws InternalError if a phase lets a crosswalk walk while a through
/// movement that drives across it has green.
void check_schedule_safety(const SignalSchedule& schedule);
[[nodiscard]] bool walk_conflicts(const Phase& phase) noexcept;

struct GreenBounds {
    double min_green = 5.0;
    double max_green = 90.0;
    bool operator==(const GreenBounds&) const = default;
};

/// clamp(queue * headway + lost_time, min_green, max_green)
[[nodiscard]] double dynamic_green(int queue_length, double discharge_headway,
                                   double startup_lost_time, GreenBounds bounds = {});

struct TurningFractions {
    double left = 1.0 / 3.0;
    double through = 1.0 / 3.0;
    double right = 1.0 / 3.0;
    bool operator==(const TurningFractions&) const = default;
};

/// Arrival window of the built-in demands (s).
inline constexpr double kDefaultHorizon = 1800.0;

struct DemandProfile {
    std::array<double, 4> vehicle_rate{}; ///< veh/h per approach, indexed by Approach
    TurningFractions turning;
    std::array<double, 4> pedestrian_rate{}; ///< ped/h per crosswalk
    PedestrianType pedestrian_type = field_adult_type();
    double horizon = kDefaultHorizon; ///< seconds of arrivals

    void validate() const;
    bool operator==(const DemandProfile&) const = default;
};

/// Spreads hourly totals evenly over approaches and crosswalks.
[[nodiscard]] DemandProfile uniform_demand(double vehicles_per_hour, double pedestrians_per_hour,
                                           TurningFractions turning = {},
                                           double horizon = kDefaultHorizon);

/// Field study counts: 990 vehicles and 522 pedestrians over a 30 minute
/// window, with a 20/60/20 left/through/right split.
[[nodiscard]] DemandProfile field_replay_demand();

struct SyntheticLevel {
    std::string name;
    double vehicles_per_hour = 0.0;
    double pedestrians_per_hour = 0.0;
};

/// Six demand levels a-f. Vehicle totals V1..V4 = 600, 900, 1200, 1500 veh/h;
/// pedestrian totals P1..P5 = 300, 600, 900, 1000, 2000 ped/h.
/// (a) V1 P1, (b) V1 P2, (c) V2 P3, (d) V3 P4, (e) V4 P4, (f) V4 P5.
[[nodiscard]] std::vector<SyntheticLevel> synthetic_levels();

struct ControllerParams {
    GreenBounds green;
    double min_walk = 7.0;          ///< s
    double max_walk = 90.0;         ///< s
    double safety_margin = 3.0;     ///< s added to the crossing estimate
    int estimator_runs = 10;
    double saturation_headway = 2.0; ///< s/veh per lane
    double startup_lost_time = 2.0;  ///< s
    double yellow = 3.0;             ///< s
    /// Walk time of the fixed-walk dynamic mode, per crosswalk; empty means
    /// 7 s plus the length walked at 1.067 m/s.
    std::optional<double> fixed_walk;
    double drain_limit = 1800.0; ///< s allowed after the horizon to empty queues

    void validate() const;
    bool operator==(const ControllerParams&) const = default;
};

struct IntersectionGeometry {
    double beta = 3.0;
    double buffer = 1.0;
    double ew_crosswalk_length = 43.62; ///< west and east crosswalks
    double ew_crosswalk_width = 3.6;
    double ns_crosswalk_length = 47.69; ///< north and south crosswalks
    double ns_crosswalk_width = 6.4;

    [[nodiscard]] CrosswalkLayout layout(CrosswalkId c) const;
    bool operator==(const IntersectionGeometry&) const = default;
};

struct TlsConfig {
    TlsMode mode = TlsMode::DynamicWithPcs;
    DemandProfile demand = field_replay_demand();
    ControllerParams controller;
    IntersectionGeometry geometry;
    EngineConfig engine; ///< step_len, reduction schedule etc. for cohort runs

    void validate() const;
    bool operator==(const TlsConfig&) const = default;
};

/// Walk time granted to a cohort. Fixed modes return their configured walk
/// (Static: `static_walk`, Dynamic: the fixed walk) regardless of the cohort.
/// DynamicWithPcs returns the mean crossing estimate plus the safety margin,
/// clamped to [min_walk, max_walk]; min_walk for an empty cohort, max_walk if
/// an estimator run did not finish.
[[nodiscard]] double pedestrian_phase_duration(const Scenario& cohort, TlsMode mode,
                                               const ControllerParams& params,
                                               double static_walk);

/// Walk time granted for an estimate: mean + margin clamped to
/// [min_walk, max_walk], or max_walk if a run did not finish.
[[nodiscard]] double walk_from_estimate(const CrossingEstimate& est, const ControllerParams& params);

struct WaitSample {
    enum class Kind { Vehicle, Pedestrian };
    Kind kind = Kind::Vehicle;
    int id = 0;
    Approach where = Approach::North; ///< approach or crosswalk
    double arrival = 0.0;
    double release = 0.0; ///< discharge or walk start; run end when unserved
    bool served = true;
    [[nodiscard]] double wait() const noexcept { return release - arrival; }
};

/// Waits of agents still queued at the end are censored at the end time and
/// included in the averages.
struct IntersectionMetrics {
    TlsMode mode = TlsMode::Static;
    std::uint64_t seed = 0;
    double vehicle_awt = 0.0;
    double pedestrian_awt = 0.0;
    double vehicle_max_wait = 0.0;
    double pedestrian_max_wait = 0.0;
    int vehicles_arrived = 0;
    int vehicles_discharged = 0;
    int vehicles_queued = 0; ///< still waiting when the run stopped
    int pedestrians_arrived = 0;
    int pedestrians_released = 0;
    int pedestrians_queued = 0;
    int stranded_pedestrians = 0;
    int cycles = 0;
    double end_time = 0.0;
    std::vector<WaitSample> samples;
    std::vector<Phase> phase_log; ///< phases as executed
};

[[nodiscard]] IntersectionMetrics simulate_intersection(const TlsConfig& config, std::uint64_t seed);

struct ModeStats {
    TlsMode mode = TlsMode::Static;
    int runs = 0;
    double vehicle_awt = 0.0;
    double vehicle_awt_sd = 0.0;
    double pedestrian_awt = 0.0;
    double pedestrian_awt_sd = 0.0;
    double vehicle_max_wait = 0.0;    ///< mean over seeds
    double pedestrian_max_wait = 0.0; ///< mean over seeds
    int stranded_pedestrians = 0;     ///< total over seeds
    int max_stranded_per_run = 0;
};

/// Every requested mode on every seed. Runs fan out to `workers` threads and
/// are reduced in (mode, seed) order.
[[nodiscard]] std::vector<ModeStats> compare_modes(const TlsConfig& base,
                                                   std::span<const TlsMode> modes,
                                                   std::span<const std::uint64_t> seeds,
                                                   unsigned workers = 1);

void write_wait_samples_csv(std::ostream& out, const IntersectionMetrics& metrics);

} // namespace pcs
