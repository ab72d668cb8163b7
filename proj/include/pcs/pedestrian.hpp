#pragma once

#include "pcs/crosswalk.hpp"

#include <optional>
#include <string_view>

namespace pcs {

enum class PedestrianKind { HealthyAdult, Elder, Child, CrutchesUser, WheelchairUser };

[[nodiscard]] std::string_view to_string(PedestrianKind kind) noexcept;
/// Accepts the snake_case names produced by to_string. Empty on no match.
[[nodiscard]] std::optional<PedestrianKind> parse_pedestrian_kind(std::string_view name) noexcept;

struct SpeedParams {
    double mu = 0.0;    ///< m/s
    double sigma = 0.0; ///< m/s
};

/// Inverts max = mu + 3 sigma, min = mu - 3 sigma.
/// Throws ValidationError when max <= min.
[[nodiscard]] SpeedParams speed_params_from_bounds(double max_speed, double min_speed);

/// Walking capability of one class of pedestrian.
struct PedestrianType {
    PedestrianKind kind = PedestrianKind::HealthyAdult;
    double mu_speed = 0.0;    ///< m/s
    double sigma_speed = 0.0; ///< m/s
    double max_speed = 0.0;   ///< m/s, mu + 3 sigma
    double min_speed = 0.0;   ///< m/s, mu - 3 sigma; floor of speed reduction
    double max_radius = 0.0;  ///< m, occupied radius at full speed
    double min_radius = 0.0;  ///< m, occupied radius when standing or at min speed

    /// Builds from speed bounds; mean and spread are derived.
    [[nodiscard]] static PedestrianType from_bounds(PedestrianKind kind, double max_speed,
                                                    double min_speed, double max_radius,
                                                    double min_radius);
    /// Builds from a measured mean and spread; bounds are mu +- 3 sigma.
    [[nodiscard]] static PedestrianType from_mean_sd(PedestrianKind kind, double mu, double sigma,
                                                     double max_radius, double min_radius);

    /// Throws ValidationError on inconsistent parameters. sigma = 0 (a
    /// deterministic walker) is the only case where max_speed == min_speed.
    void validate() const;

    bool operator==(const PedestrianType&) const = default;
};

/// Built-in parameter table. These are engineering defaults, not measured
/// values; scenario files can override every entry.
///
///   kind            speed max/min (m/s)   radius max/min (m)
///   healthy_adult   1.80 / 0.60           0.30 / 0.20
///   elder           1.40 / 0.50           0.30 / 0.20
///   child           1.60 / 0.50           0.25 / 0.15
///   crutches_user   1.00 / 0.30           0.40 / 0.30
///   wheelchair_user 0.70 / 0.20           0.45 / 0.45
[[nodiscard]] PedestrianType default_type(PedestrianKind kind);

/// Adults observed in the field: N(1.2676, 0.09167) m/s. The walking radius
/// is wider than the table default: it stands for the headway kept at full
/// pace, and was fitted against the observed crossing times.
inline constexpr double kFieldAdultMeanSpeed = 1.2676;
inline constexpr double kFieldAdultSpeedSd = 0.09167;
inline constexpr double kFieldAdultMaxRadius = 0.85;
inline constexpr double kFieldAdultMinRadius = 0.15;
[[nodiscard]] PedestrianType field_adult_type();

/// Which ceiling speed reduction starts from.
enum class SpeedCeiling {
    BaseSpeed, ///< the pedestrian's own sampled pace
    TypeMax,   ///< the type-wide max_speed
};

/// N(mu, sigma) clamped to [min_speed, max_speed]. Always consumes exactly one
/// normal draw when sigma > 0 and none when sigma == 0.
[[nodiscard]] double sample_base_speed(const PedestrianType& type, Rng& rng);

/// Speed at reduction i (percent): ceiling - (ceiling - min_speed) * i / 100.
[[nodiscard]] double effective_speed(const PedestrianType& type, double base_speed, int reduction_i,
                                     SpeedCeiling ceiling = SpeedCeiling::BaseSpeed);

/// Radius at reduction i: max_radius - (max_radius - min_radius) * i / 100.
[[nodiscard]] double effective_radius(const PedestrianType& type, int reduction_i);

enum class PedState {
    Waiting,      ///< behind the starting curb
    Crossing,     ///< on the crosswalk
    ReEntering,   ///< outside the buffered band, stepping back in
    StuckTilting, ///< blocked for three steps, trying to step right
    Done,         ///< reached the far curb
};

[[nodiscard]] std::string_view to_string(PedState state) noexcept;
[[nodiscard]] std::optional<PedState> parse_ped_state(std::string_view name) noexcept;

struct Pedestrian {
    int id = 0;
    PedestrianType type;
    Side side = Side::Left;
    Point position;
    double base_speed = 0.0;
    int reduction_i = 0;  ///< percent in [0, 100] used for the last move
    int stuck_count = 0;  ///< consecutive steps without moving
    bool moving = false;  ///< moved during the last step
    PedState state = PedState::Waiting;
    int crossing_start_step = 0;
    std::optional<int> crossing_end_step;
};

[[nodiscard]] double effective_speed(const Pedestrian& ped,
                                     SpeedCeiling ceiling = SpeedCeiling::BaseSpeed);

/// Standing pedestrians occupy min_radius; moving ones use the reduction.
[[nodiscard]] double effective_radius(const Pedestrian& ped);

} // namespace pcs
