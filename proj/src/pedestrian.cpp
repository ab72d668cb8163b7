#include "pcs/pedestrian.hpp"

#include "pcs/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace pcs {

namespace {

constexpr std::array<std::pair<PedestrianKind, std::string_view>, 5> kKindNames{{
    {PedestrianKind::HealthyAdult, "healthy_adult"},
    {PedestrianKind::Elder, "elder"},
    {PedestrianKind::Child, "child"},
    {PedestrianKind::CrutchesUser, "crutches_user"},
    {PedestrianKind::WheelchairUser, "wheelchair_user"},
}};

constexpr std::array<std::pair<PedState, std::string_view>, 5> kStateNames{{
    {PedState::Waiting, "Waiting"},
    {PedState::Crossing, "Crossing"},
    {PedState::ReEntering, "ReEntering"},
    {PedState::StuckTilting, "StuckTilting"},
    {PedState::Done, "Done"},
}};

double reduce(double high, double low, int reduction_i)
{
    return high - (high - low) * static_cast<double>(reduction_i) / 100.0;
}

void check_reduction(int reduction_i)
{
    if (reduction_i < 0 || reduction_i > 100)
        throw std::out_of_range("reduction index must be in [0, 100]");
}

} // namespace

std::string_view to_string(PedestrianKind kind) noexcept
{
    for (const auto& [k, name] : kKindNames)
        if (k == kind)
            return name;
    return "healthy_adult";
}

std::optional<PedestrianKind> parse_pedestrian_kind(std::string_view name) noexcept
{
    for (const auto& [k, n] : kKindNames)
        if (n == name)
            return k;
    return std::nullopt;
}

std::string_view to_string(PedState state) noexcept
{
    for (const auto& [s, name] : kStateNames)
        if (s == state)
            return name;
    return "Waiting";
}

std::optional<PedState> parse_ped_state(std::string_view name) noexcept
{
    for (const auto& [s, n] : kStateNames)
        if (n == name)
            return s;
    return std::nullopt;
}

SpeedParams speed_params_from_bounds(double max_speed, double min_speed)
{
    if (!(max_speed > min_speed))
        throw ValidationError("max_speed", "must exceed min_speed");
    return {(max_speed + min_speed) / 2.0, (max_speed - min_speed) / 6.0};
}

PedestrianType PedestrianType::from_bounds(PedestrianKind kind, double max_speed,
                                           double min_speed, double max_radius, double min_radius)
{
    const SpeedParams p = speed_params_from_bounds(max_speed, min_speed);
    PedestrianType t{kind, p.mu, p.sigma, max_speed, min_speed, max_radius, min_radius};
    t.validate();
    return t;
}

PedestrianType PedestrianType::from_mean_sd(PedestrianKind kind, double mu, double sigma,
                                            double max_radius, double min_radius)
{
    PedestrianType t{kind, mu, sigma, mu + 3.0 * sigma, mu - 3.0 * sigma, max_radius, min_radius};
    t.validate();
    return t;
}

void PedestrianType::validate() const
{
    if (!(mu_speed > 0.0))
        throw ValidationError("mu_speed", "must be > 0");
    if (!(sigma_speed >= 0.0))
        throw ValidationError("sigma_speed", "must be >= 0");
    if (!(min_speed >= 0.0))
        throw ValidationError("min_speed", "must be >= 0 (mu - 3 sigma went negative)");
    if (sigma_speed > 0.0 ? !(max_speed > min_speed) : !(max_speed >= min_speed))
        throw ValidationError("max_speed", "must exceed min_speed");
    if (!(min_radius > 0.0))
        throw ValidationError("min_radius", "must be > 0");
    if (!(max_radius >= min_radius))
        throw ValidationError("max_radius", "must be >= min_radius");
}

PedestrianType default_type(PedestrianKind kind)
{
    switch (kind) {
    case PedestrianKind::HealthyAdult:
        return PedestrianType::from_bounds(kind, 1.80, 0.60, 0.30, 0.20);
    case PedestrianKind::Elder:
        return PedestrianType::from_bounds(kind, 1.40, 0.50, 0.30, 0.20);
    case PedestrianKind::Child:
        return PedestrianType::from_bounds(kind, 1.60, 0.50, 0.25, 0.15);
    case PedestrianKind::CrutchesUser:
        return PedestrianType::from_bounds(kind, 1.00, 0.30, 0.40, 0.30);
    case PedestrianKind::WheelchairUser:
        return PedestrianType::from_bounds(kind, 0.70, 0.20, 0.45, 0.45);
    }
    return PedestrianType::from_bounds(PedestrianKind::HealthyAdult, 1.80, 0.60, 0.30, 0.20);
}

PedestrianType field_adult_type()
{
    return PedestrianType::from_mean_sd(PedestrianKind::HealthyAdult, kFieldAdultMeanSpeed,
                                        kFieldAdultSpeedSd, kFieldAdultMaxRadius,
                                        kFieldAdultMinRadius);
}

double sample_base_speed(const PedestrianType& type, Rng& rng)
{
    if (type.sigma_speed == 0.0)
        return type.mu_speed;
    const double draw = std::normal_distribution<double>(type.mu_speed, type.sigma_speed)(rng);
    return std::clamp(draw, type.min_speed, type.max_speed);
}

double effective_speed(const PedestrianType& type, double base_speed, int reduction_i,
                       SpeedCeiling ceiling)
{
    check_reduction(reduction_i);
    const double high = ceiling == SpeedCeiling::BaseSpeed ? base_speed : type.max_speed;
    return reduce(high, type.min_speed, reduction_i);
}

double effective_radius(const PedestrianType& type, int reduction_i)
{
    check_reduction(reduction_i);
    return reduce(type.max_radius, type.min_radius, reduction_i);
}

double effective_speed(const Pedestrian& ped, SpeedCeiling ceiling)
{
    return effective_speed(ped.type, ped.base_speed, ped.reduction_i, ceiling);
}

double effective_radius(const Pedestrian& ped)
{
    return ped.moving ? effective_radius(ped.type, ped.reduction_i) : ped.type.min_radius;
}

} // namespace pcs
