#include "pcs/errors.hpp"
#include "pcs/pedestrian.hpp"

#include <gtest/gtest.h>

using namespace pcs;

TEST(SpeedParams, InvertsBounds)
{
    const auto p = speed_params_from_bounds(1.8, 0.6);
    EXPECT_DOUBLE_EQ(p.mu, 1.2);
    EXPECT_DOUBLE_EQ(p.sigma, 0.2);
    const double eps = 0.03;
    EXPECT_NEAR(speed_params_from_bounds(1.5, 1.5 - eps).sigma, eps / 6, 1e-15);
    EXPECT_THROW((void)speed_params_from_bounds(1.0, 1.0), ValidationError);
    EXPECT_THROW((void)speed_params_from_bounds(0.5, 1.0), ValidationError);
}

TEST(SpeedParams, FieldAdultAcceptedDirectly)
{
    const auto t = field_adult_type();
    EXPECT_DOUBLE_EQ(t.mu_speed, 1.2676);
    EXPECT_DOUBLE_EQ(t.sigma_speed, 0.09167);
    EXPECT_DOUBLE_EQ(t.max_speed, 1.2676 + 3 * 0.09167);
    EXPECT_DOUBLE_EQ(t.min_speed, 1.2676 - 3 * 0.09167);
    EXPECT_NO_THROW(t.validate());
}

TEST(SampleSpeed, DeterministicWalker)
{
    const auto t = PedestrianType::from_mean_sd(PedestrianKind::HealthyAdult, 1.1, 0.0, 0.3, 0.2);
    Rng rng(1);
    for (int k = 0; k < 100; ++k)
        EXPECT_EQ(sample_base_speed(t, rng), 1.1);
}

TEST(SampleSpeed, MonteCarloMatchesNormal)
{
    const auto t = field_adult_type();
    Rng rng(2024);
    const int n = 1000000;
    double sum = 0.0;
    int interior = 0;
    for (int k = 0; k < n; ++k) {
        const double v = sample_base_speed(t, rng);
        ASSERT_GE(v, t.min_speed);
        ASSERT_LE(v, t.max_speed);
        sum += v;
        if (v > t.min_speed && v < t.max_speed)
            ++interior;
    }
    EXPECT_NEAR(sum / n, 1.2676, 0.001);
    // P(|Z| < 3) = 0.9973
    EXPECT_GE(static_cast<double>(interior) / n, 0.997);
}

TEST(Reduction, SpeedEndpointsAndMidpoint)
{
    auto t = PedestrianType::from_bounds(PedestrianKind::HealthyAdult, 1.8, 0.3, 0.3, 0.2);
    EXPECT_DOUBLE_EQ(effective_speed(t, 1.2, 0), 1.2);
    EXPECT_DOUBLE_EQ(effective_speed(t, 1.2, 100), 0.3);
    EXPECT_NEAR(effective_speed(t, 1.2, 50), 0.75, 1e-15);
    EXPECT_DOUBLE_EQ(effective_speed(t, 1.2, 0, SpeedCeiling::TypeMax), 1.8);
}

TEST(Reduction, RadiusEndpointsAndMidpoint)
{
    auto t = PedestrianType::from_bounds(PedestrianKind::HealthyAdult, 1.8, 0.6, 0.3, 0.2);
    EXPECT_DOUBLE_EQ(effective_radius(t, 0), 0.3);
    EXPECT_DOUBLE_EQ(effective_radius(t, 100), 0.2);
    EXPECT_NEAR(effective_radius(t, 50), 0.25, 1e-15);
}

TEST(Reduction, NonIncreasingInI)
{
    for (PedestrianKind k : {PedestrianKind::HealthyAdult, PedestrianKind::Elder, PedestrianKind::Child,
                             PedestrianKind::CrutchesUser, PedestrianKind::WheelchairUser}) {
        const auto t = default_type(k);
        for (int i = 10; i <= 100; i += 10) {
            EXPECT_LE(effective_speed(t, t.mu_speed, i), effective_speed(t, t.mu_speed, i - 10));
            EXPECT_LE(effective_radius(t, i), effective_radius(t, i - 10));
        }
    }
}

TEST(Reduction, PedestrianOverloads)
{
    Pedestrian p;
    p.type = default_type(PedestrianKind::HealthyAdult);
    p.base_speed = 1.2;
    p.reduction_i = 50;
    p.moving = true;
    EXPECT_NEAR(effective_speed(p), 0.9, 1e-15);
    EXPECT_NEAR(effective_radius(p), 0.25, 1e-15);
    p.moving = false;
    EXPECT_DOUBLE_EQ(effective_radius(p), 0.2);
}

TEST(Types, DefaultTable)
{
    const auto adult = default_type(PedestrianKind::HealthyAdult);
    EXPECT_DOUBLE_EQ(adult.max_radius, 0.30);
    EXPECT_DOUBLE_EQ(adult.min_radius, 0.20);
    const auto chair = default_type(PedestrianKind::WheelchairUser);
    EXPECT_DOUBLE_EQ(chair.max_radius, 0.45);
    EXPECT_DOUBLE_EQ(chair.min_radius, 0.45);
    // Slow movers step less than their own radius.
    EXPECT_LT(chair.max_speed, chair.max_radius + chair.max_radius);
    for (PedestrianKind k : {PedestrianKind::HealthyAdult, PedestrianKind::Elder, PedestrianKind::Child,
                             PedestrianKind::CrutchesUser, PedestrianKind::WheelchairUser}) {
        EXPECT_NO_THROW(default_type(k).validate());
        EXPECT_EQ(parse_pedestrian_kind(to_string(k)), k);
    }
    EXPECT_FALSE(parse_pedestrian_kind("robot"));
}

TEST(Types, ValidateRejectsInconsistentValues)
{
    auto t = default_type(PedestrianKind::HealthyAdult);
    t.min_radius = 0.5;
    EXPECT_THROW(t.validate(), ValidationError);
    t = default_type(PedestrianKind::HealthyAdult);
    t.min_speed = -0.1;
    EXPECT_THROW(t.validate(), ValidationError);
}

TEST(States, NamesRoundTrip)
{
    for (PedState s : {PedState::Waiting, PedState::Crossing, PedState::ReEntering,
                       PedState::StuckTilting, PedState::Done})
        EXPECT_EQ(parse_ped_state(to_string(s)), s);
    EXPECT_FALSE(parse_ped_state("Flying"));
}
