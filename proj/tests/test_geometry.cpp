#include "oracles.hpp"
#include "pcs/geometry.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace pcs;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

ExclusionSet arcs_to_set(std::span<const ArcList> lists)
{
    std::vector<AngleInterval> all;
    for (const auto& l : lists)
        for (const auto& a : l)
            all.push_back(a);
    return ExclusionSet::union_of(all);
}

} // namespace

TEST(CircleIntersections, WorkedExampleMatchesAnalyticRoots)
{
    const auto r = circle_intersections({{0, 0}, 2}, {{2, 0}, 2});
    ASSERT_EQ(r.kind, CircleIntersection::Kind::Two);
    // x = 1 from subtracting the two equations, then y^2 = 4 - 1.
    const double y = std::sqrt(3.0);
    EXPECT_NEAR(r.points[0].x, 1.0, 1e-12);
    EXPECT_NEAR(r.points[0].y, y, 1e-12);
    EXPECT_NEAR(r.points[1].x, 1.0, 1e-12);
    EXPECT_NEAR(r.points[1].y, -y, 1e-12);
}

TEST(CircleIntersections, DisjointAndTangent)
{
    EXPECT_EQ(circle_intersections({{0, 0}, 1}, {{3, 0}, 1}).kind, CircleIntersection::Kind::None);
    const auto t = circle_intersections({{0, 0}, 1}, {{2, 0}, 1});
    ASSERT_EQ(t.kind, CircleIntersection::Kind::Tangent);
    EXPECT_NEAR(t.points[0].x, 1.0, 1e-12);
    EXPECT_NEAR(t.points[0].y, 0.0, 1e-12);
}

TEST(CircleIntersections, NestedCoincidentAndInvalid)
{
    EXPECT_EQ(circle_intersections({{0, 0}, 3}, {{0.5, 0}, 1}).kind, CircleIntersection::Kind::None);
    EXPECT_EQ(circle_intersections({{1, 1}, 2}, {{1, 1}, 2}).kind,
              CircleIntersection::Kind::Coincident);
    EXPECT_THROW((void)circle_intersections({{0, 0}, 0}, {{1, 0}, 1}), std::invalid_argument);
}

TEST(CircleIntersections, RandomPointsLieOnBothCircles)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> pos(-5, 5);
    std::uniform_real_distribution<double> rad(0.1, 4);
    int checked = 0;
    for (int k = 0; k < 5000; ++k) {
        const Circle a{{pos(rng), pos(rng)}, rad(rng)};
        const Circle b{{pos(rng), pos(rng)}, rad(rng)};
        const auto r = circle_intersections(a, b);
        const double d = distance(a.center, b.center);
        const bool expect = d <= a.radius + b.radius && d >= std::abs(a.radius - b.radius);
        EXPECT_EQ(r.count() > 0, expect);
        for (std::size_t i = 0; i < r.count(); ++i) {
            EXPECT_NEAR(distance(r.points[i], a.center), a.radius, 1e-9);
            EXPECT_NEAR(distance(r.points[i], b.center), b.radius, 1e-9);
            ++checked;
        }
        if (r.count() == 2) {
            EXPECT_GT(cross(b.center - a.center, r.points[0] - a.center), 0.0);
        }
    }
    EXPECT_GT(checked, 1000);
}

TEST(ExclusionInterval, WorkedExampleIsSixtyDegrees)
{
    const auto arcs = exclusion_interval({0, 0}, 2, {1, 0}, {2, 0}, 2);
    ASSERT_EQ(arcs.size(), 1u);
    EXPECT_NEAR(arcs[0].lo, -60 * kDeg, 1e-12);
    EXPECT_NEAR(arcs[0].hi, 60 * kDeg, 1e-12);
    EXPECT_FALSE(arcs[0].contains(arcs[0].hi));
    EXPECT_FALSE(arcs[0].contains(arcs[0].lo));

    // distance^2 = 8 - 8 cos(theta), so the predicate is cos(theta) > 1/2.
    for (int k = 0; k < 10000; ++k) {
        const double theta = oracle::sample_angle(k, 10000);
        if (std::abs(std::abs(theta) - 60 * kDeg) < 1e-9)
            continue;
        const bool inside = 8.0 - 8.0 * std::cos(theta) < 4.0;
        EXPECT_EQ(arcs[0].contains(theta), inside) << theta;
    }
}

TEST(ExclusionInterval, UnreachableObstacleIsEmpty)
{
    EXPECT_TRUE(exclusion_interval({0, 0}, 1, {1, 0}, {10, 0}, 1).empty());
}

TEST(ExclusionInterval, LargeClearanceCoversSemicircle)
{
    const auto arcs = exclusion_interval({0, 0}, 1, {1, 0}, {1, 0}, 2.5);
    ASSERT_EQ(arcs.size(), 1u);
    EXPECT_EQ(arcs[0], full_semicircle());
    for (int k = 0; k < 10000; ++k) {
        const double theta = oracle::sample_angle(k, 10000);
        const Point c = candidate_position({0, 0}, 1, {1, 0}, theta);
        ASSERT_LT(distance(c, {1, 0}), 2.5);
    }
}

TEST(ExclusionInterval, CoincidentCentresAreFullyExcluded)
{
    const auto arcs = exclusion_interval({0, 0}, 1, {1, 0}, {0, 0}, 1);
    ASSERT_EQ(arcs.size(), 1u);
    EXPECT_EQ(arcs[0], full_semicircle());
}

TEST(ExclusionInterval, ObstacleBehindCanSplitIntoTwoArcs)
{
    // Large clearance, obstacle behind: both flanks blocked, ahead free.
    const auto arcs = exclusion_interval({0, 0}, 1, {1, 0}, {-1.2, 0}, 2.0);
    ASSERT_EQ(arcs.size(), 2u);
    const ExclusionSet s = ExclusionSet::union_of(std::vector<AngleInterval>(arcs.begin(), arcs.end()));
    EXPECT_FALSE(s.contains(0.0));
    EXPECT_TRUE(s.contains(kHalfPi));
    EXPECT_TRUE(s.contains(-kHalfPi));
}

TEST(ExclusionInterval, MatchesSamplingOracleOnRandomConfigurations)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> pos(-3, 3);
    std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> len(0.05, 2.0);
    int mismatches = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const Point old{pos(rng), pos(rng)};
        const Point fwd = rotate({1, 0}, ang(rng));
        const double move = len(rng);
        const Point obst{pos(rng), pos(rng)};
        // Both regimes: move shorter and longer than the clearance.
        const double clearance = len(rng);
        const auto arcs = exclusion_interval(old, move, fwd, obst, clearance);
        for (int k = 0; k < 2000; ++k) {
            const double theta = oracle::sample_angle(k, 2000);
            const double d = distance(candidate_position(old, move, fwd, theta), obst);
            if (std::abs(d - clearance) < 1e-7)
                continue;
            const bool forbidden = std::any_of(arcs.begin(), arcs.end(),
                                               [&](const AngleInterval& a) { return a.contains(theta); });
            if (forbidden != (d < clearance))
                ++mismatches;
        }
    }
    EXPECT_EQ(mismatches, 0);
}

TEST(ExclusionInterval, MirrorAcrossForwardAxisMirrorsArcs)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> pos(-2, 2);
    std::uniform_real_distribution<double> len(0.1, 2.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const Point obst{pos(rng), pos(rng)};
        const double move = len(rng);
        const double clearance = len(rng);
        const auto a = exclusion_interval({0, 0}, move, {1, 0}, obst, clearance);
        const auto b = exclusion_interval({0, 0}, move, {1, 0}, {obst.x, -obst.y}, clearance);
        ASSERT_EQ(a.size(), b.size());
        std::vector<AngleInterval> mirrored;
        for (const auto& arc : b)
            mirrored.push_back({-arc.hi, -arc.lo});
        const auto sa = ExclusionSet::union_of(std::vector<AngleInterval>(a.begin(), a.end()));
        const auto sb = ExclusionSet::union_of(mirrored);
        ASSERT_EQ(sa.intervals().size(), sb.intervals().size());
        for (std::size_t i = 0; i < sa.intervals().size(); ++i) {
            EXPECT_NEAR(sa.intervals()[i].lo, sb.intervals()[i].lo, 1e-12);
            EXPECT_NEAR(sa.intervals()[i].hi, sb.intervals()[i].hi, 1e-12);
        }
    }
}

TEST(HalfPlaneExclusion, MatchesSamplingOracle)
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1, 1);
    std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
    for (int trial = 0; trial < 300; ++trial) {
        const Point old{u(rng), u(rng)};
        const Point fwd = rotate({1, 0}, ang(rng));
        const Point normal = rotate({1, 0}, ang(rng));
        const double bound = u(rng);
        const double move = 0.1 + std::abs(u(rng));
        const auto arcs = half_plane_exclusion(old, move, fwd, normal, bound);
        for (int k = 0; k < 1000; ++k) {
            const double theta = oracle::sample_angle(k, 1000);
            const double v = dot(normal, candidate_position(old, move, fwd, theta)) - bound;
            if (std::abs(v) < 1e-9)
                continue;
            const bool forbidden = std::any_of(arcs.begin(), arcs.end(),
                                               [&](const AngleInterval& a) { return a.contains(theta); });
            EXPECT_EQ(forbidden, v > 0) << trial << " " << theta;
        }
    }
}

TEST(Union, Examples)
{
    const auto merged = union_intervals(std::vector<AngleInterval>{{-60 * kDeg, -10 * kDeg},
                                                                   {-20 * kDeg, 30 * kDeg}});
    ASSERT_EQ(merged.intervals().size(), 1u);
    EXPECT_DOUBLE_EQ(merged.intervals()[0].lo, -60 * kDeg);
    EXPECT_DOUBLE_EQ(merged.intervals()[0].hi, 30 * kDeg);

    EXPECT_TRUE(union_intervals({}).empty());

    const auto touching =
        union_intervals(std::vector<AngleInterval>{{-kHalfPi, 0.0}, {0.0, kHalfPi}});
    ASSERT_EQ(touching.intervals().size(), 1u);
    EXPECT_EQ(touching.intervals()[0], full_semicircle());
    EXPECT_TRUE(touching.covers_semicircle());
}

TEST(Union, IdempotentCommutativeSubadditive)
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> a(-kHalfPi, kHalfPi);
    std::uniform_int_distribution<int> n(0, 8);
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<AngleInterval> in;
        const int count = n(rng);
        for (int k = 0; k < count; ++k) {
            double lo = a(rng);
            double hi = a(rng);
            if (lo > hi)
                std::swap(lo, hi);
            in.push_back({lo, hi});
        }
        const auto u = ExclusionSet::union_of(in);
        std::vector<AngleInterval> again(u.intervals().begin(), u.intervals().end());
        EXPECT_EQ(ExclusionSet::union_of(again), u);
        auto shuffled = in;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        EXPECT_EQ(ExclusionSet::union_of(shuffled), u);
        double total = 0.0;
        for (const auto& i : in)
            total += i.measure();
        EXPECT_LE(u.measure(), total + 1e-12);
        for (std::size_t k = 1; k < u.intervals().size(); ++k)
            EXPECT_LT(u.intervals()[k - 1].hi, u.intervals()[k].lo);
        // Membership agrees with the raw list away from endpoints.
        for (int s = 0; s < 50; ++s) {
            const double t = a(rng);
            const bool raw = std::any_of(in.begin(), in.end(), [&](const AngleInterval& i) {
                return i.contains(t);
            });
            if (raw) {
                EXPECT_TRUE(u.contains(t));
            }
        }
    }
}

TEST(BestAngle, Examples)
{
    EXPECT_EQ(best_angle(ExclusionSet{}), 0.0);
    const auto worked = ExclusionSet::union_of(std::vector<AngleInterval>{{-60 * kDeg, 60 * kDeg}});
    ASSERT_TRUE(best_angle(worked).has_value());
    EXPECT_NEAR(*best_angle(worked), -60 * kDeg, 1e-15);
    EXPECT_FALSE(best_angle(union_intervals(std::vector<AngleInterval>{full_semicircle()})));
}

TEST(BestAngle, WorkedExampleLandsOnRightTangentPoint)
{
    const auto arcs = exclusion_interval({0, 0}, 2, {1, 0}, {2, 0}, 2);
    const auto set = ExclusionSet::union_of(std::vector<AngleInterval>(arcs.begin(), arcs.end()));
    const auto theta = best_angle(set);
    ASSERT_TRUE(theta);
    const Point p = candidate_position({0, 0}, 2, {1, 0}, *theta);
    EXPECT_NEAR(p.x, 1.0, 1e-9);
    EXPECT_NEAR(p.y, -std::sqrt(3.0), 1e-9);
}

TEST(BestAngle, AgreesWithBruteForceOnRandomObstacles)
{
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> count(1, 8);
    std::uniform_real_distribution<double> r(0.3, 2.5);
    std::uniform_real_distribution<double> a(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> clear(0.2, 1.2);
    std::uniform_real_distribution<double> mv(0.3, 1.8);
    for (int trial = 0; trial < 200; ++trial) {
        const double move = mv(rng);
        std::vector<oracle::Obstacle> obstacles;
        std::vector<ArcList> arcs;
        const int n = count(rng);
        for (int k = 0; k < n; ++k) {
            const oracle::Obstacle o{rotate({r(rng), 0}, a(rng)), clear(rng)};
            obstacles.push_back(o);
            arcs.push_back(exclusion_interval({0, 0}, move, {1, 0}, o.center, o.clearance));
        }
        const auto theta = best_angle(arcs_to_set(arcs));
        const auto brute = oracle::brute_force_best({0, 0}, move, {1, 0}, obstacles);
        if (brute) {
            ASSERT_TRUE(theta) << trial;
        }
        if (!theta)
            continue;
        const Point p = candidate_position({0, 0}, move, {1, 0}, *theta);
        EXPECT_FALSE(oracle::conflicts(p, obstacles, kDistanceTolerance)) << trial;
        if (brute) {
            EXPECT_LE(std::abs(*theta), std::abs(*brute) + 0.5 * kDeg) << trial;
        }
    }
}

TEST(LowestFreeAngle, PrefersPureRightStep)
{
    EXPECT_EQ(lowest_free_angle(ExclusionSet{}), -kHalfPi);
    const auto blocked_right =
        union_intervals(std::vector<AngleInterval>{{-kHalfPi, -30 * kDeg}});
    EXPECT_NEAR(*lowest_free_angle(blocked_right), -30 * kDeg, 1e-15);
    const auto all_right = union_intervals(std::vector<AngleInterval>{{-kHalfPi, 0.0}});
    EXPECT_FALSE(lowest_free_angle(all_right));
}
