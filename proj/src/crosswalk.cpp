#include "pcs/crosswalk.hpp"

#include "pcs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pcs {

namespace {

constexpr int kResamplesPerPedestrian = 100;
constexpr int kSpiralFailureBudget = 1000;
constexpr double kGoldenAngle = 2.399963229728653;

// Zero-mean, unit-variance deviate shaped by the placement kind.
double unit_deviate(const PlacementDistribution& dist, Rng& rng)
{
    switch (dist.kind) {
    case PlacementKind::Normal:
        return std::normal_distribution<double>(0.0, 1.0)(rng);
    case PlacementKind::Poisson: {
        // Counts are smeared over their unit cell so that draws do not sit on
        // a lattice; the extra 1/12 variance is folded into the scale.
        const double count =
            static_cast<double>(std::poisson_distribution<long>(dist.poisson_lambda)(rng));
        const double jitter = std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
        return (count + jitter - dist.poisson_lambda) / std::sqrt(dist.poisson_lambda + 1.0 / 12.0);
    }
    case PlacementKind::T: {
        const double t = std::student_t_distribution<double>(dist.t_dof)(rng);
        return t * std::sqrt((dist.t_dof - 2.0) / dist.t_dof);
    }
    }
    return 0.0;
}

bool overlaps_any(Point p, double radius, std::span<const Circle> placed)
{
    return std::any_of(placed.begin(), placed.end(), [&](const Circle& c) {
        return distance(p, c.center) < radius + c.radius - kDistanceTolerance;
    });
}

} // namespace

std::string_view to_string(Side side) noexcept
{
    return side == Side::Left ? "left" : "right";
}

std::string_view to_string(PlacementKind kind) noexcept
{
    switch (kind) {
    case PlacementKind::Normal: return "normal";
    case PlacementKind::Poisson: return "poisson";
    case PlacementKind::T: return "t";
    }
    return "normal";
}

CrosswalkLayout::CrosswalkLayout(double beta, double width, double length, double buffer)
    : beta_(beta), width_(width), length_(length), buffer_(buffer)
{
    const auto require = [](const char* key, double v) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw ValidationError(key, "must be a finite value > 0, got " + std::to_string(v));
    };
    require("beta", beta);
    require("width", width);
    require("length", length);
    require("buffer", buffer);
}

CrosswalkLayout make_layout(double beta, double width, double length, double buffer)
{
    return CrosswalkLayout(beta, width, length, buffer);
}

Point sample_standing_point(const CrosswalkLayout& layout, Side side,
                            const PlacementDistribution& dist, Rng& rng)
{
    const double y_sigma = layout.width() / (2.0 * kWaitingAreaZ);
    const double offset_sigma = layout.beta() / kWaitingAreaZ;

    const double y = layout.width() / 2.0 + y_sigma * unit_deviate(dist, rng);
    const double offset = std::abs(offset_sigma * unit_deviate(dist, rng));
    const double x = side == Side::Left ? layout.left_curb() - offset : layout.right_curb() + offset;
    return {x, y};
}

Point clamp_to_waiting_side(const CrosswalkLayout& layout, Side side, Point p) noexcept
{
    if (side == Side::Left)
        p.x = std::min(p.x, layout.left_curb());
    else
        p.x = std::max(p.x, layout.right_curb());
    return p;
}

std::vector<Point> sample_initial_positions(const CrosswalkLayout& layout, Side side,
                                            std::span<const double> standing_radii,
                                            const PlacementDistribution& dist, Rng& rng,
                                            std::span<const Circle> occupied)
{
    std::vector<Circle> placed(occupied.begin(), occupied.end());
    std::vector<Point> out;
    out.reserve(standing_radii.size());
    int spiral_failures = 0;

    for (double radius : standing_radii) {
        Point candidate{};
        bool found = false;
        for (int attempt = 0; attempt < kResamplesPerPedestrian && !found; ++attempt) {
            candidate = sample_standing_point(layout, side, dist, rng);
            found = !overlaps_any(candidate, radius, placed);
        }
        const Point origin = candidate;
        for (int k = 1; !found; ++k) {
            const double angle = kGoldenAngle * k;
            const double reach = radius * std::sqrt(static_cast<double>(k));
            candidate = clamp_to_waiting_side(
                layout, side, origin + Point{std::cos(angle), std::sin(angle)} * reach);
            found = !overlaps_any(candidate, radius, placed);
            if (!found && ++spiral_failures > kSpiralFailureBudget)
                throw CapacityError("waiting area on the " + std::string(to_string(side)) +
                                    " side cannot hold " + std::to_string(standing_radii.size()) +
                                    " pedestrians without overlap");
        }
        placed.push_back({candidate, radius});
        out.push_back(candidate);
    }
    return out;
}

bool in_lateral_band(const CrosswalkLayout& layout, Point p) noexcept
{
    return p.y >= layout.lower_edge() && p.y <= layout.upper_edge();
}

bool in_motion_area(const CrosswalkLayout& layout, Point p) noexcept
{
    return p.x >= layout.left_curb() && p.x <= layout.right_curb() && in_lateral_band(layout, p);
}

bool has_crossed(const CrosswalkLayout& layout, Point p, Side side) noexcept
{
    return side == Side::Left ? p.x >= layout.right_curb() : p.x <= layout.left_curb();
}

Point reentry_step(const CrosswalkLayout& layout, Point p, double speed, double step_len)
{
    if (in_lateral_band(layout, p))
        throw std::logic_error("reentry_step: point is already inside the buffered band");
    const double reach = speed * step_len;
    if (p.y > layout.upper_edge())
        p.y = std::max(layout.upper_edge(), p.y - reach);
    else
        p.y = std::min(layout.lower_edge(), p.y + reach);
    return p;
}

} // namespace pcs
