#include "pcs/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace pcs {

CircleIntersection circle_intersections(const Circle& a, const Circle& b)
{
    if (!(a.radius > 0.0) || !(b.radius > 0.0))
        throw std::invalid_argument("circle_intersections: radii must be positive");

    CircleIntersection out;
    const Point delta = b.center - a.center;
    const double d = norm(delta);

    if (d <= kDistanceTolerance) {
        if (std::abs(a.radius - b.radius) <= kDistanceTolerance)
            out.kind = CircleIntersection::Kind::Coincident;
        return out;
    }

    const double sum = a.radius + b.radius;
    const double diff = std::abs(a.radius - b.radius);
    if (d > sum + kDistanceTolerance || d < diff - kDistanceTolerance)
        return out;

    const Point unit = delta * (1.0 / d);
    // Distance from a.center to the radical line along the centre axis.
    const double along = (d * d + a.radius * a.radius - b.radius * b.radius) / (2.0 * d);
    const double h2 = a.radius * a.radius - along * along;
    const Point base = a.center + unit * along;

    if (std::abs(d - sum) <= kDistanceTolerance || std::abs(d - diff) <= kDistanceTolerance ||
        h2 <= 0.0) {
        out.kind = CircleIntersection::Kind::Tangent;
        out.points[0] = base;
        return out;
    }

    const double h = std::sqrt(h2);
    const Point left{-unit.y, unit.x};
    out.kind = CircleIntersection::Kind::Two;
    out.points[0] = base + left * h;
    out.points[1] = base - left * h;
    return out;
}

bool AngleInterval::contains(double angle) const noexcept
{
    if (lo < angle && angle < hi)
        return true;
    if (lo <= -kHalfPi && angle <= -kHalfPi)
        return true;
    return hi >= kHalfPi && angle >= kHalfPi;
}

ExclusionSet ExclusionSet::union_of(std::span<const AngleInterval> intervals)
{
    std::vector<AngleInterval> sorted;
    sorted.reserve(intervals.size());
    for (AngleInterval a : intervals) {
        a.lo = std::max(a.lo, -kHalfPi);
        a.hi = std::min(a.hi, kHalfPi);
        if (!a.empty())
            sorted.push_back(a);
    }
    std::sort(sorted.begin(), sorted.end(), [](const AngleInterval& l, const AngleInterval& r) {
        return l.lo < r.lo || (l.lo == r.lo && l.hi < r.hi);
    });

    ExclusionSet set;
    for (const AngleInterval& a : sorted) {
        if (!set.intervals_.empty() && a.lo <= set.intervals_.back().hi + kAngleTolerance)
            set.intervals_.back().hi = std::max(set.intervals_.back().hi, a.hi);
        else
            set.intervals_.push_back(a);
    }
    return set;
}

double ExclusionSet::measure() const noexcept
{
    double total = 0.0;
    for (const auto& a : intervals_)
        total += a.measure();
    return total;
}

bool ExclusionSet::contains(double angle) const noexcept
{
    return std::any_of(intervals_.begin(), intervals_.end(),
                       [angle](const AngleInterval& a) { return a.contains(angle); });
}

bool ExclusionSet::covers_semicircle() const noexcept
{
    return intervals_.size() == 1 && intervals_.front().lo <= -kHalfPi &&
           intervals_.front().hi >= kHalfPi;
}

ArcList arcs_where_cos_exceeds(double phi, double threshold)
{
    ArcList out;
    if (threshold >= 1.0)
        return out;
    if (threshold <= -1.0) {
        out.push(full_semicircle());
        return out;
    }

    const double half_width = std::acos(threshold);
    const double centre = std::remainder(phi, 2.0 * std::numbers::pi);
    constexpr double kTwoPi = 2.0 * std::numbers::pi;
    for (double shift : {-kTwoPi, 0.0, kTwoPi}) {
        const double lo = std::max(centre - half_width + shift, -kHalfPi);
        const double hi = std::min(centre + half_width + shift, kHalfPi);
        if (lo < hi)
            out.push({lo, hi});
    }
    return out;
}

ArcList exclusion_interval(Point old, double move_dist, Point forward, Point obstacle,
                           double clearance)
{
    if (!(move_dist > 0.0))
        throw std::invalid_argument("exclusion_interval: move_dist must be positive");

    const Point rel = obstacle - old;
    const double dist = norm(rel);
    if (dist <= kDistanceTolerance) {
        ArcList out;
        // Every candidate sits exactly move_dist from the obstacle.
        if (move_dist < clearance + kDistanceTolerance)
            out.push(full_semicircle());
        return out;
    }

    const double phi = std::atan2(cross(forward, rel), dot(forward, rel));
    const double threshold =
        (move_dist * move_dist + dist * dist - clearance * clearance) / (2.0 * move_dist * dist);
    return arcs_where_cos_exceeds(phi, threshold);
}

ArcList half_plane_exclusion(Point old, double move_dist, Point forward, Point normal,
                             double bound)
{
    const double slack = bound - dot(normal, old);
    const Point side{-forward.y, forward.x};
    const double a = dot(normal, forward);
    const double b = dot(normal, side);
    const double rho = std::hypot(a, b);
    if (!(move_dist > 0.0) || rho == 0.0) {
        ArcList out;
        if (slack < 0.0)
            out.push(full_semicircle());
        return out;
    }
    return arcs_where_cos_exceeds(std::atan2(b, a), slack / (move_dist * rho));
}

std::optional<double> best_angle(const ExclusionSet& excluded)
{
    const auto intervals = excluded.intervals();
    const auto blocking = std::find_if(intervals.begin(), intervals.end(),
                                       [](const AngleInterval& a) { return a.contains(0.0); });
    if (blocking == intervals.end())
        return 0.0;

    const bool right_open = blocking->lo > -kHalfPi;
    const bool left_open = blocking->hi < kHalfPi;
    if (right_open && left_open) {
        // Ties go right.
        return (-blocking->lo <= blocking->hi + kAngleTolerance) ? blocking->lo : blocking->hi;
    }
    if (right_open)
        return blocking->lo;
    if (left_open)
        return blocking->hi;
    return std::nullopt;
}

std::optional<double> lowest_free_angle(const ExclusionSet& excluded, double upper)
{
    const auto intervals = excluded.intervals();
    if (intervals.empty() || intervals.front().lo > -kHalfPi)
        return -kHalfPi < upper ? std::optional<double>(-kHalfPi) : std::nullopt;
    const double candidate = intervals.front().hi;
    if (candidate < upper && candidate < kHalfPi)
        return candidate;
    return std::nullopt;
}

} // namespace pcs
