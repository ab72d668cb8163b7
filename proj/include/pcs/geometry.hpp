#pragma once

// Geometric kernel for the crossing simulator: circle intersections,
// exclusion arcs on a mover's forward semicircle, and best-position search.
//
// Angles are radians measured relative to the mover's forward direction,
// counter-clockwise positive. Negative angles are to the mover's right.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace pcs {

inline constexpr double kHalfPi = std::numbers::pi / 2.0;

/// Absolute distance tolerance (metres) for overlap and tangency checks.
inline constexpr double kDistanceTolerance = 1e-9;

/// Angular slack used when merging touching intervals.
inline constexpr double kAngleTolerance = 1e-12;

struct Point {
    double x = 0.0;
    double y = 0.0;

    constexpr Point operator+(Point o) const noexcept { return {x + o.x, y + o.y}; }
    constexpr Point operator-(Point o) const noexcept { return {x - o.x, y - o.y}; }
    constexpr Point operator*(double s) const noexcept { return {x * s, y * s}; }
    constexpr bool operator==(const Point&) const noexcept = default;
};

[[nodiscard]] inline double dot(Point a, Point b) noexcept { return a.x * b.x + a.y * b.y; }
[[nodiscard]] inline double cross(Point a, Point b) noexcept { return a.x * b.y - a.y * b.x; }
[[nodiscard]] inline double norm(Point a) noexcept { return std::hypot(a.x, a.y); }
[[nodiscard]] inline double distance(Point a, Point b) noexcept { return norm(a - b); }

/// Rotates `v` counter-clockwise by `angle`.
[[nodiscard]] inline Point rotate(Point v, double angle) noexcept
{
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

struct Circle {
    Point center;
    double radius = 0.0;
};

/// Outcome of intersecting two circles. `Coincident` means identical circles
/// (infinitely many common points); the caller picks the policy.
struct CircleIntersection {
    enum class Kind { None, Tangent, Two, Coincident };

    Kind kind = Kind::None;
    std::array<Point, 2> points{};

    [[nodiscard]] std::size_t count() const noexcept
    {
        switch (kind) {
        case Kind::Tangent: return 1;
        case Kind::Two: return 2;
        default: return 0;
        }
    }
};

/// Real solutions of the two-circle system. For two points the first one lies
/// to the left of the directed line a.center -> b.center.
/// Throws std::invalid_argument when a radius is not positive.
[[nodiscard]] CircleIntersection circle_intersections(const Circle& a, const Circle& b);

/// Open interval (lo, hi) of forbidden angles, clipped to [-pi/2, pi/2].
/// An endpoint clipped exactly to +-pi/2 also forbids that endpoint, since the
/// forbidden region continues past the edge of the semicircle.
struct AngleInterval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] double measure() const noexcept { return hi - lo; }
    [[nodiscard]] bool empty() const noexcept { return !(lo < hi); }
    [[nodiscard]] bool contains(double angle) const noexcept;
    constexpr bool operator==(const AngleInterval&) const noexcept = default;
};

/// Up to two arcs; a single forbidden region can wrap around behind the mover
/// and enter the semicircle from both sides.
class ArcList {
public:
    void push(AngleInterval a)
    {
        if (!a.empty() && size_ < arcs_.size())
            arcs_[size_++] = a;
    }
    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    [[nodiscard]] bool empty() const noexcept { return size_ == 0; }
    [[nodiscard]] const AngleInterval* begin() const noexcept { return arcs_.data(); }
    [[nodiscard]] const AngleInterval* end() const noexcept { return arcs_.data() + size_; }
    [[nodiscard]] const AngleInterval& operator[](std::size_t i) const { return arcs_[i]; }

private:
    std::array<AngleInterval, 2> arcs_{};
    std::size_t size_ = 0;
};

/// Sorted, pairwise-disjoint union of forbidden intervals.
class ExclusionSet {
public:
    ExclusionSet() = default;

    /// Minimal disjoint cover of `intervals`; touching intervals are merged.
    [[nodiscard]] static ExclusionSet union_of(std::span<const AngleInterval> intervals);

    [[nodiscard]] std::span<const AngleInterval> intervals() const noexcept { return intervals_; }
    [[nodiscard]] bool empty() const noexcept { return intervals_.empty(); }
    [[nodiscard]] double measure() const noexcept;
    [[nodiscard]] bool contains(double angle) const noexcept;
    /// True when no angle of the closed semicircle is free.
    [[nodiscard]] bool covers_semicircle() const noexcept;

    bool operator==(const ExclusionSet&) const = default;

private:
    std::vector<AngleInterval> intervals_;
};

/// Free function form of ExclusionSet::union_of.
[[nodiscard]] inline ExclusionSet union_intervals(std::span<const AngleInterval> intervals)
{
    return ExclusionSet::union_of(intervals);
}

/// The whole forward semicircle, boundaries included.
[[nodiscard]] inline AngleInterval full_semicircle() noexcept { return {-kHalfPi, kHalfPi}; }

/// Angles theta in [-pi/2, pi/2] with cos(theta - phi) > threshold.
/// phi may be any angle; the forbidden region is wrapped onto the semicircle.
[[nodiscard]] ArcList arcs_where_cos_exceeds(double phi, double threshold);

/// Angles whose candidate centre old + move_dist * rotate(forward, theta) lies
/// strictly closer than `clearance` to `obstacle`. Identical centres with
/// move_dist equal to clearance (coincident circles) are fully excluded.
[[nodiscard]] ArcList exclusion_interval(Point old, double move_dist, Point forward,
                                         Point obstacle, double clearance);

/// Angles whose candidate centre violates dot(normal, p) <= bound.
[[nodiscard]] ArcList half_plane_exclusion(Point old, double move_dist, Point forward,
                                           Point normal, double bound);

/// Free angle with maximal forward progress (max cos theta). Ties between
/// +theta and -theta go to the mover's right (negative angle). Empty when the
/// whole semicircle is forbidden.
[[nodiscard]] std::optional<double> best_angle(const ExclusionSet& excluded);

/// Smallest free angle in [-pi/2, upper). Used by the stuck-tilt rule, which
/// prefers a pure step to the right and rotates toward forward from there.
[[nodiscard]] std::optional<double> lowest_free_angle(const ExclusionSet& excluded,
                                                      double upper = 0.0);

/// Candidate centre reached by stepping `move_dist` at `theta` from `old`.
[[nodiscard]] inline Point candidate_position(Point old, double move_dist, Point forward,
                                              double theta) noexcept
{
    return old + rotate(forward, theta) * move_dist;
}

} // namespace pcs
