#pragma once

// Crosswalk frame: the crossing runs along x from the left curb (x = beta) to
// the right curb (x = beta + length); y spans the marked width, with a buffer
// strip above and below.
//
//   waiting area  |        crosswalk         |  waiting area
//   [0, beta]     |  [beta, beta + length]   |  [beta + length, 2 beta + length]

#include "pcs/geometry.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace pcs {

using Rng = std::mt19937_64;

enum class Side {
    Left,  ///< starts west of the crosswalk, walks +x ("W2E")
    Right, ///< starts east of the crosswalk, walks -x ("E2W")
};

[[nodiscard]] std::string_view to_string(Side side) noexcept;

/// Unit walking direction for pedestrians starting on `side`.
[[nodiscard]] inline Point forward_of(Side side) noexcept
{
    return side == Side::Left ? Point{1.0, 0.0} : Point{-1.0, 0.0};
}

/// Coordinate along the walking direction; grows as the pedestrian advances.
[[nodiscard]] inline double progress_of(Side side, Point p) noexcept
{
    return side == Side::Left ? p.x : -p.x;
}

class CrosswalkLayout {
public:
    /// Throws ValidationError naming the first non-positive dimension.
    CrosswalkLayout(double beta, double width, double length, double buffer);

    [[nodiscard]] double beta() const noexcept { return beta_; }
    [[nodiscard]] double width() const noexcept { return width_; }
    [[nodiscard]] double length() const noexcept { return length_; }
    [[nodiscard]] double buffer() const noexcept { return buffer_; }

    [[nodiscard]] double left_curb() const noexcept { return beta_; }
    [[nodiscard]] double right_curb() const noexcept { return beta_ + length_; }
    [[nodiscard]] double lower_edge() const noexcept { return -buffer_; }
    [[nodiscard]] double upper_edge() const noexcept { return width_ + buffer_; }

    /// Curb the pedestrian starts from.
    [[nodiscard]] double start_curb(Side side) const noexcept
    {
        return side == Side::Left ? left_curb() : right_curb();
    }
    /// Curb the pedestrian must reach.
    [[nodiscard]] double finish_curb(Side side) const noexcept
    {
        return side == Side::Left ? right_curb() : left_curb();
    }

    bool operator==(const CrosswalkLayout&) const = default;

private:
    double beta_;
    double width_;
    double length_;
    double buffer_;
};

[[nodiscard]] CrosswalkLayout make_layout(double beta, double width, double length, double buffer);

enum class PlacementKind { Normal, Poisson, T };

[[nodiscard]] std::string_view to_string(PlacementKind kind) noexcept;

struct PlacementDistribution {
    PlacementKind kind = PlacementKind::Normal;
    double poisson_lambda = 10.0; ///< count mean for the Poisson variant
    double t_dof = 5.0;           ///< degrees of freedom for the T variant

    bool operator==(const PlacementDistribution&) const = default;
};

/// Per-axis containment z-score. Both the lateral position and the curb
/// offset are drawn so that each stays inside its half-extent with
/// probability sqrt(0.955); jointly 95.5% land in the standard waiting area.
/// z = Phi^-1((1 + sqrt(0.955)) / 2).
inline constexpr double kWaitingAreaZ = 2.277456394889001;

/// One standing point drawn from the placement distribution, without any
/// overlap handling. Left: x = beta - |offset|; Right: x = beta + L + |offset|.
[[nodiscard]] Point sample_standing_point(const CrosswalkLayout& layout, Side side,
                                          const PlacementDistribution& dist, Rng& rng);

/// Moves a point that lies on the roadway back to the starting curb.
[[nodiscard]] Point clamp_to_waiting_side(const CrosswalkLayout& layout, Side side, Point p) noexcept;

/// Draws one standing centre per entry of `standing_radii` such that no two
/// circles (including `occupied`) overlap. Each pedestrian gets up to 100
/// fresh draws, then a deterministic spiral search around the last draw.
/// Throws CapacityError once 1000 spiral probes have failed in total.
[[nodiscard]] std::vector<Point> sample_initial_positions(const CrosswalkLayout& layout, Side side,
                                                          std::span<const double> standing_radii,
                                                          const PlacementDistribution& dist,
                                                          Rng& rng,
                                                          std::span<const Circle> occupied = {});

/// Centre-point containment in crosswalk plus buffer strips.
[[nodiscard]] bool in_motion_area(const CrosswalkLayout& layout, Point p) noexcept;

/// True when y lies inside the buffered band, regardless of x.
[[nodiscard]] bool in_lateral_band(const CrosswalkLayout& layout, Point p) noexcept;

/// Finish line: the far curb, inclusive.
[[nodiscard]] bool has_crossed(const CrosswalkLayout& layout, Point p, Side side) noexcept;

/// Pure lateral step back toward the buffered band, clamped at its edge.
/// Throws std::logic_error when p is already inside the band.
[[nodiscard]] Point reentry_step(const CrosswalkLayout& layout, Point p, double speed,
                                 double step_len);

} // namespace pcs
