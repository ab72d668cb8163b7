#pragma once

#include "pcs/geometry.hpp"

#include <cstdint>
#include <unordered_map>
#include <vector>

namespace pcs {

/// Uniform bucket grid over integer ids. Each id sits in exactly one cell.
class SpatialGrid {
public:
    explicit SpatialGrid(double cell_size);

    void insert(int id, Point p);
    void move(int id, Point from, Point to);
    void erase(int id, Point p);

    /// Ids whose cell lies within `radius` of `p`, in no particular order.
    /// A superset of the ids within `radius`; callers filter by distance.
    [[nodiscard]] std::vector<int> candidates(Point p, double radius) const;

    [[nodiscard]] double cell_size() const noexcept { return cell_; }

private:
    using Key = std::uint64_t;
    [[nodiscard]] std::int64_t coord(double v) const noexcept;
    [[nodiscard]] static Key key(std::int64_t cx, std::int64_t cy) noexcept;

    double cell_;
    std::unordered_map<Key, std::vector<int>> cells_;
};

} // namespace pcs
