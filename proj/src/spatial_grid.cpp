#include "pcs/spatial_grid.hpp"

#include <algorithm>
#include <stdexcept>

namespace pcs {

SpatialGrid::SpatialGrid(double cell_size) : cell_(cell_size)
{
    if (!(cell_size > 0.0) || !std::isfinite(cell_size))
        throw std::invalid_argument("grid cell size must be a finite value > 0");
}

std::int64_t SpatialGrid::coord(double v) const noexcept
{
    return static_cast<std::int64_t>(std::floor(v / cell_));
}

SpatialGrid::Key SpatialGrid::key(std::int64_t cx, std::int64_t cy) noexcept
{
    return (static_cast<Key>(static_cast<std::uint32_t>(cx)) << 32) |
           static_cast<std::uint32_t>(cy);
}

void SpatialGrid::insert(int id, Point p)
{
    cells_[key(coord(p.x), coord(p.y))].push_back(id);
}

void SpatialGrid::erase(int id, Point p)
{
    const auto it = cells_.find(key(coord(p.x), coord(p.y)));
    if (it == cells_.end())
        return;
    auto& bucket = it->second;
    bucket.erase(std::remove(bucket.begin(), bucket.end(), id), bucket.end());
    if (bucket.empty())
        cells_.erase(it);
}

void SpatialGrid::move(int id, Point from, Point to)
{
    if (coord(from.x) == coord(to.x) && coord(from.y) == coord(to.y))
        return;
    erase(id, from);
    insert(id, to);
}

std::vector<int> SpatialGrid::candidates(Point p, double radius) const
{
    std::vector<int> out;
    const std::int64_t x0 = coord(p.x - radius);
    const std::int64_t x1 = coord(p.x + radius);
    const std::int64_t y0 = coord(p.y - radius);
    const std::int64_t y1 = coord(p.y + radius);
    for (std::int64_t cx = x0; cx <= x1; ++cx)
        for (std::int64_t cy = y0; cy <= y1; ++cy)
            if (const auto it = cells_.find(key(cx, cy)); it != cells_.end())
                out.insert(out.end(), it->second.begin(), it->second.end());
    return out;
}

} // namespace pcs
