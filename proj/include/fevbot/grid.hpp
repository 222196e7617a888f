#ifndef FEVBOT_GRID_HPP
#define FEVBOT_GRID_HPP

#include <cmath>
#include <cstddef>
#include <optional>

#include "fevbot/geometry.hpp"

namespace fevbot {

struct CellIndex {
  int x = 0;
  int y = 0;

  bool operator==(const CellIndex&) const = default;
};

/// Placement of a row-major cell raster in world coordinates.
struct GridGeometry {
  double resolution = 0.05;  // m/cell
  double origin_x = 0.0;     // world position of the min corner of cell (0, 0)
  double origin_y = 0.0;
  int width = 0;
  int height = 0;

  std::size_t size() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }

  bool contains(CellIndex c) const { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }

  std::size_t index(CellIndex c) const
  {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(c.x);
  }

  CellIndex cell_at(std::size_t i) const
  {
    return {static_cast<int>(i % static_cast<std::size_t>(width)), static_cast<int>(i / static_cast<std::size_t>(width))};
  }

  /// Cell containing a world point; nullopt when off-grid.
  std::optional<CellIndex> world_to_cell(double x, double y) const
  {
    const CellIndex c{static_cast<int>(std::floor((x - origin_x) / resolution)),
                      static_cast<int>(std::floor((y - origin_y) / resolution))};
    if (!contains(c))
      return std::nullopt;
    return c;
  }

  /// Unchecked variant; the result may lie outside the grid.
  CellIndex world_to_cell_unchecked(double x, double y) const
  {
    return {static_cast<int>(std::floor((x - origin_x) / resolution)),
            static_cast<int>(std::floor((y - origin_y) / resolution))};
  }

  Point2D cell_center(CellIndex c) const
  {
    return {origin_x + (c.x + 0.5) * resolution, origin_y + (c.y + 0.5) * resolution};
  }
};

}  // namespace fevbot

#endif  // FEVBOT_GRID_HPP
