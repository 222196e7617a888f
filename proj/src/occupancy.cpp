#include "fevbot/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace fevbot::nav {

OccupancyGrid OccupancyGrid::create(const GridGeometry& g)
{
  if (g.width <= 0 || g.height <= 0 || !(g.resolution > 0.0))
    throw std::invalid_argument("occupancy grid needs positive size and resolution");
  return {g, std::vector<double>(g.size(), 0.0), std::vector<std::uint8_t>(g.size(), 0)};
}

double OccupancyGrid::probability(CellIndex c) const
{
  return 1.0 - 1.0 / (1.0 + std::exp(value(c)));
}

std::vector<CellIndex> trace_line(CellIndex a, CellIndex b)
{
  std::vector<CellIndex> cells;
  const int dx = std::abs(b.x - a.x);
  const int dy = -std::abs(b.y - a.y);
  const int sx = a.x < b.x ? 1 : -1;
  const int sy = a.y < b.y ? 1 : -1;
  int err = dx + dy;
  CellIndex c = a;
  cells.reserve(static_cast<std::size_t>(std::max(dx, -dy)) + 1);
  while (true) {
    cells.push_back(c);
    if (c == b)
      break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      c.x += sx;
    }
    if (e2 <= dx) {
      err += dx;
      c.y += sy;
    }
  }
  return cells;
}

void integrate_scan(OccupancyGrid& grid, const Pose2D& pose, const sim::LidarScan& scan)
{
  const auto& g = grid.geometry;
  const CellIndex origin = g.world_to_cell_unchecked(pose.x, pose.y);
  auto bump = [&](CellIndex c, double delta) {
    if (!g.contains(c))
      return;
    const auto i = g.index(c);
    grid.log_odds[i] = std::clamp(grid.log_odds[i] + delta, -kLogOddsLimit, kLogOddsLimit);
    grid.observed[i] = 1;
  };

  for (std::size_t b = 0; b < scan.ranges.size(); ++b) {
    const double r = scan.ranges[b];
    if (!sim::LidarScan::is_return(r))
      continue;
    const double a = pose.theta + scan.angles[b];
    const CellIndex end = g.world_to_cell_unchecked(pose.x + r * std::cos(a), pose.y + r * std::sin(a));
    const auto cells = trace_line(origin, end);
    for (std::size_t k = 0; k + 1 < cells.size(); ++k)
      bump(cells[k], kLogOddsFree);
    bump(end, kLogOddsHit);
  }
}

std::string to_pgm(const OccupancyGrid& grid)
{
  const auto& g = grid.geometry;
  char header[256];
  std::snprintf(header, sizeof header, "P5\n# fevbot.map/1 resolution=%.17g origin=%.17g,%.17g\n%d %d\n255\n",
                g.resolution, g.origin_x, g.origin_y, g.width, g.height);
  std::string out = header;
  out.reserve(out.size() + g.size());
  for (int y = g.height - 1; y >= 0; --y) {
    for (int x = 0; x < g.width; ++x) {
      const CellIndex c{x, y};
      unsigned char px = 205;
      if (grid.is_observed(c))
        px = static_cast<unsigned char>(std::lround(255.0 * (1.0 - grid.probability(c))));
      out.push_back(static_cast<char>(px));
    }
  }
  return out;
}

void write_pgm(const OccupancyGrid& grid, const std::filesystem::path& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error(path.string() + ": cannot open for writing");
  const auto data = to_pgm(grid);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

}  // namespace fevbot::nav
