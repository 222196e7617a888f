#ifndef FEVBOT_OCCUPANCY_HPP
#define FEVBOT_OCCUPANCY_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fevbot/geometry.hpp"
#include "fevbot/grid.hpp"
#include "fevbot/sim_world.hpp"

namespace fevbot::nav {

inline constexpr double kLogOddsFree = -0.4;
inline constexpr double kLogOddsHit = 0.85;
inline constexpr double kLogOddsLimit = 3.5;

/// Log-odds occupancy belief over a fixed raster. Cells start at the 0.5
/// prior (log-odds 0) and are flagged once any beam touches them.
struct OccupancyGrid {
  GridGeometry geometry;
  std::vector<double> log_odds;
  std::vector<std::uint8_t> observed;

  static OccupancyGrid create(const GridGeometry& g);

  double value(CellIndex c) const { return log_odds[geometry.index(c)]; }
  double probability(CellIndex c) const;
  bool is_observed(CellIndex c) const { return observed[geometry.index(c)] != 0; }
};

/// Cells visited by a Bresenham walk from a to b, both ends included.
std::vector<CellIndex> trace_line(CellIndex a, CellIndex b);

/// Known-pose mapping: every finite beam lowers the cells it passes through
/// and raises the cell holding its endpoint; results are clamped to
/// +/-kLogOddsLimit. Off-grid cells are ignored.
void integrate_scan(OccupancyGrid& grid, const Pose2D& pose, const sim::LidarScan& scan);

inline OccupancyGrid update_occupancy(OccupancyGrid grid, const Pose2D& pose, const sim::LidarScan& scan)
{
  integrate_scan(grid, pose, scan);
  return grid;
}

/// Binary PGM (P5), top row = largest y. Unobserved cells are 205, others
/// 255 * (1 - p). The header comment carries the format tag and placement.
std::string to_pgm(const OccupancyGrid& grid);
void write_pgm(const OccupancyGrid& grid, const std::filesystem::path& path);

}  // namespace fevbot::nav

#endif  // FEVBOT_OCCUPANCY_HPP
