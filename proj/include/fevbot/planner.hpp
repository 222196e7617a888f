#ifndef FEVBOT_PLANNER_HPP
#define FEVBOT_PLANNER_HPP

#include <cstdint>
#include <numbers>
#include <span>
#include <string_view>
#include <vector>

#include "fevbot/geometry.hpp"
#include "fevbot/grid.hpp"
#include "fevbot/kernels.hpp"
#include "fevbot/occupancy.hpp"

namespace fevbot::nav {

inline constexpr double kMaxInflationCost = 252.0;

/// Cell costs are rounded to this step. Costs then are dyadic rationals, so
/// path sums are exact in double precision regardless of summation order.
inline constexpr double kCostQuantum = 1.0 / 64.0;

struct PlannerParams {
  double cost_factor = 0.8;
  double neutral_cost = 50.0;
  double inflation_radius = 0.35;  // robot radius 0.25 + 0.1
  double occupied_threshold = 0.65;
  double inscribed_radius = 0.35;  // cells this close to an obstacle are closed to the planner
};

/// Traversal costs derived from an occupancy grid.
struct Costmap {
  GridGeometry geometry;
  std::vector<std::uint8_t> lethal;
  std::vector<double> obstacle_distance;  // metres to nearest lethal cell centre
  std::vector<double> inflation;          // [0, 252]
  std::vector<double> cell_cost;          // neutral + factor * inflation, quantised
  double inscribed_radius = 0.0;

  bool is_lethal(CellIndex c) const { return lethal[geometry.index(c)] != 0; }
  /// Free but within the inscribed radius of a lethal cell.
  bool is_inscribed(CellIndex c) const
  {
    const auto i = geometry.index(c);
    return !lethal[i] && obstacle_distance[i] <= inscribed_radius;
  }
  double cost(CellIndex c) const { return cell_cost[geometry.index(c)]; }
  double min_cell_cost() const;
};

double inflation_cost(double distance, double inflation_radius);

Costmap build_costmap(GridGeometry geometry, std::vector<std::uint8_t> lethal, const PlannerParams& params,
                      kernels::Execution ex = kernels::Execution::parallel);

/// Lethal = occupancy probability above params.occupied_threshold.
Costmap build_costmap(const OccupancyGrid& grid, const PlannerParams& params,
                      kernels::Execution ex = kernels::Execution::parallel);

/// Cost of a path split into its orthogonal and diagonal parts. Both parts
/// are exact sums of quantised half-cell costs; value() folds in sqrt(2).
struct PathCost {
  double straight = 0.0;
  double diagonal = 0.0;

  double value() const { return straight + std::numbers::sqrt2 * diagonal; }
  bool operator==(const PathCost&) const = default;
};

/// Weight of one 8-connected move: step length times the mean endpoint cost.
PathCost step_cost(const Costmap& map, CellIndex from, CellIndex to);
PathCost path_cost(const Costmap& map, std::span<const CellIndex> cells);

enum class PlanStatus { ok, no_path, invalid_start, invalid_goal };

std::string_view to_string(PlanStatus s);

struct PlanResult {
  PlanStatus status = PlanStatus::no_path;
  std::vector<Pose2D> path;     // cell centres, start to goal
  std::vector<CellIndex> cells;
  PathCost cost;

  bool ok() const { return status == PlanStatus::ok; }
};

/// 8-connected A* with a Euclidean heuristic scaled by the cheapest cell
/// cost. Inscribed cells are closed unless the start or the goal is one. Intermediate waypoints face the next one; the last carries the
/// goal heading.
/// Diagonal moves may not cut the corner of a lethal cell.
PlanResult plan_global(const Costmap& map, const Pose2D& start, const Pose2D& goal);

PlanResult plan_global(const OccupancyGrid& grid, const PlannerParams& params, const Pose2D& start,
                       const Pose2D& goal);

}  // namespace fevbot::nav

#endif  // FEVBOT_PLANNER_HPP
