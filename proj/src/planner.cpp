#include "fevbot/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

namespace fevbot::nav {

namespace {

constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};

double quantize(double c)
{
  return std::round(c / kCostQuantum) * kCostQuantum;
}

}  // namespace

std::string_view to_string(PlanStatus s)
{
  switch (s) {
    case PlanStatus::ok: return "ok";
    case PlanStatus::no_path: return "no_path";
    case PlanStatus::invalid_start: return "invalid_start";
    case PlanStatus::invalid_goal: return "invalid_goal";
  }
  return "?";
}

double inflation_cost(double distance, double inflation_radius)
{
  if (!(distance < inflation_radius))
    return 0.0;
  return kMaxInflationCost * (1.0 - std::max(distance, 0.0) / inflation_radius);
}

double Costmap::min_cell_cost() const
{
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cell_cost.size(); ++i)
    if (!lethal[i])
      m = std::min(m, cell_cost[i]);
  return m;
}

Costmap build_costmap(GridGeometry geometry, std::vector<std::uint8_t> lethal, const PlannerParams& params,
                      kernels::Execution ex)
{
  Costmap map;
  map.geometry = geometry;
  map.lethal = std::move(lethal);
  map.inscribed_radius = params.inscribed_radius;
  map.obstacle_distance = kernels::distance_field(ex, map.lethal, geometry.width, geometry.height);
  map.inflation.resize(geometry.size());
  map.cell_cost.resize(geometry.size());
  for (std::size_t i = 0; i < geometry.size(); ++i) {
    map.obstacle_distance[i] *= geometry.resolution;
    map.inflation[i] = inflation_cost(map.obstacle_distance[i], params.inflation_radius);
    map.cell_cost[i] = quantize(params.neutral_cost + params.cost_factor * map.inflation[i]);
  }
  return map;
}

Costmap build_costmap(const OccupancyGrid& grid, const PlannerParams& params, kernels::Execution ex)
{
  const double threshold = std::log(params.occupied_threshold / (1.0 - params.occupied_threshold));
  std::vector<std::uint8_t> lethal(grid.geometry.size());
  for (std::size_t i = 0; i < lethal.size(); ++i)
    lethal[i] = grid.log_odds[i] > threshold ? 1 : 0;
  return build_costmap(grid.geometry, std::move(lethal), params, ex);
}

PathCost step_cost(const Costmap& map, CellIndex from, CellIndex to)
{
  const double mean = (map.cost(from) + map.cost(to)) / 2.0;
  if (from.x != to.x && from.y != to.y)
    return {0.0, mean};
  return {mean, 0.0};
}

PathCost path_cost(const Costmap& map, std::span<const CellIndex> cells)
{
  PathCost total;
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const auto s = step_cost(map, cells[i - 1], cells[i]);
    total.straight += s.straight;
    total.diagonal += s.diagonal;
  }
  return total;
}

PlanResult plan_global(const Costmap& map, const Pose2D& start, const Pose2D& goal)
{
  const auto& g = map.geometry;
  PlanResult result;
  const auto s = g.world_to_cell(start.x, start.y);
  if (!s || map.is_lethal(*s)) {
    result.status = PlanStatus::invalid_start;
    return result;
  }
  const auto t = g.world_to_cell(goal.x, goal.y);
  if (!t || map.is_lethal(*t)) {
    result.status = PlanStatus::invalid_goal;
    return result;
  }

  const bool relaxed = map.is_inscribed(*s) || map.is_inscribed(*t);
  auto closed_to_path = [&](CellIndex c) { return map.is_lethal(c) || (!relaxed && map.is_inscribed(c)); };

  const double h_scale = map.min_cell_cost();
  const Point2D goal_center{static_cast<double>(t->x), static_cast<double>(t->y)};
  auto heuristic = [&](CellIndex c) { return std::hypot(c.x - goal_center.x, c.y - goal_center.y) * h_scale; };

  const std::size_t n = g.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<PathCost> cost(n);
  std::vector<double> best(n, kInf);
  std::vector<std::int64_t> parent(n, -1);
  std::vector<std::uint8_t> closed(n, 0);

  using Entry = std::tuple<double, double, std::size_t>;  // f, h, index
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  const auto si = g.index(*s);
  const auto ti = g.index(*t);
  best[si] = 0.0;
  open.emplace(heuristic(*s), heuristic(*s), si);

  while (!open.empty()) {
    const auto [f, h, i] = open.top();
    open.pop();
    if (closed[i])
      continue;
    closed[i] = 1;
    if (i == ti)
      break;
    const CellIndex c = g.cell_at(i);
    for (int k = 0; k < 8; ++k) {
      const CellIndex nb{c.x + kDx[k], c.y + kDy[k]};
      if (!g.contains(nb) || closed_to_path(nb))
        continue;
      if (k >= 4 && (closed_to_path({nb.x, c.y}) || closed_to_path({c.x, nb.y})))
        continue;
      const auto j = g.index(nb);
      if (closed[j])
        continue;
      const auto step = step_cost(map, c, nb);
      PathCost next{cost[i].straight + step.straight, cost[i].diagonal + step.diagonal};
      const double v = next.value();
      if (v < best[j]) {
        best[j] = v;
        cost[j] = next;
        parent[j] = static_cast<std::int64_t>(i);
        const double hj = heuristic(nb);
        open.emplace(v + hj, hj, j);
      }
    }
  }

  if (!closed[ti]) {
    result.status = PlanStatus::no_path;
    return result;
  }

  for (auto i = static_cast<std::int64_t>(ti); i != -1; i = parent[static_cast<std::size_t>(i)])
    result.cells.push_back(g.cell_at(static_cast<std::size_t>(i)));
  std::reverse(result.cells.begin(), result.cells.end());
  result.cost = cost[ti];
  result.status = PlanStatus::ok;

  for (std::size_t k = 0; k < result.cells.size(); ++k) {
    const auto p = g.cell_center(result.cells[k]);
    double heading = goal.theta;
    if (k + 1 < result.cells.size()) {
      const auto q = g.cell_center(result.cells[k + 1]);
      heading = std::atan2(q.y - p.y, q.x - p.x);
    }
    result.path.push_back({p.x, p.y, normalize_angle(heading)});
  }
  return result;
}

PlanResult plan_global(const OccupancyGrid& grid, const PlannerParams& params, const Pose2D& start,
                       const Pose2D& goal)
{
  return plan_global(build_costmap(grid, params), start, goal);
}

}  // namespace fevbot::nav
