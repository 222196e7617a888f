#include <doctest.h>

#include <cmath>

#include "fevbot/planner.hpp"
#include "oracles.hpp"

using namespace fevbot;
using namespace fevbot::nav;

namespace {

GridGeometry square(int n)
{
  GridGeometry g;
  g.resolution = 0.1;
  g.width = n;
  g.height = n;
  return g;
}

Pose2D at(const GridGeometry& g, CellIndex c)
{
  const auto p = g.cell_center(c);
  return {p.x, p.y, 0.0};
}

PlannerParams plain()
{
  PlannerParams p;
  p.inscribed_radius = 0.0;
  return p;
}

}  // namespace

TEST_SUITE("planner") {

TEST_CASE("inflation cost")
{
  CHECK(inflation_cost(0.0, 0.35) == 252.0);
  CHECK(inflation_cost(0.35, 0.35) == 0.0);
  CHECK(inflation_cost(1.0, 0.35) == 0.0);
  CHECK(inflation_cost(0.175, 0.35) == doctest::Approx(126.0));
  CHECK(inflation_cost(std::numeric_limits<double>::infinity(), 0.35) == 0.0);
}

TEST_CASE("costs are quantised")
{
  const auto g = square(20);
  std::vector<std::uint8_t> lethal(g.size(), 0);
  lethal[g.index({10, 10})] = 1;
  const auto map = build_costmap(g, lethal, {});
  for (const double c : map.cell_cost)
    CHECK(c * 64.0 == std::round(c * 64.0));
  CHECK(map.cost({0, 0}) == 50.0);
  CHECK(map.cost({11, 10}) > 50.0);
}

TEST_CASE("start equals goal")
{
  const auto g = square(10);
  const auto map = build_costmap(g, std::vector<std::uint8_t>(g.size(), 0), {});
  const auto r = plan_global(map, at(g, {4, 4}), at(g, {4, 4}));
  REQUIRE(r.ok());
  CHECK(r.cells.size() == 1);
  CHECK(r.cost.value() == 0.0);
}

TEST_CASE("empty grid corner to corner")
{
  const auto g = square(20);
  const auto map = build_costmap(g, std::vector<std::uint8_t>(g.size(), 0), {});
  const auto r = plan_global(map, at(g, {0, 0}), at(g, {19, 19}));
  REQUIRE(r.ok());
  CHECK(r.cells.size() == 20);
  CHECK(r.cost.straight == 0.0);
  CHECK(r.cost.diagonal == 19 * 50.0);
  const auto o = oracle::dijkstra(map, {0, 0}, {19, 19});
  REQUIRE(o.has_value());
  CHECK(r.cost.straight == o->straight);
  CHECK(r.cost.diagonal == o->diagonal);
  CHECK(r.path.back().theta == 0.0);
  CHECK(r.path.front().theta == doctest::Approx(kPi / 4.0));
}

TEST_CASE("invalid endpoints")
{
  const auto g = square(10);
  std::vector<std::uint8_t> lethal(g.size(), 0);
  lethal[g.index({2, 2})] = 1;
  const auto map = build_costmap(g, lethal, plain());
  CHECK(plan_global(map, at(g, {2, 2}), at(g, {5, 5})).status == PlanStatus::invalid_start);
  CHECK(plan_global(map, at(g, {5, 5}), at(g, {2, 2})).status == PlanStatus::invalid_goal);
  CHECK(plan_global(map, {-1.0, 0.5, 0.0}, at(g, {5, 5})).status == PlanStatus::invalid_start);
  CHECK(plan_global(map, at(g, {5, 5}), {0.5, 7.0, 0.0}).status == PlanStatus::invalid_goal);
}

TEST_CASE("an enclosed goal has no path")
{
  const auto g = square(15);
  std::vector<std::uint8_t> lethal(g.size(), 0);
  for (int i = 5; i <= 9; ++i) {
    lethal[g.index({i, 5})] = lethal[g.index({i, 9})] = 1;
    lethal[g.index({5, i})] = lethal[g.index({9, i})] = 1;
  }
  const auto map = build_costmap(g, lethal, plain());
  CHECK(plan_global(map, at(g, {0, 0}), at(g, {7, 7})).status == PlanStatus::no_path);
  CHECK_FALSE(oracle::dijkstra(map, {0, 0}, {7, 7}).has_value());
}

TEST_CASE("diagonal moves do not squeeze between obstacles")
{
  const auto g = square(6);
  std::vector<std::uint8_t> lethal(g.size(), 1);
  for (int i = 0; i < 3; ++i)
    lethal[g.index({i, 0})] = 0;
  for (int i = 3; i < 6; ++i)
    lethal[g.index({i, 1})] = 0;
  const auto map = build_costmap(g, lethal, plain());
  CHECK(plan_global(map, at(g, {0, 0}), at(g, {5, 1})).status == PlanStatus::no_path);
}

TEST_CASE("paths keep clear of obstacles when they can")
{
  const auto g = square(40);
  std::vector<std::uint8_t> lethal(g.size(), 0);
  for (int y = 0; y < 30; ++y)
    lethal[g.index({20, y})] = 1;
  const auto map = build_costmap(g, lethal, {});
  const auto r = plan_global(map, at(g, {5, 5}), at(g, {35, 5}));
  REQUIRE(r.ok());
  for (const auto& c : r.cells)
    CHECK(map.obstacle_distance[g.index(c)] > map.inscribed_radius);
}

TEST_CASE("A* matches Dijkstra on random grids")
{
  Rng rng(31);
  int solved = 0;
  int unsolved = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = square(30);
    std::vector<std::uint8_t> lethal(g.size(), 0);
    const double density = rng.uniform(0.05, 0.3);
    for (auto& l : lethal)
      l = rng.uniform() < density ? 1 : 0;
    const CellIndex s{static_cast<int>(rng.below(30)), static_cast<int>(rng.below(30))};
    const CellIndex t{static_cast<int>(rng.below(30)), static_cast<int>(rng.below(30))};
    lethal[g.index(s)] = lethal[g.index(t)] = 0;

    for (const bool inscribed : {false, true}) {
      PlannerParams params;
      params.inscribed_radius = inscribed ? 0.15 : 0.0;
      const auto map = build_costmap(g, lethal, params, trial % 2 ? kernels::Execution::serial
                                                                  : kernels::Execution::parallel);
      const auto r = plan_global(map, at(g, s), at(g, t));
      const auto o = oracle::dijkstra(map, s, t);
      CHECK(r.ok() == o.has_value());
      if (!r.ok() || !o) {
        ++unsolved;
        continue;
      }
      ++solved;
      CHECK(static_cast<long double>(r.cost.value()) == doctest::Approx(static_cast<double>(o->value())));
      CHECK(r.cost == path_cost(map, r.cells));
      CHECK(r.cells.front() == s);
      CHECK(r.cells.back() == t);
      for (std::size_t i = 0; i < r.cells.size(); ++i) {
        CHECK_FALSE(map.is_lethal(r.cells[i]));
        if (i > 0) {
          CHECK(std::abs(r.cells[i].x - r.cells[i - 1].x) <= 1);
          CHECK(std::abs(r.cells[i].y - r.cells[i - 1].y) <= 1);
        }
      }
    }
  }
  CHECK(solved > 50);
  CHECK(unsolved > 0);
}

TEST_CASE("planning from an occupancy grid")
{
  GridGeometry g = square(30);
  auto grid = OccupancyGrid::create(g);
  for (int y = 0; y < 25; ++y)
    grid.log_odds[g.index({15, y})] = kLogOddsLimit;
  grid.log_odds[g.index({15, 26})] = 0.5;  // below the occupied threshold
  const auto r = plan_global(grid, plain(), at(g, {5, 5}), at(g, {25, 5}));
  REQUIRE(r.ok());
  bool crossed_high = false;
  for (const auto& c : r.cells)
    crossed_high = crossed_high || (c.x == 15 && c.y >= 25);
  CHECK(crossed_high);
}

}
