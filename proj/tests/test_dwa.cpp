#include <doctest.h>

#include <cmath>

#include "fevbot/dwa.hpp"

using namespace fevbot;
using namespace fevbot::nav;

namespace {

// A 10 x 4 m room with walls, optionally a wall segment across x = wall_x.
Costmap room(std::optional<double> wall_x = std::nullopt)
{
  GridGeometry g;
  g.resolution = 0.05;
  g.width = 200;
  g.height = 80;
  std::vector<std::uint8_t> lethal(g.size(), 0);
  for (int y = 0; y < g.height; ++y)
    for (int x = 0; x < g.width; ++x) {
      const bool border = x == 0 || y == 0 || x == g.width - 1 || y == g.height - 1;
      const bool wall = wall_x && g.world_to_cell(*wall_x, 0.0)->x == x;
      lethal[g.index({x, y})] = border || wall;
    }
  PlannerParams p;
  p.inscribed_radius = 0.0;
  return build_costmap(g, lethal, p);
}

std::vector<Pose2D> straight_path(double x0, double x1, double y)
{
  std::vector<Pose2D> path;
  for (double x = x0; x <= x1 + 1e-9; x += 0.05)
    path.push_back({x, y, 0.0});
  return path;
}

}  // namespace

TEST_SUITE("dwa") {

TEST_CASE("dynamic window")
{
  DwaParams p;
  sim::RobotState s;
  auto w = dynamic_window(s, p);
  CHECK(w.v_min == 0.0);
  CHECK(w.v_max == doctest::Approx(0.025));
  CHECK(w.w_min == doctest::Approx(-0.15));
  CHECK(w.w_max == doctest::Approx(0.15));

  s.v = 0.274;
  s.w = 0.95;
  w = dynamic_window(s, p);
  CHECK(w.v_max == 0.274);
  CHECK(w.v_min == doctest::Approx(0.249));
  CHECK(w.w_max == 1.0);

  w = dynamic_window(s, p, 0.1);
  CHECK(w.v_max == w.v_min);  // the cap never asks for more braking than allowed
}

TEST_CASE("samples cover the window corners")
{
  DwaParams p;
  const DynamicWindow w{0.1, 0.2, -0.3, 0.3};
  const auto c = sample_window(w, p);
  CHECK(c.size() == static_cast<std::size_t>(p.v_samples * p.w_samples));
  CHECK(c.front().v == 0.1);
  CHECK(c.front().w == -0.3);
  CHECK(c.back().v == 0.2);
  CHECK(c.back().w == 0.3);
  for (const auto& k : c)
    CHECK(w.contains({k.v, k.w}));
}

TEST_CASE("path target")
{
  const auto path = straight_path(1.0, 5.0, 2.0);
  auto t = path_target(path, {1.0, 2.0, 0.0}, 1.0);
  CHECK(t.x == doctest::Approx(2.0));
  t = path_target(path, {4.6, 2.0, 0.0}, 1.0);
  CHECK(t.x == doctest::Approx(5.0));
  t = path_target(path, {3.0, 2.5, 0.0}, 1.0);
  CHECK(t.x >= 3.0);
}

TEST_CASE("open corridor drives straight on")
{
  const auto map = room();
  sim::RobotState s;
  s.pose = {1.0, 2.0, 0.0};
  s.v = 0.2;
  const auto path = straight_path(1.0, 9.0, 2.0);
  const auto r = dwa_step(s, path, map, {});
  CHECK_FALSE(r.recovery);
  CHECK(r.cmd.v > 0.2);
  CHECK(std::abs(r.cmd.w) < 1e-9);
}

TEST_CASE("a wall just ahead stops the robot")
{
  const auto map = room(1.28);
  sim::RobotState s;
  s.pose = {1.0, 2.0, 0.0};
  const auto path = straight_path(1.0, 3.0, 2.0);
  const auto r = dwa_step(s, path, map, {});
  CHECK(r.cmd.v == 0.0);
}

TEST_CASE("a path to the left turns the robot left")
{
  const auto map = room();
  sim::RobotState s;
  s.pose = {5.0, 2.0, 0.0};
  s.v = 0.1;
  std::vector<Pose2D> path;
  for (int k = 0; k <= 20; ++k)
    path.push_back({5.0, 2.0 + 0.05 * k, kPi / 2.0});
  const auto r = dwa_step(s, path, map, {});
  CHECK(r.cmd.w > 0.0);
}

TEST_CASE("commands stay inside the window")
{
  const auto map = room(6.0);
  Rng rng(12);
  DwaParams p;
  for (int i = 0; i < 60; ++i) {
    sim::RobotState s;
    s.pose = {rng.uniform(0.6, 5.4), rng.uniform(0.6, 3.4), rng.uniform(-kPi, kPi)};
    s.v = rng.uniform(0.0, 0.274);
    s.w = rng.uniform(-1.0, 1.0);
    const auto path = straight_path(s.pose.x, 9.0, 2.0);
    const auto r = dwa_step(s, path, map, p, i % 2 ? kernels::Execution::serial : kernels::Execution::parallel);
    CHECK(r.window.contains(r.cmd));
    CHECK(std::abs(r.cmd.v - s.v) <= p.a_max * p.control_dt + 1e-12);
    CHECK(std::abs(r.cmd.w - s.w) <= p.alpha_max * p.control_dt + 1e-12);
    CHECK(r.cmd.v >= 0.0);
    CHECK(r.cmd.v <= 0.274);
    CHECK(std::abs(r.cmd.w) <= 1.0);
    if (!r.recovery)
      CHECK(r.best.feasible);
  }
}

TEST_CASE("serial and parallel scoring choose the same command")
{
  const auto map = room(6.0);
  Rng rng(13);
  for (int i = 0; i < 30; ++i) {
    sim::RobotState s;
    s.pose = {rng.uniform(0.6, 5.4), rng.uniform(0.6, 3.4), rng.uniform(-kPi, kPi)};
    s.v = rng.uniform(0.0, 0.274);
    const auto path = straight_path(s.pose.x, 9.0, 2.0);
    const auto a = dwa_step(s, path, map, {}, kernels::Execution::serial);
    const auto b = dwa_step(s, path, map, {}, kernels::Execution::parallel);
    CHECK(a.cmd == b.cmd);
    CHECK(a.recovery == b.recovery);
  }
}

TEST_CASE("bad input")
{
  const auto map = room();
  CHECK_THROWS_AS(dwa_step({}, {}, map, {}), std::invalid_argument);
  DwaParams p;
  p.sim_dt = 0.0;
  const auto path = straight_path(1.0, 2.0, 2.0);
  CHECK_THROWS_AS(dwa_step({}, path, map, p), std::invalid_argument);
}

}
