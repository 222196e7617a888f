#include <doctest.h>

#include <cmath>
#include <vector>

#include "fevbot/dwa.hpp"
#include "fevbot/kernels.hpp"
#include "fevbot/planner.hpp"
#include "fevbot/rng.hpp"

using namespace fevbot;
using namespace fevbot::kernels;

namespace {

std::vector<std::uint8_t> random_marks(int w, int h, double density, Rng& rng)
{
  std::vector<std::uint8_t> m(static_cast<std::size_t>(w) * h);
  for (auto& c : m)
    c = rng.uniform() < density ? 1 : 0;
  return m;
}

std::vector<double> beam_fan(int n)
{
  std::vector<double> a(n);
  for (int i = 0; i < n; ++i)
    a[i] = (i - n / 2) * 2.0 * kPi / n;
  return a;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("cast_ray against simple shapes")
{
  const std::vector<Rect> boxes{{2.0, -1.0, 3.0, 1.0}};
  const std::vector<Circle> disks{{0.0, 5.0, 0.5}};
  const RaycastScene scene{boxes, disks, std::nullopt};

  CHECK(cast_ray(scene, {0.0, 0.0}, 1.0, 0.0) == doctest::Approx(2.0));
  CHECK(cast_ray(scene, {0.0, 0.0}, 0.0, 1.0) == doctest::Approx(4.5));
  CHECK(std::isinf(cast_ray(scene, {0.0, 0.0}, -1.0, 0.0)));
  CHECK(cast_ray(scene, {2.5, 0.0}, 1.0, 0.0) == 0.0);  // inside a box

  const RaycastScene room{{}, {}, Rect{0.0, 0.0, 4.0, 3.0}};
  CHECK(cast_ray(room, {1.0, 1.0}, 1.0, 0.0) == doctest::Approx(3.0));
  CHECK(cast_ray(room, {1.0, 1.0}, 0.0, -1.0) == doctest::Approx(1.0));
  const double s = std::sqrt(0.5);
  CHECK(cast_ray(room, {1.0, 1.0}, s, s) == doctest::Approx(2.0 * std::sqrt(2.0)));
}

TEST_CASE("raycast: parallel equals serial bit for bit")
{
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Rect> boxes;
    for (int i = 0; i < 12; ++i) {
      const double x = rng.uniform(0.0, 18.0), y = rng.uniform(0.0, 18.0);
      boxes.push_back({x, y, x + rng.uniform(0.1, 2.0), y + rng.uniform(0.1, 2.0)});
    }
    std::vector<Circle> disks{{rng.uniform(0.0, 20.0), rng.uniform(0.0, 20.0), 0.2}};
    const RaycastScene scene{boxes, disks, Rect{0.0, 0.0, 20.0, 20.0}};
    const auto angles = beam_fan(720);
    const Point2D origin{rng.uniform(1.0, 19.0), rng.uniform(1.0, 19.0)};
    const double heading = rng.uniform(-kPi, kPi);
    std::vector<double> a(angles.size()), b(angles.size());
    raycast_serial(scene, origin, heading, angles, a);
    raycast_parallel(scene, origin, heading, angles, b);
    CHECK(a == b);
  }
}

TEST_CASE("distance field: transforms match the brute-force oracle")
{
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const int w = 1 + static_cast<int>(rng.below(40));
    const int h = 1 + static_cast<int>(rng.below(40));
    const double density = rng.uniform(0.0, 0.2);
    const auto marks = random_marks(w, h, density, rng);
    const auto brute = distance_field_brute_force(marks, w, h);
    const auto serial = distance_field_serial(marks, w, h);
    const auto parallel = distance_field_parallel(marks, w, h);
    REQUIRE(brute.size() == serial.size());
    for (std::size_t i = 0; i < brute.size(); ++i) {
      if (std::isinf(brute[i]))
        CHECK(std::isinf(serial[i]));
      else
        CHECK(serial[i] == doctest::Approx(brute[i]).epsilon(1e-12));
    }
    CHECK(serial == parallel);
  }
}

TEST_CASE("distance field: nothing marked is infinite everywhere")
{
  const std::vector<std::uint8_t> none(25, 0);
  for (const double d : distance_field_serial(none, 5, 5))
    CHECK(std::isinf(d));
}

TEST_CASE("rollout scoring: parallel equals serial bit for bit")
{
  Rng rng(17);
  const GridGeometry g{0.05, 0.0, 0.0, 120, 120};
  for (int trial = 0; trial < 10; ++trial) {
    const auto map = nav::build_costmap(g, random_marks(120, 120, 0.01, rng), nav::PlannerParams{},
                                        Execution::serial);
    nav::DwaParams params;
    sim::RobotState robot;
    robot.pose = {rng.uniform(1.0, 5.0), rng.uniform(1.0, 5.0), rng.uniform(-kPi, kPi)};
    robot.v = rng.uniform(0.0, 0.274);
    robot.w = rng.uniform(-0.5, 0.5);
    const auto window = nav::dynamic_window(robot, params);
    const auto candidates = nav::sample_window(window, params);
    const auto spec = nav::rollout_spec(robot, {3.0, 3.0}, map, params);
    std::vector<RolloutScore> a(candidates.size()), b(candidates.size());
    score_rollouts_serial(spec, candidates, a);
    score_rollouts_parallel(spec, candidates, b);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].feasible == b[i].feasible);
      CHECK(a[i].total == b[i].total);
      CHECK(a[i].min_distance == b[i].min_distance);
      CHECK(a[i].end == b[i].end);
    }
  }
}

TEST_CASE("rollout score terms stay in range")
{
  const GridGeometry g{0.05, 0.0, 0.0, 100, 100};
  std::vector<std::uint8_t> lethal(g.size(), 0);
  for (int y = 0; y < 100; ++y)
    lethal[g.index({70, y})] = 1;
  const auto map = nav::build_costmap(g, lethal, nav::PlannerParams{}, Execution::serial);
  nav::DwaParams params;
  sim::RobotState robot;
  robot.pose = {1.0, 2.5, 0.0};
  robot.v = 0.2;
  const auto spec = nav::rollout_spec(robot, {3.0, 2.5}, map, params);
  for (const auto& c : nav::sample_window(nav::dynamic_window(robot, params), params)) {
    const auto s = score_rollout(spec, c);
    CHECK(s.heading >= 0.0);
    CHECK(s.heading <= 1.0);
    CHECK(s.velocity >= 0.0);
    CHECK(s.velocity <= 1.0);
    CHECK(s.clearance >= 0.0);
    CHECK(s.clearance <= 1.0);
  }
}

}
