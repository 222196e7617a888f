#include <doctest.h>

#include <cmath>

#include "fevbot/goal_manager.hpp"
#include "fevbot/rng.hpp"

using namespace fevbot;
using namespace fevbot::nav;

TEST_SUITE("goal_manager") {

TEST_CASE("a person pauses navigation and saves the goal")
{
  const std::vector<Pose2D> goals{{3.0, 4.0, 0.0}};
  auto gm = start_navigation({}, goals);
  REQUIRE(gm.mode == NavMode::navigating);

  auto st = goal_manager_step(gm, 1);
  CHECK(st.directive == Directive::stop);
  CHECK(st.gm.mode == NavMode::paused);
  CHECK(st.gm.saved_goal == Pose2D{3.0, 4.0, 0.0});
  CHECK_FALSE(st.gm.active_goal.has_value());

  st = goal_manager_step(st.gm, 2);
  CHECK(st.directive == Directive::hold);

  st = goal_manager_step(st.gm, 0);
  CHECK(st.directive == Directive::resume);
  CHECK(st.gm.mode == NavMode::navigating);
  CHECK(st.gm.active_goal == Pose2D{3.0, 4.0, 0.0});
  CHECK_FALSE(st.gm.saved_goal.has_value());
}

TEST_CASE("nobody around keeps driving")
{
  const std::vector<Pose2D> goals{{1.0, 1.0, 0.0}};
  const auto gm = start_navigation({}, goals);
  const auto st = goal_manager_step(gm, 0);
  CHECK(st.directive == Directive::cont);
  CHECK(st.gm.active_goal == gm.active_goal);
}

TEST_CASE("reaching goals walks the queue")
{
  const std::vector<Pose2D> goals{{1.0, 0.0, 0.0}, {2.0, 0.0, 0.0}};
  auto gm = start_navigation({}, goals);
  auto st = goal_manager_step(gm, 0, true);
  CHECK(st.directive == Directive::next_goal);
  CHECK(st.gm.active_goal == goals[1]);
  st = goal_manager_step(st.gm, 0, true);
  CHECK(st.directive == Directive::finished);
  CHECK(st.gm.mode == NavMode::idle);
  CHECK(goal_manager_step(st.gm, 3).directive == Directive::none);
  CHECK(start_navigation({}, {}).mode == NavMode::idle);
}

TEST_CASE("a person takes priority over arrival")
{
  const std::vector<Pose2D> goals{{1.0, 0.0, 0.0}};
  const auto st = goal_manager_step(start_navigation({}, goals), 1, true);
  CHECK(st.directive == Directive::stop);
}

TEST_CASE("pause and resume never alter the goal")
{
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const Pose2D goal{rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0), rng.uniform(-kPi, kPi)};
    const std::vector<Pose2D> goals{goal};
    auto gm = start_navigation({}, goals);
    for (int k = 0; k < 500; ++k) {
      gm = goal_manager_step(gm, static_cast<int>(rng.below(3))).gm;
      if (gm.mode == NavMode::navigating)
        CHECK(gm.active_goal == goal);
      else
        CHECK(gm.saved_goal == goal);
    }
  }
}

TEST_CASE("skipping a goal")
{
  const std::vector<Pose2D> goals{{1.0, 0.0, 0.0}, {2.0, 0.0, 0.0}};
  auto st = skip_goal(start_navigation({}, goals));
  CHECK(st.directive == Directive::next_goal);
  st = skip_goal(st.gm);
  CHECK(st.directive == Directive::finished);
}

TEST_CASE("goal tolerance")
{
  CHECK(at_goal({1.0, 1.0, 0.0}, {1.1, 1.1, 0.2}));
  CHECK_FALSE(at_goal({1.0, 1.0, 0.0}, {1.2, 1.0, 0.0}));
  CHECK_FALSE(at_goal({1.0, 1.0, 0.0}, {1.0, 1.0, 0.5}));
  CHECK(at_goal({1.0, 1.0, kPi - 0.05}, {1.0, 1.0, -kPi + 0.05}));
}

TEST_CASE("splitting long legs")
{
  const std::vector<Pose2D> goals{{7.0, 0.0, 1.0}, {7.0, 2.0, 0.0}};
  const auto out = split_goals({0.0, 0.0, 0.0}, goals, 3.0);
  REQUIRE(out.size() == 4);
  CHECK(out[0].x == doctest::Approx(7.0 / 3.0));
  CHECK(out[1].x == doctest::Approx(14.0 / 3.0));
  CHECK(out[0].theta == 0.0);
  CHECK(out[2] == goals[0]);
  CHECK(out[3] == goals[1]);
  CHECK(split_goals({0.0, 0.0, 0.0}, goals, 0.0).size() == 2);

  Pose2D prev{0.0, 0.0, 0.0};
  for (const auto& g : split_goals(prev, goals, 1.3)) {
    CHECK(distance(prev.x, prev.y, g.x, g.y) <= 1.3 + 1e-12);
    prev = g;
  }
}

}
