#ifndef FEVBOT_GOAL_MANAGER_HPP
#define FEVBOT_GOAL_MANAGER_HPP

#include <deque>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fevbot/geometry.hpp"

namespace fevbot::nav {

enum class NavMode { idle, navigating, paused };

enum class Directive {
  none,       // idle, nothing to do
  cont,       // keep driving to the active goal
  stop,       // person seen: goal saved and cancelled, command zero velocity
  hold,       // still paused
  resume,     // person gone: saved goal re-issued
  next_goal,  // active goal reached, next waypoint taken from the queue
  finished,   // active goal reached, queue empty
};

std::string_view to_string(NavMode m);
std::string_view to_string(Directive d);

/// Person-triggered pause/resume around a queue of goals.
struct GoalManager {
  NavMode mode = NavMode::idle;
  std::optional<Pose2D> active_goal;
  std::optional<Pose2D> saved_goal;
  std::deque<Pose2D> waypoint_queue;
};

struct GoalStep {
  GoalManager gm;
  Directive directive = Directive::none;
};

/// Queues goals and activates the first one.
GoalManager start_navigation(GoalManager gm, std::span<const Pose2D> goals);

GoalStep goal_manager_step(GoalManager gm, int person_present, bool goal_reached = false);

/// Drops the active goal (e.g. after a planning failure) and moves on.
GoalStep skip_goal(GoalManager gm);

struct GoalTolerance {
  double position = 0.15;
  double heading = 0.3;
};

bool at_goal(const Pose2D& pose, const Pose2D& goal, const GoalTolerance& tol = {});

/// Inserts evenly spaced intermediate goals so that consecutive goals, and
/// the start and the first goal, are at most `max_spacing` apart.
/// Intermediate goals face along their segment. Spacing <= 0 disables.
std::vector<Pose2D> split_goals(const Pose2D& start, std::span<const Pose2D> goals, double max_spacing = 3.0);

}  // namespace fevbot::nav

#endif  // FEVBOT_GOAL_MANAGER_HPP
