#include "fevbot/goal_manager.hpp"

#include <cmath>

namespace fevbot::nav {

std::string_view to_string(NavMode m)
{
  switch (m) {
    case NavMode::idle: return "idle";
    case NavMode::navigating: return "navigating";
    case NavMode::paused: return "paused";
  }
  return "?";
}

std::string_view to_string(Directive d)
{
  switch (d) {
    case Directive::none: return "none";
    case Directive::cont: return "continue";
    case Directive::stop: return "stop";
    case Directive::hold: return "hold";
    case Directive::resume: return "resume";
    case Directive::next_goal: return "next_goal";
    case Directive::finished: return "finished";
  }
  return "?";
}

GoalManager start_navigation(GoalManager gm, std::span<const Pose2D> goals)
{
  gm.waypoint_queue.assign(goals.begin(), goals.end());
  gm.saved_goal.reset();
  gm.active_goal.reset();
  gm.mode = NavMode::idle;
  if (!gm.waypoint_queue.empty()) {
    gm.active_goal = gm.waypoint_queue.front();
    gm.waypoint_queue.pop_front();
    gm.mode = NavMode::navigating;
  }
  return gm;
}

GoalStep skip_goal(GoalManager gm)
{
  gm.saved_goal.reset();
  if (gm.waypoint_queue.empty()) {
    gm.active_goal.reset();
    gm.mode = NavMode::idle;
    return {std::move(gm), Directive::finished};
  }
  gm.active_goal = gm.waypoint_queue.front();
  gm.waypoint_queue.pop_front();
  gm.mode = NavMode::navigating;
  return {std::move(gm), Directive::next_goal};
}

GoalStep goal_manager_step(GoalManager gm, int person_present, bool goal_reached)
{
  switch (gm.mode) {
    case NavMode::idle:
      return {std::move(gm), Directive::none};

    case NavMode::navigating:
      if (person_present > 0) {
        gm.saved_goal = gm.active_goal;
        gm.active_goal.reset();
        gm.mode = NavMode::paused;
        return {std::move(gm), Directive::stop};
      }
      if (goal_reached)
        return skip_goal(std::move(gm));
      return {std::move(gm), Directive::cont};

    case NavMode::paused:
      if (person_present > 0)
        return {std::move(gm), Directive::hold};
      gm.active_goal = gm.saved_goal;
      gm.saved_goal.reset();
      gm.mode = NavMode::navigating;
      return {std::move(gm), Directive::resume};
  }
  return {std::move(gm), Directive::none};
}

bool at_goal(const Pose2D& pose, const Pose2D& goal, const GoalTolerance& tol)
{
  return distance(pose.x, pose.y, goal.x, goal.y) <= tol.position &&
         std::abs(normalize_angle(pose.theta - goal.theta)) <= tol.heading;
}

std::vector<Pose2D> split_goals(const Pose2D& start, std::span<const Pose2D> goals, double max_spacing)
{
  std::vector<Pose2D> out;
  Pose2D prev = start;
  for (const auto& g : goals) {
    const double d = distance(prev.x, prev.y, g.x, g.y);
    if (max_spacing > 0.0 && d > max_spacing) {
      const int pieces = static_cast<int>(std::ceil(d / max_spacing));
      const double heading = std::atan2(g.y - prev.y, g.x - prev.x);
      for (int k = 1; k < pieces; ++k) {
        const double s = static_cast<double>(k) / pieces;
        out.push_back({prev.x + s * (g.x - prev.x), prev.y + s * (g.y - prev.y), normalize_angle(heading)});
      }
    }
    out.push_back(g);
    prev = g;
  }
  return out;
}

}  // namespace fevbot::nav
