#include "fevbot/dwa.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace fevbot::nav {

DynamicWindow dynamic_window(const sim::RobotState& state, const DwaParams& params, double v_cap)
{
  DynamicWindow w;
  w.v_min = std::max(0.0, state.v - params.a_max * params.control_dt);
  w.v_max = std::min({params.v_max, state.v + params.a_max * params.control_dt, std::max(v_cap, 0.0)});
  w.v_max = std::max(w.v_max, w.v_min);
  w.w_min = std::max(-params.w_max, state.w - params.alpha_max * params.control_dt);
  w.w_max = std::min(params.w_max, state.w + params.alpha_max * params.control_dt);
  w.w_max = std::max(w.w_max, w.w_min);
  return w;
}

std::vector<kernels::Candidate> sample_window(const DynamicWindow& window, const DwaParams& params)
{
  const int nv = std::max(2, params.v_samples);
  const int nw = std::max(2, params.w_samples);
  std::vector<kernels::Candidate> out;
  out.reserve(static_cast<std::size_t>(nv) * nw);
  for (int i = 0; i < nv; ++i) {
    const double v = window.v_min + (window.v_max - window.v_min) * i / (nv - 1);
    for (int j = 0; j < nw; ++j) {
      const double w = window.w_min + (window.w_max - window.w_min) * j / (nw - 1);
      out.push_back({v, w});
    }
  }
  return out;
}

namespace {

std::size_t nearest_waypoint(std::span<const Pose2D> path, const Pose2D& pose)
{
  std::size_t nearest = 0;
  double nearest_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < path.size(); ++i) {
    const double d = distance(pose.x, pose.y, path[i].x, path[i].y);
    if (d < nearest_d) {
      nearest_d = d;
      nearest = i;
    }
  }
  return nearest;
}

std::size_t lookahead_index(std::span<const Pose2D> path, const Pose2D& pose, double lookahead, std::size_t from)
{
  for (std::size_t i = from; i < path.size(); ++i)
    if (distance(pose.x, pose.y, path[i].x, path[i].y) >= lookahead)
      return i;
  return path.size() - 1;
}

bool chord_clear(const Pose2D& pose, const Pose2D& to, const Costmap& map, double clearance)
{
  const auto& g = map.geometry;
  const double len = distance(pose.x, pose.y, to.x, to.y);
  const int steps = std::max(1, static_cast<int>(std::ceil(len / (0.5 * g.resolution))));
  for (int k = 0; k <= steps; ++k) {
    const double s = static_cast<double>(k) / steps;
    const auto c = g.world_to_cell(pose.x + s * (to.x - pose.x), pose.y + s * (to.y - pose.y));
    if (!c || map.obstacle_distance[g.index(*c)] <= clearance)
      return false;
  }
  return true;
}

}  // namespace

Point2D path_target(std::span<const Pose2D> path, const Pose2D& pose, double lookahead)
{
  if (path.empty())
    return {pose.x, pose.y};
  const auto& p = path[lookahead_index(path, pose, lookahead, nearest_waypoint(path, pose))];
  return {p.x, p.y};
}

Point2D visible_path_target(std::span<const Pose2D> path, const Pose2D& pose, double lookahead, const Costmap& map,
                            double clearance)
{
  if (path.empty())
    return {pose.x, pose.y};
  const std::size_t nearest = nearest_waypoint(path, pose);
  std::size_t i = lookahead_index(path, pose, lookahead, nearest);
  while (i > nearest && !chord_clear(pose, path[i], map, clearance))
    --i;
  return {path[i].x, path[i].y};
}

kernels::RolloutSpec rollout_spec(const sim::RobotState& state, Point2D target, const Costmap& map,
                                  const DwaParams& params)
{
  kernels::RolloutSpec spec;
  spec.start = state.pose;
  spec.target = target;
  spec.sim_time = params.sim_time;
  spec.sim_dt = params.sim_dt;
  spec.v_max = params.v_max;
  spec.robot_radius = params.robot_radius + params.safety_margin;
  spec.clearance_cap = params.clearance_cap;
  spec.w_goal = params.w_goal;
  spec.w_vel = params.w_vel;
  spec.w_clear = params.w_clear;
  spec.grid = map.geometry;
  spec.obstacle_distance = map.obstacle_distance;
  return spec;
}

DwaResult dwa_step(const sim::RobotState& state, std::span<const Pose2D> path, const Costmap& map,
                   const DwaParams& params, kernels::Execution ex, double v_cap)
{
  if (path.empty())
    throw std::invalid_argument("dwa_step needs a non-empty path");
  if (!(params.sim_time > params.sim_dt && params.sim_dt > 0.0))
    throw std::invalid_argument("dwa_step needs sim_time > sim_dt > 0");

  DwaResult result;
  result.window = dynamic_window(state, params, v_cap);
  const auto candidates = sample_window(result.window, params);
  std::vector<kernels::RolloutScore> scores(candidates.size());

  auto choose = [&](Point2D target) -> std::optional<std::size_t> {
    kernels::score_rollouts(ex, rollout_spec(state, target, map, params), candidates, scores);
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (!scores[i].feasible)
        continue;
      if (!best) {
        best = i;
        continue;
      }
      const auto& b = candidates[*best];
      const auto& c = candidates[i];
      const double bt = scores[*best].total;
      const double ct = scores[i].total;
      if (ct > bt || (ct == bt && (std::abs(c.w) < std::abs(b.w) || (std::abs(c.w) == std::abs(b.w) && c.v < b.v))))
        best = i;
    }
    return best;
  };

  // A far target around a corner can leave only standing still. Steering at
  // a nearer point on the path instead turns the robot along the path.
  const double clearance = params.robot_radius + params.safety_margin;
  result.target = visible_path_target(path, state.pose, params.lookahead, map, clearance);
  auto best = choose(result.target);
  if ((!best || candidates[*best].v == 0.0) && result.window.v_max > 0.0) {
    const Point2D near = visible_path_target(path, state.pose, params.short_lookahead, map, clearance);
    const auto saved = scores;
    const auto retry = choose(near);
    if (retry) {
      best = retry;
      result.target = near;
    } else {
      scores = saved;
    }
  }

  if (best) {
    result.cmd = {candidates[*best].v, candidates[*best].w};
    result.best = scores[*best];
    return result;
  }

  // Nothing admissible: brake as hard as allowed and turn toward the target.
  result.recovery = true;
  const double err = normalize_angle(std::atan2(result.target.y - state.pose.y, result.target.x - state.pose.x) -
                                     state.pose.theta);
  const double w = err > 0.0 ? result.window.w_max : (err < 0.0 ? result.window.w_min : 0.0);
  result.cmd = {result.window.v_min, std::clamp(w, result.window.w_min, result.window.w_max)};
  return result;
}

}  // namespace fevbot::nav
