#ifndef FEVBOT_DWA_HPP
#define FEVBOT_DWA_HPP

#include <limits>
#include <span>
#include <vector>

#include "fevbot/geometry.hpp"
#include "fevbot/kernels.hpp"
#include "fevbot/planner.hpp"
#include "fevbot/sim_world.hpp"

namespace fevbot::nav {

struct DwaParams {
  double sim_time = 1.5;
  double sim_dt = 0.1;
  double control_dt = 0.1;  // width of the dynamic window in time
  int v_samples = 11;
  int w_samples = 21;
  double a_max = 0.25;
  double alpha_max = 1.5;
  double v_max = sim::kMaxSpeed;
  double w_max = 1.0;
  double w_goal = 1.0;
  double w_vel = 0.3;
  double w_clear = 0.5;
  double robot_radius = 0.25;
  double safety_margin = 0.05;  // added to the radius; covers cell-centre distance error
  double clearance_cap = 1.0;
  double lookahead = 1.0;  // distance along the path to the steering target
  double short_lookahead = 0.3;  // second try when nothing that moves survives
};

struct DynamicWindow {
  double v_min = 0.0;
  double v_max = 0.0;
  double w_min = 0.0;
  double w_max = 0.0;

  bool contains(const VelocityCommand& c, double eps = 1e-12) const
  {
    return c.v >= v_min - eps && c.v <= v_max + eps && c.w >= w_min - eps && c.w <= w_max + eps;
  }
};

/// Velocities reachable within one control interval. `v_cap` lowers the
/// top speed (for example when approaching a goal) but never below what
/// braking allows.
DynamicWindow dynamic_window(const sim::RobotState& state, const DwaParams& params,
                             double v_cap = std::numeric_limits<double>::infinity());

std::vector<kernels::Candidate> sample_window(const DynamicWindow& window, const DwaParams& params);

/// First waypoint at least `lookahead` from the robot, searching forward
/// from the waypoint nearest to it; the last waypoint otherwise.
Point2D path_target(std::span<const Pose2D> path, const Pose2D& pose, double lookahead);

/// As path_target, but pulled back along the path until the straight chord
/// from the robot keeps more than `clearance` from lethal cells. Never pulls
/// back past the waypoint nearest the robot.
Point2D visible_path_target(std::span<const Pose2D> path, const Pose2D& pose, double lookahead, const Costmap& map,
                            double clearance);

struct DwaResult {
  VelocityCommand cmd;
  bool recovery = false;  // no admissible rollout; rotating in place
  DynamicWindow window;
  kernels::RolloutScore best;
  Point2D target;
};

/// One local-planner decision. The best-scoring admissible rollout wins;
/// exact ties prefer smaller |w|, then smaller v.
DwaResult dwa_step(const sim::RobotState& state, std::span<const Pose2D> path, const Costmap& map,
                   const DwaParams& params, kernels::Execution ex = kernels::Execution::parallel,
                   double v_cap = std::numeric_limits<double>::infinity());

/// The rollout specification dwa_step scores against (exposed for tests).
kernels::RolloutSpec rollout_spec(const sim::RobotState& state, Point2D target, const Costmap& map,
                                  const DwaParams& params);

}  // namespace fevbot::nav

#endif  // FEVBOT_DWA_HPP
