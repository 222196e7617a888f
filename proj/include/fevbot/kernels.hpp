#ifndef FEVBOT_KERNELS_HPP
#define FEVBOT_KERNELS_HPP

// Data-parallel inner loops of the simulator and planners.
//
// Every kernel comes as a serial reference and an OpenMP variant. The two
// perform identical floating-point operations per element, so their outputs
// are bit-identical; tests hold them to that. Nothing in here draws random
// numbers: callers draw noise serially beforehand so that results do not
// depend on thread scheduling.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fevbot/geometry.hpp"
#include "fevbot/grid.hpp"

namespace fevbot::kernels {

enum class Execution { serial, parallel };

// ---------------------------------------------------------------------------
// Ray casting

struct RaycastScene {
  std::span<const Rect> boxes;
  std::span<const Circle> disks;
  std::optional<Rect> enclosure;  // walls seen from the inside
};

/// Distance along the unit direction (dx, dy) to the first surface, or
/// +infinity when the ray escapes. A ray starting inside a box hits at 0.
double cast_ray(const RaycastScene& scene, Point2D origin, double dx, double dy);

/// hits[i] = cast_ray at world angle heading + beam_angles[i].
void raycast_serial(const RaycastScene& scene, Point2D origin, double heading,
                    std::span<const double> beam_angles, std::span<double> hits);
void raycast_parallel(const RaycastScene& scene, Point2D origin, double heading,
                      std::span<const double> beam_angles, std::span<double> hits);

inline void raycast(Execution ex, const RaycastScene& scene, Point2D origin, double heading,
                    std::span<const double> beam_angles, std::span<double> hits)
{
  if (ex == Execution::parallel)
    raycast_parallel(scene, origin, heading, beam_angles, hits);
  else
    raycast_serial(scene, origin, heading, beam_angles, hits);
}

// ---------------------------------------------------------------------------
// Distance field
//
// Euclidean distance, in cells, from each cell centre to the nearest marked
// cell centre; +infinity when nothing is marked. `marked` is row-major,
// width * height.

/// O(N * M) scan over all marked cells. Test oracle only.
std::vector<double> distance_field_brute_force(std::span<const std::uint8_t> marked, int width, int height);

/// Exact separable transform (lower envelope of parabolas), single thread.
std::vector<double> distance_field_serial(std::span<const std::uint8_t> marked, int width, int height);

/// Same transform with the column and row passes split across threads.
std::vector<double> distance_field_parallel(std::span<const std::uint8_t> marked, int width, int height);

inline std::vector<double> distance_field(Execution ex, std::span<const std::uint8_t> marked, int width,
                                          int height)
{
  return ex == Execution::parallel ? distance_field_parallel(marked, width, height)
                                   : distance_field_serial(marked, width, height);
}

// ---------------------------------------------------------------------------
// DWA rollout scoring

struct RolloutSpec {
  Pose2D start;
  Point2D target;
  double sim_time = 1.5;
  double sim_dt = 0.1;
  double v_max = 0.274;         // normaliser for the velocity term
  double robot_radius = 0.25;   // poses closer than this to a lethal cell collide
  double clearance_cap = 1.0;   // clearance term saturates here (m)
  double w_goal = 1.0;
  double w_vel = 0.3;
  double w_clear = 0.5;
  GridGeometry grid;
  std::span<const double> obstacle_distance;  // metres to nearest lethal cell, per cell
};

struct Candidate {
  double v = 0.0;
  double w = 0.0;
};

struct RolloutScore {
  bool feasible = false;
  double heading = 0.0;    // in [0, 1]
  double velocity = 0.0;   // in [0, 1]
  double clearance = 0.0;  // in [0, 1]
  double total = 0.0;
  double min_distance = 0.0;
  Pose2D end;
};

/// Forward-simulates one constant (v, w) pair and scores it.
RolloutScore score_rollout(const RolloutSpec& spec, Candidate c);

void score_rollouts_serial(const RolloutSpec& spec, std::span<const Candidate> candidates,
                           std::span<RolloutScore> out);
void score_rollouts_parallel(const RolloutSpec& spec, std::span<const Candidate> candidates,
                             std::span<RolloutScore> out);

inline void score_rollouts(Execution ex, const RolloutSpec& spec, std::span<const Candidate> candidates,
                           std::span<RolloutScore> out)
{
  if (ex == Execution::parallel)
    score_rollouts_parallel(spec, candidates, out);
  else
    score_rollouts_serial(spec, candidates, out);
}

}  // namespace fevbot::kernels

#endif  // FEVBOT_KERNELS_HPP
