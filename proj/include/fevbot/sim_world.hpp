#ifndef FEVBOT_SIM_WORLD_HPP
#define FEVBOT_SIM_WORLD_HPP

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "fevbot/geometry.hpp"
#include "fevbot/kernels.hpp"
#include "fevbot/rng.hpp"

namespace fevbot::sim {

/// 986 m/h.
inline constexpr double kMaxSpeed = 0.274;

inline constexpr int kImageWidth = 640;
inline constexpr int kImageHeight = 480;
inline constexpr double kHalfFov = kPi / 6.0;  // both axes
inline const double kFocalX = 320.0 / std::tan(kHalfFov);
inline const double kFocalY = 240.0 / std::tan(kHalfFov);

inline constexpr int kThermalWidth = 160;
inline constexpr int kThermalHeight = 120;

inline constexpr int kLidarBeams = 720;
inline constexpr double kLidarStep = kPi / 360.0;  // 0.5 deg
inline constexpr double kLidarMinRange = 0.12;
inline constexpr double kLidarMaxRange = 10.0;
inline constexpr double kNoReturn = std::numeric_limits<double>::infinity();

struct RobotLimits {
  double v_max = kMaxSpeed;
  double w_max = 1.0;       // rad/s
  double a_max = 0.25;      // m/s^2
  double alpha_max = 1.5;   // rad/s^2
  double radius = 0.25;     // footprint disk, m
};

struct RobotState {
  Pose2D pose;
  double v = 0.0;
  double w = 0.0;
  double pan = 0.0;   // yaw joint, positive turns the camera to the right
  double tilt = 0.0;  // overall pitch, positive up
  std::array<double, 2> tilt_split{0.0, 0.0};

  bool operator==(const RobotState&) const = default;
};

struct Waypoint {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
};

/// A scripted pedestrian. The person exists only between the first and last
/// waypoint times and moves piecewise-linearly in between.
struct Person {
  int id = 0;
  std::vector<Waypoint> waypoints;
  double height = 1.7;
  double radius = 0.2;
  double core_temp = 36.6;
  double entry_time = 0.0;
  double cold_offset = 0.0;
  double cold_tau = 60.0;

  bool present_at(double t) const;
  Point2D position_at(double t) const;

  /// core - offset * exp(-(t - entry) / tau); never above core.
  double surface_temp(double t) const;
};

struct SensorParams {
  double lidar_sigma = 0.01;
  double thermal_sigma = 0.2;
  double spike_probability = 0.01;
  double bias_bound = 0.5;      // per-run thermal bias drawn from [-bound, bound]
  double vibration_gain = 1.5;  // s/m; detection miss probability = gain * |v|
  double ambient = 20.0;
  double camera_range = 8.0;
  double camera_height = 0.85;
};

/// Simulation state. Copyable; the generator travels with it so a copy
/// replays the same future.
struct World {
  Rect bounds{0.0, 0.0, 10.0, 10.0};
  bool walled = true;
  std::vector<Rect> obstacles;
  std::vector<Person> people;
  RobotState robot;
  RobotLimits limits;
  SensorParams sensors;
  double clock = 0.0;
  std::uint64_t seed = 0;
  Rng rng;
  double thermal_bias = 0.0;
  kernels::Execution execution = kernels::Execution::parallel;

  /// Seeds the generator and draws the per-run thermal bias, always as the
  /// very first draw.
  static World create(Rect bounds, bool walled, std::vector<Rect> obstacles, std::vector<Person> people,
                      RobotState robot, RobotLimits limits, SensorParams sensors, std::uint64_t seed);

  /// True when a robot disk at (x, y) overlaps an obstacle or leaves the walls.
  bool collides(double x, double y) const;
};

struct LidarScan {
  std::vector<double> angles;  // robot frame
  std::vector<double> ranges;  // metres, or kNoReturn

  static bool is_return(double r) { return r != kNoReturn; }
};

struct Detection {
  int person_id = 0;
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;
  int y_max = 0;

  bool operator==(const Detection&) const = default;
};

struct ThermalFrame {
  static constexpr int width = kThermalWidth;
  static constexpr int height = kThermalHeight;
  std::vector<double> temps = std::vector<double>(static_cast<std::size_t>(width) * height, 0.0);

  double& at(int u, int v) { return temps[static_cast<std::size_t>(v) * width + u]; }
  double at(int u, int v) const { return temps[static_cast<std::size_t>(v) * width + u]; }
};

/// Pinhole camera: x right, y down, principal point at the image centre,
/// independent focal lengths so both axes span 60 degrees.
struct Camera {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double yaw = 0.0;    // world heading of the optical axis
  double pitch = 0.0;  // positive up

  struct Projection {
    double u = 0.0;
    double v = 0.0;
    double depth = 0.0;
  };

  /// Image coordinates of a world point; nullopt when behind the camera.
  std::optional<Projection> project(double px, double py, double pz) const;

  static Camera of(const World& world);
};

/// A person inside the camera frustum with a clear line of sight, before
/// any detector misses are applied.
struct Sighting {
  int person_id = 0;
  double range = 0.0;
  double bearing = 0.0;  // positive to the right of the optical axis
  Detection box;
};

World step_world(World world, double dt, VelocityCommand cmd);

LidarScan simulate_lidar(World& world);

/// Noise-free geometric visibility, ordered by person id.
std::vector<Sighting> camera_sightings(const World& world);

std::vector<Detection> simulate_detections(World& world);

ThermalFrame simulate_thermal_frame(World& world);

inline int person_present_count(const std::vector<Detection>& detections)
{
  return static_cast<int>(detections.size());
}

}  // namespace fevbot::sim

#endif  // FEVBOT_SIM_WORLD_HPP
