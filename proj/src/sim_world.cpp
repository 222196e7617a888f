#include "fevbot/sim_world.hpp"

#include <algorithm>
#include <cmath>

// Random draws happen in this order and only here:
//   World::create            thermal bias (1 uniform)
//   simulate_lidar           720 normals when lidar_sigma > 0
//   simulate_detections      1 uniform per sighting, ascending person id
//   simulate_thermal_frame   19200 normals (row-major) when thermal_sigma > 0,
//                            then 1 uniform for the spike test, plus 1 index
//                            and 1 value draw when a spike fires
// The harness calls the sensors once per tick in that order.

namespace fevbot::sim {

bool Person::present_at(double t) const
{
  return !waypoints.empty() && t >= waypoints.front().t && t <= waypoints.back().t;
}

Point2D Person::position_at(double t) const
{
  if (waypoints.empty())
    return {};
  if (t <= waypoints.front().t)
    return {waypoints.front().x, waypoints.front().y};
  if (t >= waypoints.back().t)
    return {waypoints.back().x, waypoints.back().y};
  const auto next = std::upper_bound(waypoints.begin(), waypoints.end(), t,
                                     [](double tt, const Waypoint& w) { return tt < w.t; });
  const auto prev = next - 1;
  const double s = (t - prev->t) / (next->t - prev->t);
  return {prev->x + s * (next->x - prev->x), prev->y + s * (next->y - prev->y)};
}

double Person::surface_temp(double t) const
{
  const double elapsed = std::max(0.0, t - entry_time);
  const double chill = cold_tau > 0.0 ? cold_offset * std::exp(-elapsed / cold_tau) : 0.0;
  return std::min(core_temp, core_temp - chill);
}

World World::create(Rect bounds, bool walled, std::vector<Rect> obstacles, std::vector<Person> people,
                    RobotState robot, RobotLimits limits, SensorParams sensors, std::uint64_t seed)
{
  World w;
  w.bounds = bounds;
  w.walled = walled;
  w.obstacles = std::move(obstacles);
  w.people = std::move(people);
  std::sort(w.people.begin(), w.people.end(), [](const Person& a, const Person& b) { return a.id < b.id; });
  w.robot = robot;
  w.robot.pose.theta = normalize_angle(w.robot.pose.theta);
  w.limits = limits;
  w.sensors = sensors;
  w.seed = seed;
  w.rng = Rng(seed);
  w.thermal_bias = w.rng.uniform(-sensors.bias_bound, sensors.bias_bound);
  return w;
}

bool World::collides(double x, double y) const
{
  const double r = limits.radius;
  if (walled && (x - r < bounds.x_min || x + r > bounds.x_max || y - r < bounds.y_min || y + r > bounds.y_max))
    return true;
  return std::any_of(obstacles.begin(), obstacles.end(), [&](const Rect& o) { return o.intersects_disk(x, y, r); });
}

World step_world(World world, double dt, VelocityCommand cmd)
{
  auto& robot = world.robot;
  const auto& lim = world.limits;

  const double v_goal = std::clamp(cmd.v, 0.0, lim.v_max);
  const double w_goal = std::clamp(cmd.w, -lim.w_max, lim.w_max);
  const double v = std::clamp(std::clamp(v_goal, robot.v - lim.a_max * dt, robot.v + lim.a_max * dt), 0.0, lim.v_max);
  const double w = std::clamp(std::clamp(w_goal, robot.w - lim.alpha_max * dt, robot.w + lim.alpha_max * dt),
                              -lim.w_max, lim.w_max);

  const Pose2D start = robot.pose;
  const Pose2D end = integrate_unicycle(start, v, w, dt);
  if (!world.collides(end.x, end.y) || world.collides(start.x, start.y)) {
    robot.pose = end;
    robot.v = v;
    robot.w = w;
  } else {
    // Largest free fraction of the step, then stop dead.
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 30; ++i) {
      const double mid = 0.5 * (lo + hi);
      const Pose2D p = integrate_unicycle(start, v, w, mid * dt);
      (world.collides(p.x, p.y) ? hi : lo) = mid;
    }
    robot.pose = integrate_unicycle(start, v, w, lo * dt);
    robot.v = 0.0;
    robot.w = 0.0;
  }
  world.clock += dt;
  return world;
}

namespace {

std::vector<Circle> people_disks(const World& world)
{
  std::vector<Circle> disks;
  for (const auto& p : world.people) {
    if (!p.present_at(world.clock))
      continue;
    const auto pos = p.position_at(world.clock);
    disks.push_back({pos.x, pos.y, p.radius});
  }
  return disks;
}

const std::vector<double>& beam_angles()
{
  static const std::vector<double> angles = [] {
    std::vector<double> a(kLidarBeams);
    for (int i = 0; i < kLidarBeams; ++i)
      a[i] = (i - kLidarBeams / 2) * kLidarStep;
    return a;
  }();
  return angles;
}

}  // namespace

LidarScan simulate_lidar(World& world)
{
  LidarScan scan;
  scan.angles = beam_angles();
  scan.ranges.assign(kLidarBeams, kNoReturn);

  std::vector<double> noise(kLidarBeams, 0.0);
  if (world.sensors.lidar_sigma > 0.0)
    for (auto& n : noise)
      n = world.sensors.lidar_sigma * world.rng.normal();

  const auto disks = people_disks(world);
  kernels::RaycastScene scene{world.obstacles, disks, std::nullopt};
  if (world.walled)
    scene.enclosure = world.bounds;

  std::vector<double> hits(kLidarBeams);
  const auto& pose = world.robot.pose;
  kernels::raycast(world.execution, scene, {pose.x, pose.y}, pose.theta, scan.angles, hits);

  for (int i = 0; i < kLidarBeams; ++i) {
    if (hits[i] < kLidarMinRange || !std::isfinite(hits[i]))
      continue;
    const double r = hits[i] + noise[i];
    if (r >= kLidarMinRange && r <= kLidarMaxRange)
      scan.ranges[i] = r;
  }
  return scan;
}

std::optional<Camera::Projection> Camera::project(double px, double py, double pz) const
{
  const double cy = std::cos(yaw), sy = std::sin(yaw);
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  const double rx = px - x, ry = py - y, rz = pz - z;
  const double forward = rx * cy * cp + ry * sy * cp + rz * sp;
  const double right = rx * sy - ry * cy;
  const double up = -rx * cy * sp - ry * sy * sp + rz * cp;
  if (forward <= 1e-6)
    return std::nullopt;
  return Projection{kImageWidth / 2.0 + kFocalX * right / forward, kImageHeight / 2.0 - kFocalY * up / forward,
                    forward};
}

Camera Camera::of(const World& world)
{
  const auto& r = world.robot;
  return {r.pose.x, r.pose.y, world.sensors.camera_height, r.pose.theta - r.pan, r.tilt};
}

std::vector<Sighting> camera_sightings(const World& world)
{
  std::vector<Sighting> out;
  const Camera cam = Camera::of(world);
  const kernels::RaycastScene occluders{world.obstacles, {}, std::nullopt};

  for (const auto& person : world.people) {
    if (!person.present_at(world.clock))
      continue;
    const auto pos = person.position_at(world.clock);
    const double dx = pos.x - cam.x;
    const double dy = pos.y - cam.y;
    const double range = std::hypot(dx, dy);
    if (range > world.sensors.camera_range || range <= person.radius)
      continue;
    const double bearing = normalize_angle(cam.yaw - std::atan2(dy, dx));
    if (std::abs(bearing) > kHalfFov)
      continue;
    if (kernels::cast_ray(occluders, {cam.x, cam.y}, dx / range, dy / range) < range)
      continue;

    const auto top = cam.project(pos.x, pos.y, person.height);
    const auto bottom = cam.project(pos.x, pos.y, 0.0);
    if (!top || !bottom)
      continue;
    const double half_width = kFocalX * person.radius / (0.5 * (top->depth + bottom->depth));
    Detection box{person.id,
                  static_cast<int>(std::lround(std::min(top->u, bottom->u) - half_width)),
                  static_cast<int>(std::lround(std::min(top->v, bottom->v))),
                  static_cast<int>(std::lround(std::max(top->u, bottom->u) + half_width)),
                  static_cast<int>(std::lround(std::max(top->v, bottom->v)))};
    box.x_min = std::clamp(box.x_min, 0, kImageWidth);
    box.x_max = std::clamp(box.x_max, 0, kImageWidth);
    box.y_min = std::clamp(box.y_min, 0, kImageHeight);
    box.y_max = std::clamp(box.y_max, 0, kImageHeight);
    if (box.x_min >= box.x_max || box.y_min >= box.y_max)
      continue;
    out.push_back({person.id, range, bearing, box});
  }
  return out;
}

std::vector<Detection> simulate_detections(World& world)
{
  const double p_miss = std::min(1.0, world.sensors.vibration_gain * std::abs(world.robot.v));
  std::vector<Detection> out;
  for (const auto& s : camera_sightings(world)) {
    const double u = world.rng.uniform();
    if (u >= p_miss)
      out.push_back(s.box);
  }
  return out;
}

ThermalFrame simulate_thermal_frame(World& world)
{
  ThermalFrame frame;
  const auto& sensors = world.sensors;
  std::fill(frame.temps.begin(), frame.temps.end(), sensors.ambient);

  // Far to near so closer people paint over farther ones.
  auto sightings = camera_sightings(world);
  std::stable_sort(sightings.begin(), sightings.end(),
                   [](const Sighting& a, const Sighting& b) { return a.range > b.range; });
  for (const auto& s : sightings) {
    const auto person = std::find_if(world.people.begin(), world.people.end(),
                                     [&](const Person& p) { return p.id == s.person_id; });
    const double temp = person->surface_temp(world.clock) + world.thermal_bias;
    // A thermal pixel belongs to the person when its centre, in detection
    // image coordinates, falls inside the box.
    for (int v = 0; v < ThermalFrame::height; ++v) {
      const double cy = 4.0 * v + 2.0;
      if (cy < s.box.y_min || cy >= s.box.y_max)
        continue;
      for (int u = 0; u < ThermalFrame::width; ++u) {
        const double cx = 4.0 * u + 2.0;
        if (cx >= s.box.x_min && cx < s.box.x_max)
          frame.at(u, v) = temp;
      }
    }
  }

  if (sensors.thermal_sigma > 0.0)
    for (auto& t : frame.temps)
      t += sensors.thermal_sigma * world.rng.normal();

  if (world.rng.uniform() < sensors.spike_probability) {
    const auto idx = world.rng.below(frame.temps.size());
    frame.temps[idx] = world.rng.uniform(45.0, 60.0);
  }
  return frame;
}

}  // namespace fevbot::sim
