#include "fevbot/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace fevbot::kernels {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ray_box(const Rect& b, Point2D o, double dx, double dy)
{
  double t_near = -kInf;
  double t_far = kInf;
  const double origin[2] = {o.x, o.y};
  const double dir[2] = {dx, dy};
  const double lo[2] = {b.x_min, b.y_min};
  const double hi[2] = {b.x_max, b.y_max};
  for (int axis = 0; axis < 2; ++axis) {
    if (dir[axis] == 0.0) {
      if (origin[axis] < lo[axis] || origin[axis] > hi[axis])
        return kInf;
      continue;
    }
    double t1 = (lo[axis] - origin[axis]) / dir[axis];
    double t2 = (hi[axis] - origin[axis]) / dir[axis];
    if (t1 > t2)
      std::swap(t1, t2);
    t_near = std::max(t_near, t1);
    t_far = std::min(t_far, t2);
  }
  if (t_far < std::max(t_near, 0.0))
    return kInf;
  return std::max(t_near, 0.0);
}

double ray_disk(const Circle& c, Point2D o, double dx, double dy)
{
  const double ox = o.x - c.x;
  const double oy = o.y - c.y;
  const double b = ox * dx + oy * dy;
  const double q = ox * ox + oy * oy - c.r * c.r;
  if (q <= 0.0)
    return 0.0;
  const double disc = b * b - q;
  if (disc < 0.0)
    return kInf;
  const double t = -b - std::sqrt(disc);
  return t >= 0.0 ? t : kInf;
}

double ray_enclosure_exit(const Rect& e, Point2D o, double dx, double dy)
{
  double t = kInf;
  if (dx > 0.0)
    t = std::min(t, (e.x_max - o.x) / dx);
  else if (dx < 0.0)
    t = std::min(t, (e.x_min - o.x) / dx);
  if (dy > 0.0)
    t = std::min(t, (e.y_max - o.y) / dy);
  else if (dy < 0.0)
    t = std::min(t, (e.y_min - o.y) / dy);
  return std::max(t, 0.0);
}

// 1-D squared distance transform of f into d (Felzenszwalb & Huttenlocher).
// v and z are scratch buffers of size n and n + 1.
void transform_1d(const double* f, double* d, int n, int* v, double* z)
{
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    double s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) / (2.0 * q - 2.0 * v[k]);
    while (s <= z[k]) {
      --k;
      s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) / (2.0 * q - 2.0 * v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q)
      ++k;
    const double dq = double(q) - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

// Stand-in for "no site" inside the transform; large but finite so the
// envelope arithmetic stays well defined.
constexpr double kFar = 1e20;

template <bool Parallel>
std::vector<double> distance_field_impl(std::span<const std::uint8_t> marked, int width, int height)
{
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i)
    sq[i] = marked[i] ? 0.0 : kFar;

  // Columns.
#pragma omp parallel if (Parallel)
  {
    std::vector<double> f(height), d(height), z(height + 1);
    std::vector<int> v(height);
#pragma omp for schedule(static)
    for (int x = 0; x < width; ++x) {
      for (int y = 0; y < height; ++y)
        f[y] = sq[static_cast<std::size_t>(y) * width + x];
      transform_1d(f.data(), d.data(), height, v.data(), z.data());
      for (int y = 0; y < height; ++y)
        sq[static_cast<std::size_t>(y) * width + x] = d[y];
    }
  }

  // Rows.
#pragma omp parallel if (Parallel)
  {
    std::vector<double> d(width), z(width + 1);
    std::vector<int> v(width);
#pragma omp for schedule(static)
    for (int y = 0; y < height; ++y) {
      double* row = sq.data() + static_cast<std::size_t>(y) * width;
      transform_1d(row, d.data(), width, v.data(), z.data());
      std::copy(d.begin(), d.end(), row);
    }
  }

  for (auto& s : sq)
    s = s >= kFar * 0.5 ? kInf : std::sqrt(s);
  return sq;
}

double lookup_distance(const RolloutSpec& spec, const Pose2D& p)
{
  const auto c = spec.grid.world_to_cell(p.x, p.y);
  if (!c)
    return 0.0;
  return spec.obstacle_distance[spec.grid.index(*c)];
}

}  // namespace

double cast_ray(const RaycastScene& scene, Point2D origin, double dx, double dy)
{
  double best = kInf;
  if (scene.enclosure)
    best = ray_enclosure_exit(*scene.enclosure, origin, dx, dy);
  for (const auto& b : scene.boxes)
    best = std::min(best, ray_box(b, origin, dx, dy));
  for (const auto& c : scene.disks)
    best = std::min(best, ray_disk(c, origin, dx, dy));
  return best;
}

void raycast_serial(const RaycastScene& scene, Point2D origin, double heading, std::span<const double> beam_angles,
                    std::span<double> hits)
{
  for (std::size_t i = 0; i < beam_angles.size(); ++i) {
    const double a = heading + beam_angles[i];
    hits[i] = cast_ray(scene, origin, std::cos(a), std::sin(a));
  }
}

void raycast_parallel(const RaycastScene& scene, Point2D origin, double heading, std::span<const double> beam_angles,
                      std::span<double> hits)
{
  const auto n = static_cast<std::int64_t>(beam_angles.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const double a = heading + beam_angles[i];
    hits[i] = cast_ray(scene, origin, std::cos(a), std::sin(a));
  }
}

std::vector<double> distance_field_brute_force(std::span<const std::uint8_t> marked, int width, int height)
{
  std::vector<CellIndex> sites;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      if (marked[static_cast<std::size_t>(y) * width + x])
        sites.push_back({x, y});

  std::vector<double> out(static_cast<std::size_t>(width) * height, kInf);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      std::int64_t best = std::numeric_limits<std::int64_t>::max();
      for (const auto& s : sites) {
        const std::int64_t dx = s.x - x;
        const std::int64_t dy = s.y - y;
        best = std::min(best, dx * dx + dy * dy);
      }
      if (!sites.empty())
        out[static_cast<std::size_t>(y) * width + x] = std::sqrt(static_cast<double>(best));
    }
  }
  return out;
}

std::vector<double> distance_field_serial(std::span<const std::uint8_t> marked, int width, int height)
{
  return distance_field_impl<false>(marked, width, height);
}

std::vector<double> distance_field_parallel(std::span<const std::uint8_t> marked, int width, int height)
{
  return distance_field_impl<true>(marked, width, height);
}

RolloutScore score_rollout(const RolloutSpec& spec, Candidate c)
{
  RolloutScore s;
  const int steps = std::max(1, static_cast<int>(std::lround(spec.sim_time / spec.sim_dt)));
  const double start_distance = lookup_distance(spec, spec.start);
  // A robot already inside the inflated zone may move as long as it does
  // not get any closer to the obstacle.
  const bool start_inside = start_distance <= spec.robot_radius;

  Pose2D p = spec.start;
  double min_distance = kInf;
  s.feasible = true;
  for (int i = 0; i < steps; ++i) {
    p = integrate_unicycle(p, c.v, c.w, spec.sim_dt);
    const double d = lookup_distance(spec, p);
    if (d <= spec.robot_radius && !(start_inside && d >= start_distance && d > 0.0)) {
      s.feasible = false;
      break;
    }
    min_distance = std::min(min_distance, d);
  }
  s.end = p;
  s.min_distance = min_distance;
  if (!s.feasible)
    return s;

  const double tx = spec.target.x - p.x;
  const double ty = spec.target.y - p.y;
  if (tx * tx + ty * ty < 1e-18)
    s.heading = 1.0;
  else
    s.heading = 1.0 - std::abs(normalize_angle(std::atan2(ty, tx) - p.theta)) / kPi;
  s.velocity = spec.v_max > 0.0 ? c.v / spec.v_max : 0.0;
  s.clearance = std::min(min_distance, spec.clearance_cap) / spec.clearance_cap;
  s.total = spec.w_goal * s.heading + spec.w_vel * s.velocity + spec.w_clear * s.clearance;
  return s;
}

void score_rollouts_serial(const RolloutSpec& spec, std::span<const Candidate> candidates,
                           std::span<RolloutScore> out)
{
  for (std::size_t i = 0; i < candidates.size(); ++i)
    out[i] = score_rollout(spec, candidates[i]);
}

void score_rollouts_parallel(const RolloutSpec& spec, std::span<const Candidate> candidates,
                             std::span<RolloutScore> out)
{
  const auto n = static_cast<std::int64_t>(candidates.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < n; ++i)
    out[i] = score_rollout(spec, candidates[i]);
}

}  // namespace fevbot::kernels
