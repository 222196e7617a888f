#ifndef FEVBOT_GEOMETRY_HPP
#define FEVBOT_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fevbot {

inline constexpr double kPi = std::numbers::pi;

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a)
{
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi)
    a += 2.0 * kPi;
  return a;
}

struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // (-pi, pi]

  bool operator==(const Pose2D&) const = default;
};

struct VelocityCommand {
  double v = 0.0;  // m/s
  double w = 0.0;  // rad/s

  bool operator==(const VelocityCommand&) const = default;
};

struct Point2D {
  double x = 0.0;
  double y = 0.0;
};

/// Axis-aligned rectangle, min corner inclusive.
struct Rect {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  bool contains(double x, double y) const
  {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }

  /// True when a disk of radius r centred at (x, y) overlaps the rectangle.
  bool intersects_disk(double x, double y, double r) const
  {
    const double cx = std::clamp(x, x_min, x_max);
    const double cy = std::clamp(y, y_min, y_max);
    const double dx = x - cx;
    const double dy = y - cy;
    return dx * dx + dy * dy < r * r;
  }
};

struct Circle {
  double x = 0.0;
  double y = 0.0;
  double r = 0.0;
};

inline double distance(double ax, double ay, double bx, double by)
{
  return std::hypot(bx - ax, by - ay);
}

/// Closed-form unicycle integration over dt.
inline Pose2D integrate_unicycle(const Pose2D& p, double v, double w, double dt)
{
  Pose2D out = p;
  if (std::abs(w) < 1e-9) {
    out.x += v * std::cos(p.theta) * dt;
    out.y += v * std::sin(p.theta) * dt;
  } else {
    const double th1 = p.theta + w * dt;
    out.x += v / w * (std::sin(th1) - std::sin(p.theta));
    out.y -= v / w * (std::cos(th1) - std::cos(p.theta));
    out.theta = th1;
  }
  out.theta = normalize_angle(out.theta);
  return out;
}

}  // namespace fevbot

#endif  // FEVBOT_GEOMETRY_HPP
