#ifndef FEVBOT_SERVO_HPP
#define FEVBOT_SERVO_HPP

#include <optional>
#include <span>

#include "fevbot/geometry.hpp"
#include "fevbot/sim_world.hpp"

namespace fevbot::servo {

/// Pan-tilt head geometry. The angular range of each axis equals the camera
/// half field of view, so a target at the image edge maps to a full
/// half-FOV correction.
struct ManipulatorModel {
  double radial_offset = 0.1;  // camera distance from the pan axis, m
  double px_max = 320.0;
  double py_max = 240.0;
  double alpha_max = kPi / 6.0;
  double beta_max = kPi / 6.0;
  double pan_limit = kPi / 2.0;
  double tilt_limit = kPi / 4.0;
};

/// Bounding-box centre relative to the image centre; x right, y up.
struct PixelOffset {
  double px = 0.0;
  double py = 0.0;

  bool operator==(const PixelOffset&) const = default;
};

struct JointTarget {
  double yaw = 0.0;
  double pitch = 0.0;
};

PixelOffset center_offset(const sim::Detection& d);

/// Small-angle pixel-to-angle law: angle / angle_max = offset / offset_max.
/// Throws std::out_of_range when |px| > px_max.
double yaw_from_pixel(double px, const ManipulatorModel& model = {});
double pitch_from_pixel(double py, const ManipulatorModel& model = {});

JointTarget joint_correction(const PixelOffset& offset, const ManipulatorModel& model = {});

/// One incremental servo update: adds the correction to the current pan and
/// tilt, clamps to joint limits and splits tilt evenly over the two pitch
/// joints.
sim::RobotState align_step(sim::RobotState state, const PixelOffset& offset, const ManipulatorModel& model = {});

/// Relative error of treating R + D as D.
double approximation_error(double radial_offset, double distance);

/// Detection whose box centre lies nearest the image centre; ties go to the
/// lowest person id.
std::optional<sim::Detection> select_target(std::span<const sim::Detection> detections);

}  // namespace fevbot::servo

#endif  // FEVBOT_SERVO_HPP
