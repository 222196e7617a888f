#include "fevbot/servo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fevbot::servo {

PixelOffset center_offset(const sim::Detection& d)
{
  return {(d.x_min + d.x_max) / 2.0 - sim::kImageWidth / 2.0, sim::kImageHeight / 2.0 - (d.y_min + d.y_max) / 2.0};
}

double yaw_from_pixel(double px, const ManipulatorModel& model)
{
  if (!(std::abs(px) <= model.px_max))
    throw std::out_of_range("horizontal pixel offset " + std::to_string(px) + " outside +/-" +
                            std::to_string(model.px_max));
  return model.alpha_max / model.px_max * px;
}

double pitch_from_pixel(double py, const ManipulatorModel& model)
{
  if (!(std::abs(py) <= model.py_max))
    throw std::out_of_range("vertical pixel offset " + std::to_string(py) + " outside +/-" +
                            std::to_string(model.py_max));
  return model.beta_max / model.py_max * py;
}

JointTarget joint_correction(const PixelOffset& offset, const ManipulatorModel& model)
{
  return {yaw_from_pixel(offset.px, model), pitch_from_pixel(offset.py, model)};
}

sim::RobotState align_step(sim::RobotState state, const PixelOffset& offset, const ManipulatorModel& model)
{
  const auto step = joint_correction(offset, model);
  state.pan = std::clamp(state.pan + step.yaw, -model.pan_limit, model.pan_limit);
  state.tilt = std::clamp(state.tilt + step.pitch, -model.tilt_limit, model.tilt_limit);
  // tilt/2 is exact in binary floating point, so the halves always sum back.
  state.tilt_split = {state.tilt / 2.0, state.tilt / 2.0};
  return state;
}

double approximation_error(double radial_offset, double distance)
{
  return radial_offset / (radial_offset + distance);
}

std::optional<sim::Detection> select_target(std::span<const sim::Detection> detections)
{
  std::optional<sim::Detection> best;
  double best_d2 = 0.0;
  for (const auto& d : detections) {
    const auto o = center_offset(d);
    const double d2 = o.px * o.px + o.py * o.py;
    if (!best || d2 < best_d2 || (d2 == best_d2 && d.person_id < best->person_id)) {
      best = d;
      best_d2 = d2;
    }
  }
  return best;
}

}  // namespace fevbot::servo
