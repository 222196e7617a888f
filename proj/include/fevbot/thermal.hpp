#ifndef FEVBOT_THERMAL_HPP
#define FEVBOT_THERMAL_HPP

#include <array>
#include <optional>
#include <span>

#include "fevbot/sim_world.hpp"

namespace fevbot::thermal {

struct ThermalPoint {
  int u = 0;
  int v = 0;

  bool operator==(const ThermalPoint&) const = default;
};

/// Consecutive-over-threshold counter for one tracked person.
struct DebounceState {
  int consecutive_over = 0;
  double threshold = 38.0;
  int required = 3;
  std::optional<double> last_reading;

  bool operator==(const DebounceState&) const = default;
};

struct DebounceResult {
  DebounceState state;
  bool fever = false;
};

struct FeverEvent {
  int person_id = 0;
  double reading = 0.0;
};

struct ScreenResult {
  DebounceState state;
  bool fever = false;
  std::optional<double> reading;
  std::optional<FeverEvent> event;
};

/// Detection-image pixel (640x480) to thermal pixel (160x120) at a uniform
/// 1/4 scale. Throws std::out_of_range outside [0, 640] x [0, 480].
ThermalPoint map_to_thermal(double x, double y);

/// 3x3 neighbourhood around p, row by row, with off-frame neighbours clamped
/// to the nearest edge pixel.
std::array<double, 9> sample_nine(const sim::ThermalFrame& frame, ThermalPoint p);

double max_temperature(std::span<const double, 9> samples);

DebounceResult debounce_update(DebounceState state, double reading);

/// Full screening step for one person: box centre -> thermal pixel -> nine
/// samples -> max -> debounce. An absent detection resets the counter.
ScreenResult screen_tick(const sim::ThermalFrame& frame, const std::optional<sim::Detection>& detection,
                         DebounceState state);

}  // namespace fevbot::thermal

#endif  // FEVBOT_THERMAL_HPP
