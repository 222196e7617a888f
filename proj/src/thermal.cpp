#include "fevbot/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fevbot::thermal {

ThermalPoint map_to_thermal(double x, double y)
{
  if (!(x >= 0.0 && x <= sim::kImageWidth && y >= 0.0 && y <= sim::kImageHeight))
    throw std::out_of_range("detection pixel (" + std::to_string(x) + ", " + std::to_string(y) +
                            ") outside the 640x480 image");
  constexpr double sx = double(sim::kThermalWidth) / sim::kImageWidth;
  constexpr double sy = double(sim::kThermalHeight) / sim::kImageHeight;
  const int u = std::clamp(static_cast<int>(std::floor(x * sx)), 0, sim::kThermalWidth - 1);
  const int v = std::clamp(static_cast<int>(std::floor(y * sy)), 0, sim::kThermalHeight - 1);
  return {u, v};
}

std::array<double, 9> sample_nine(const sim::ThermalFrame& frame, ThermalPoint p)
{
  std::array<double, 9> out{};
  std::size_t k = 0;
  for (int dv = -1; dv <= 1; ++dv) {
    for (int du = -1; du <= 1; ++du) {
      const int u = std::clamp(p.u + du, 0, sim::ThermalFrame::width - 1);
      const int v = std::clamp(p.v + dv, 0, sim::ThermalFrame::height - 1);
      out[k++] = frame.at(u, v);
    }
  }
  return out;
}

double max_temperature(std::span<const double, 9> samples)
{
  return *std::max_element(samples.begin(), samples.end());
}

DebounceResult debounce_update(DebounceState state, double reading)
{
  state.last_reading = reading;
  if (reading > state.threshold)
    state.consecutive_over = std::min(state.consecutive_over + 1, state.required);
  else
    state.consecutive_over = 0;

  const bool fever = state.consecutive_over == state.required;
  if (fever)
    state.consecutive_over = 0;
  return {state, fever};
}

ScreenResult screen_tick(const sim::ThermalFrame& frame, const std::optional<sim::Detection>& detection,
                         DebounceState state)
{
  if (!detection) {
    state.consecutive_over = 0;
    return {state, false, std::nullopt, std::nullopt};
  }
  const double cx = (detection->x_min + detection->x_max) / 2.0;
  const double cy = (detection->y_min + detection->y_max) / 2.0;
  const auto samples = sample_nine(frame, map_to_thermal(cx, cy));
  const double reading = max_temperature(samples);
  const auto [next, fever] = debounce_update(state, reading);

  ScreenResult r{next, fever, reading, std::nullopt};
  if (fever)
    r.event = FeverEvent{detection->person_id, reading};
  return r;
}

}  // namespace fevbot::thermal
