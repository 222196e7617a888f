#ifndef FEVBOT_HARNESS_HPP
#define FEVBOT_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fevbot/chatbot.hpp"
#include "fevbot/goal_manager.hpp"
#include "fevbot/kernels.hpp"
#include "fevbot/occupancy.hpp"
#include "fevbot/scenario.hpp"
#include "fevbot/sim_world.hpp"

namespace fevbot::harness {

inline constexpr std::string_view kEventSchema = "fevbot.event/1";
inline constexpr std::string_view kTraceSchema = "fevbot.trace/1";
inline constexpr std::string_view kMetricsSchema = "fevbot.metrics/1";

/// In-process stand-ins for the robot's message topics.
inline constexpr std::string_view kDetectionTopic = "detected_objects_in_image";
inline constexpr std::string_view kPersonPresentTopic = "person_present";

enum class EventKind { detection, stop, resume, reading, fever, chat, announcement, goal_reached, plan_failed };

std::string_view to_string(EventKind k);

struct EventRecord {
  int tick = 0;
  double sim_time = 0.0;
  EventKind kind = EventKind::announcement;
  nlohmann::ordered_json data;

  /// One JSON object, no trailing newline.
  std::string to_line() const;
};

struct TraceRow {
  int tick = 0;
  double t = 0.0;
  double x = 0.0, y = 0.0, theta = 0.0;
  double v = 0.0, w = 0.0;  // applied this tick
  double pan = 0.0, tilt = 0.0;
  int person_present = 0;
};

/// Per-tick controller bookkeeping kept for tests and diagnostics.
struct TickRecord {
  int tick = 0;
  nav::Directive directive = nav::Directive::none;
  nav::NavMode mode = nav::NavMode::idle;
  VelocityCommand command;  // what the controller asked for
  double applied_v = 0.0;   // what the base did after limits
  double prev_v = 0.0;
  std::optional<Pose2D> active_goal;
  std::optional<Pose2D> saved_goal;
  double lidar_min = 0.0;  // extreme finite ranges this tick (0 when none)
  double lidar_max = 0.0;
};

struct Metrics {
  int people_screened = 0;
  int fevers_flagged = 0;
  int false_alarms = 0;
  int missed_fevers = 0;
  std::optional<double> mean_time_to_scan;
  std::optional<double> goal_completion_time;
  double distance_traveled = 0.0;
  int goals_reached = 0;
  int goals_total = 0;
  int plan_failures = 0;
  int ticks_run = 0;
  int chats_completed = 0;

  nlohmann::ordered_json to_json() const;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the scenario
  std::optional<int> ticks;           // overrides the scenario
  kernels::Execution execution = kernels::Execution::parallel;
};

struct RunResult {
  Metrics metrics;
  std::vector<EventRecord> events;
  std::vector<TraceRow> trace;
  std::vector<TickRecord> ticks;
  std::vector<chat::Session> transcripts;  // finished or abandoned
  nav::OccupancyGrid map;
  sim::World world;  // final state
};

/// Runs the tick loop. Per tick, in this order: announcement check; sense
/// (lidar, detections, thermal) and map update; person_present; goal
/// manager; servo; screening; dialog; planning and local control; world
/// step. Stops at the tick budget, or once every goal is done and no dialog
/// is open.
RunResult run(const Scenario& scenario, const RunOptions& options = {});

/// Builds the world a scenario describes at t = 0.
sim::World make_world(const Scenario& scenario, std::uint64_t seed,
                      kernels::Execution ex = kernels::Execution::parallel);

/// Grid covering the world bounds plus a one-metre margin.
GridGeometry map_geometry(const Scenario& scenario);

/// Occupancy grid rasterised from the scenario geometry (walls and
/// obstacles saturated occupied, the rest saturated free).
nav::OccupancyGrid ground_truth_grid(const Scenario& scenario);

void write_events(std::ostream& out, const std::vector<EventRecord>& events);
void write_trace(std::ostream& out, const std::vector<TraceRow>& rows);

}  // namespace fevbot::harness

#endif  // FEVBOT_HARNESS_HPP
