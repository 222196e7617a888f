#ifndef FEVBOT_SCENARIO_HPP
#define FEVBOT_SCENARIO_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fevbot/config.hpp"
#include "fevbot/dwa.hpp"
#include "fevbot/goal_manager.hpp"
#include "fevbot/planner.hpp"
#include "fevbot/sim_world.hpp"

namespace fevbot::harness {

inline constexpr std::string_view kScenarioSchema = "fevbot.scenario/1";

/// Everything a run needs. Omitted fields take the defaults below.
struct Scenario {
  // world
  Rect bounds{0.0, 0.0, 10.0, 10.0};
  bool walled = true;
  std::vector<Rect> obstacles;
  double grid_resolution = 0.05;

  // actors
  Pose2D robot_start;
  std::vector<Pose2D> goals;
  double split_distance = 3.0;
  std::vector<sim::Person> people;
  std::map<int, std::vector<std::string>> chat_scripts;  // per person id

  // models
  sim::RobotLimits limits;
  sim::SensorParams sensors;
  nav::PlannerParams planner;
  nav::DwaParams dwa;  // kinematic limits are copied from `limits` on load
  nav::GoalTolerance tolerance;
  int replan_ticks = 10;

  // screening and dialog
  double fever_threshold = 38.0;
  int debounce_count = 3;
  double rescreen_absence = 5.0;  // s out of view before a flagged person may be flagged again
  std::filesystem::path intents_path;
  int chat_turn_ticks = 10;
  double announcement_period = 10.0;

  // run control
  double dt = 0.1;
  int ticks = 3000;
  std::uint64_t seed = 1;
};

/// The utterances a simulated person gives when no script is configured:
/// the on-script happy path through the dialog.
const std::vector<std::string>& default_chat_script();

/// Validates and fills defaults. `base_dir` resolves a relative intents
/// path. Throws ConfigError naming the offending field.
Scenario parse_scenario(const nlohmann::json& doc, std::string_view source = "<scenario>",
                        const std::filesystem::path& base_dir = {});

Scenario load_scenario(const std::filesystem::path& path);

/// Path of the intent file shipped with the project.
std::filesystem::path default_intents_path();

}  // namespace fevbot::harness

#endif  // FEVBOT_SCENARIO_HPP
