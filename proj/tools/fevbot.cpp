// Command-line front end: run, plan, chat, map.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fevbot/chatbot.hpp"
#include "fevbot/harness.hpp"
#include "fevbot/occupancy.hpp"
#include "fevbot/planner.hpp"
#include "fevbot/scenario.hpp"

namespace {

using namespace fevbot;

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

kernels::Execution parse_execution(const std::string& s)
{
  return s == "serial" ? kernels::Execution::serial : kernels::Execution::parallel;
}

int cmd_run(const std::string& scenario_path, std::optional<std::uint64_t> seed, std::optional<int> ticks,
            const std::string& out, const std::string& trace, const std::string& exec)
{
  const auto sc = harness::load_scenario(scenario_path);
  const auto result = harness::run(sc, {seed, ticks, parse_execution(exec)});

  if (out.empty() || out == "-") {
    harness::write_events(std::cout, result.events);
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f)
      throw std::runtime_error("cannot write " + out);
    harness::write_events(f, result.events);
  }
  if (!trace.empty()) {
    std::ofstream f(trace, std::ios::binary);
    if (!f)
      throw std::runtime_error("cannot write " + trace);
    harness::write_trace(f, result.trace);
  }
  // Metrics go to stderr when events take stdout.
  auto& metrics_out = (out.empty() || out == "-") ? std::cerr : std::cout;
  metrics_out << result.metrics.to_json().dump(2) << '\n';
  return 0;
}

int cmd_plan(const std::string& scenario_path, const std::vector<double>& start, const std::vector<double>& goal)
{
  const auto sc = harness::load_scenario(scenario_path);
  Pose2D s = sc.robot_start;
  Pose2D g = sc.goals.empty() ? sc.robot_start : sc.goals.front();
  if (start.size() == 2)
    s = {start[0], start[1], 0.0};
  if (goal.size() == 2)
    g = {goal[0], goal[1], 0.0};

  const auto grid = harness::ground_truth_grid(sc);
  const auto plan = nav::plan_global(grid, sc.planner, s, g);

  nlohmann::ordered_json j;
  j["schema"] = "fevbot.plan/1";
  j["status"] = nav::to_string(plan.status);
  j["start"] = {s.x, s.y};
  j["goal"] = {g.x, g.y};
  j["cost"] = plan.ok() ? nlohmann::ordered_json(plan.cost.value()) : nlohmann::ordered_json(nullptr);
  auto path = nlohmann::ordered_json::array();
  for (const auto& p : plan.path)
    path.push_back({p.x, p.y});
  j["path"] = std::move(path);
  std::cout << j.dump() << '\n';
  return plan.ok() ? 0 : kExitRuntime;
}

int cmd_chat(const std::string& intents_path, double reading)
{
  const auto config = chat::IntentSet::load(intents_path);
  auto session = chat::start_session(0, reading, config, 38.0);
  std::cout << session.transcript.back().text << std::endl;

  std::string line;
  while (!session.done() && std::getline(std::cin, line)) {
    auto r = chat::respond(std::move(session), line, config);
    session = std::move(r.session);
    std::cout << r.reply << std::endl;
    if (r.reprompt)
      std::cout << *r.reprompt << std::endl;
  }
  return session.done() ? 0 : kExitRuntime;
}

int cmd_map(const std::string& scenario_path, const std::string& out, std::optional<std::uint64_t> seed,
            std::optional<int> ticks, bool ground_truth)
{
  const auto sc = harness::load_scenario(scenario_path);
  const auto grid = ground_truth ? harness::ground_truth_grid(sc) : harness::run(sc, {seed, ticks}).map;
  if (out.empty() || out == "-")
    std::cout << nav::to_pgm(grid);
  else
    nav::write_pgm(grid, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"fever-screening robot simulator"};
  app.require_subcommand(1);

  std::string scenario, out, trace, exec = "parallel";
  std::optional<std::uint64_t> seed;
  std::optional<int> ticks;

  auto* run = app.add_subcommand("run", "simulate a scenario and write the event stream");
  run->add_option("--scenario", scenario, "scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "override the scenario seed");
  run->add_option("--ticks", ticks, "override the tick budget")->check(CLI::PositiveNumber);
  run->add_option("--out", out, "event stream (JSON lines); '-' for stdout");
  run->add_option("--trace", trace, "trajectory trace (CSV)");
  run->add_option("--exec", exec, "kernel execution")->check(CLI::IsMember({"serial", "parallel"}));

  std::vector<double> start, goal;
  auto* plan = app.add_subcommand("plan", "one-shot global plan on the scenario geometry");
  plan->add_option("--scenario", scenario, "scenario file")->required()->check(CLI::ExistingFile);
  plan->add_option("--start", start, "start x y (default: robot start)")->expected(2);
  plan->add_option("--goal", goal, "goal x y (default: first goal)")->expected(2);

  std::string intents = harness::default_intents_path().string();
  double reading = 38.6;
  auto* chat = app.add_subcommand("chat", "talk to the screening dialog on stdin");
  chat->add_option("--intents", intents, "intent file")->check(CLI::ExistingFile);
  chat->add_option("--reading", reading, "temperature quoted in the opening line");

  bool ground_truth = false;
  auto* map = app.add_subcommand("map", "dump the occupancy grid as a graymap");
  map->add_option("--scenario", scenario, "scenario file")->required()->check(CLI::ExistingFile);
  map->add_option("--out", out, "PGM file; '-' for stdout");
  map->add_option("--seed", seed, "override the scenario seed");
  map->add_option("--ticks", ticks, "override the tick budget")->check(CLI::PositiveNumber);
  map->add_flag("--ground-truth", ground_truth, "rasterise the scenario instead of mapping it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run)
      return cmd_run(scenario, seed, ticks, out, trace, exec);
    if (*plan)
      return cmd_plan(scenario, start, goal);
    if (*chat)
      return cmd_chat(intents, reading);
    if (*map)
      return cmd_map(scenario, out, seed, ticks, ground_truth);
  } catch (const ConfigError& e) {
    std::cerr << "fevbot: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "fevbot: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
