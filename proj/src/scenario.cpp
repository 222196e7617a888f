#include "fevbot/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#ifndef FEVBOT_DATA_DIR
#define FEVBOT_DATA_DIR "data"
#endif

namespace fevbot::harness {

namespace {

using nlohmann::json;

/// Reads one JSON object, remembering which keys were consumed so leftovers
/// can be reported as unknown fields.
class Section {
 public:
  Section(const json& j, std::string path, std::string_view source) : j_(j), path_(std::move(path)), source_(source)
  {
    if (!j_.is_object())
      fail("expected an object");
  }

  [[noreturn]] void fail(const std::string& what, std::string_view key = {}) const
  {
    std::string where = std::string(source_) + ": " + path_;
    if (!key.empty())
      where += (path_.empty() ? "" : ".") + std::string(key);
    throw ConfigError(where + ": " + what);
  }

  std::string field(std::string_view key) const { return (path_.empty() ? "" : path_ + ".") + std::string(key); }

  const json* get(std::string_view key)
  {
    seen_.insert(std::string(key));
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  bool has(std::string_view key) const { return j_.contains(key); }

  double number(std::string_view key, double def, const std::function<bool(double)>& ok = {},
                std::string_view rule = {})
  {
    const json* v = get(key);
    if (!v)
      return def;
    if (!v->is_number())
      fail("expected a number", key);
    const double x = v->get<double>();
    if (!std::isfinite(x))
      fail("must be finite", key);
    if (ok && !ok(x))
      fail(std::string(rule), key);
    return x;
  }

  double required_number(std::string_view key)
  {
    if (!has(key))
      fail("required field missing", key);
    return number(key, 0.0);
  }

  int integer(std::string_view key, int def, const std::function<bool(long long)>& ok = {}, std::string_view rule = {})
  {
    const json* v = get(key);
    if (!v)
      return def;
    if (!v->is_number_integer())
      fail("expected an integer", key);
    const long long x = v->get<long long>();
    if (ok && !ok(x))
      fail(std::string(rule), key);
    return static_cast<int>(x);
  }

  bool boolean(std::string_view key, bool def)
  {
    const json* v = get(key);
    if (!v)
      return def;
    if (!v->is_boolean())
      fail("expected true or false", key);
    return v->get<bool>();
  }

  std::string string(std::string_view key, std::string def)
  {
    const json* v = get(key);
    if (!v)
      return def;
    if (!v->is_string())
      fail("expected a string", key);
    return v->get<std::string>();
  }

  void finish() const
  {
    for (const auto& [key, _] : j_.items())
      if (!seen_.contains(key))
        fail("unknown field", key);
  }

  std::string_view source() const { return source_; }

 private:
  const json& j_;
  std::string path_;
  std::string_view source_;
  std::set<std::string> seen_;
};

const auto positive = [](double x) { return x > 0.0; };
const auto non_negative = [](double x) { return x >= 0.0; };
const auto probability = [](double x) { return x >= 0.0 && x <= 1.0; };

Pose2D read_pose(const json& j, const std::string& path, std::string_view source, bool theta_default_zero = true)
{
  Section s(j, path, source);
  Pose2D p;
  p.x = s.required_number("x");
  p.y = s.required_number("y");
  p.theta = theta_default_zero ? normalize_angle(s.number("theta", 0.0)) : s.required_number("theta");
  s.finish();
  return p;
}

std::vector<double> number_array(const json& j, std::size_t n, const std::string& path, std::string_view source)
{
  if (!j.is_array() || j.size() != n)
    throw ConfigError(std::string(source) + ": " + path + ": expected an array of " + std::to_string(n) + " numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number() || !std::isfinite(v.get<double>()))
      throw ConfigError(std::string(source) + ": " + path + ": expected an array of " + std::to_string(n) +
                        " numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

bool inside(const Rect& r, double x, double y)
{
  return x >= r.x_min && x <= r.x_max && y >= r.y_min && y <= r.y_max;
}

}  // namespace

const std::vector<std::string>& default_chat_script()
{
  static const std::vector<std::string> script{"hello", "yes I am vaccinated", "yes I have a cough", "ok thank you"};
  return script;
}

std::filesystem::path default_intents_path()
{
  return std::filesystem::path(FEVBOT_DATA_DIR) / "intents.json";
}

Scenario parse_scenario(const json& doc, std::string_view source, const std::filesystem::path& base_dir)
{
  require_schema(doc, kScenarioSchema, source);
  Section top(doc, "", source);
  top.get("schema");
  Scenario sc;

  sc.seed = static_cast<std::uint64_t>(top.integer("seed", 1, [](long long x) { return x >= 0; }, "must be >= 0"));
  sc.dt = top.number("dt", sc.dt, positive, "must be > 0");
  sc.ticks = top.integer("ticks", sc.ticks, [](long long x) { return x > 0 && x <= 10'000'000; }, "must be in [1, 1e7]");
  sc.split_distance = top.number("split_distance", sc.split_distance, non_negative, "must be >= 0");
  sc.announcement_period = top.number("announcement_period", sc.announcement_period, positive, "must be > 0");

  // world
  {
    const json* w = top.get("world");
    if (!w)
      top.fail("required field missing", "world");
    Section s(*w, "world", source);
    const double width = s.required_number("width");
    const double height = s.required_number("height");
    if (!(width > 0.0))
      s.fail("must be > 0", "width");
    if (!(height > 0.0))
      s.fail("must be > 0", "height");
    sc.bounds = {0.0, 0.0, width, height};
    sc.walled = s.boolean("walls", true);
    sc.grid_resolution = s.number("resolution", sc.grid_resolution, positive, "must be > 0");
    if (const json* obs = s.get("obstacles")) {
      if (!obs->is_array())
        s.fail("expected an array of [x_min, y_min, x_max, y_max]", "obstacles");
      for (std::size_t i = 0; i < obs->size(); ++i) {
        const std::string path = "world.obstacles[" + std::to_string(i) + "]";
        const auto v = number_array((*obs)[i], 4, path, source);
        if (!(v[0] < v[2] && v[1] < v[3]))
          throw ConfigError(std::string(source) + ": " + path + ": needs x_min < x_max and y_min < y_max");
        sc.obstacles.push_back({v[0], v[1], v[2], v[3]});
      }
    }
    s.finish();
  }

  // robot
  {
    const json* r = top.get("robot");
    if (!r)
      top.fail("required field missing", "robot");
    Section s(*r, "robot", source);
    sc.robot_start.x = s.required_number("x");
    sc.robot_start.y = s.required_number("y");
    sc.robot_start.theta = normalize_angle(s.number("theta", 0.0));
    sc.limits.v_max = s.number("v_max", sc.limits.v_max, positive, "must be > 0");
    if (sc.limits.v_max > sim::kMaxSpeed)
      s.fail("cannot exceed the platform top speed of 0.274 m/s", "v_max");
    sc.limits.w_max = s.number("w_max", sc.limits.w_max, positive, "must be > 0");
    sc.limits.a_max = s.number("a_max", sc.limits.a_max, positive, "must be > 0");
    sc.limits.alpha_max = s.number("alpha_max", sc.limits.alpha_max, positive, "must be > 0");
    sc.limits.radius = s.number("radius", sc.limits.radius, positive, "must be > 0");
    s.finish();
    if (!inside(sc.bounds, sc.robot_start.x, sc.robot_start.y))
      s.fail("robot start lies outside the world bounds", "x");
    for (const auto& o : sc.obstacles)
      if (o.intersects_disk(sc.robot_start.x, sc.robot_start.y, sc.limits.radius))
        s.fail("robot start overlaps an obstacle", "x");
  }

  // goals
  if (const json* g = top.get("goals")) {
    if (!g->is_array())
      top.fail("expected an array", "goals");
    for (std::size_t i = 0; i < g->size(); ++i) {
      const std::string path = "goals[" + std::to_string(i) + "]";
      const auto p = read_pose((*g)[i], path, source);
      if (!inside(sc.bounds, p.x, p.y))
        throw ConfigError(std::string(source) + ": " + path + ": goal lies outside the world bounds");
      sc.goals.push_back(p);
    }
  }

  // people
  if (const json* ppl = top.get("people")) {
    if (!ppl->is_array())
      top.fail("expected an array", "people");
    std::set<int> ids;
    for (std::size_t i = 0; i < ppl->size(); ++i) {
      const std::string path = "people[" + std::to_string(i) + "]";
      Section s((*ppl)[i], path, source);
      sim::Person p;
      if (!s.has("id"))
        s.fail("required field missing", "id");
      p.id = s.integer("id", 0);
      if (!ids.insert(p.id).second)
        s.fail("duplicate person id " + std::to_string(p.id), "id");
      p.height = s.number("height", p.height, positive, "must be > 0");
      p.radius = s.number("radius", p.radius, positive, "must be > 0");
      p.core_temp = s.number("core_temp", p.core_temp, [](double t) { return t > 20.0 && t < 45.0; },
                             "must lie in (20, 45) degC");
      p.entry_time = s.number("entry_time", p.entry_time);
      p.cold_offset = s.number("cold_offset", p.cold_offset, non_negative, "must be >= 0");
      p.cold_tau = s.number("cold_tau", p.cold_tau, positive, "must be > 0");
      const json* wps = s.get("waypoints");
      if (!wps || !wps->is_array() || wps->empty())
        s.fail("expected a non-empty array of [t, x, y]", "waypoints");
      for (std::size_t k = 0; k < wps->size(); ++k) {
        const std::string wpath = path + ".waypoints[" + std::to_string(k) + "]";
        const auto v = number_array((*wps)[k], 3, wpath, source);
        if (!p.waypoints.empty() && !(v[0] > p.waypoints.back().t))
          throw ConfigError(std::string(source) + ": " + wpath + ": waypoint times must strictly increase");
        if (!inside(sc.bounds, v[1], v[2]))
          throw ConfigError(std::string(source) + ": " + wpath + ": waypoint lies outside the world bounds");
        p.waypoints.push_back({v[0], v[1], v[2]});
      }
      if (const json* script = s.get("chat_script")) {
        if (!script->is_array())
          s.fail("expected an array of strings", "chat_script");
        std::vector<std::string> lines;
        for (const auto& line : *script) {
          if (!line.is_string())
            s.fail("expected an array of strings", "chat_script");
          lines.push_back(line.get<std::string>());
        }
        sc.chat_scripts[p.id] = std::move(lines);
      }
      s.finish();
      sc.people.push_back(std::move(p));
    }
  }

  if (const json* n = top.get("noise")) {
    Section s(*n, "noise", source);
    sc.sensors.lidar_sigma = s.number("lidar_sigma", sc.sensors.lidar_sigma, non_negative, "must be >= 0");
    sc.sensors.thermal_sigma = s.number("thermal_sigma", sc.sensors.thermal_sigma, non_negative, "must be >= 0");
    sc.sensors.spike_probability =
        s.number("spike_probability", sc.sensors.spike_probability, probability, "must lie in [0, 1]");
    sc.sensors.bias_bound = s.number("bias_bound", sc.sensors.bias_bound, non_negative, "must be >= 0");
    sc.sensors.vibration_gain = s.number("vibration_gain", sc.sensors.vibration_gain, non_negative, "must be >= 0");
    s.finish();
  }

  if (const json* c = top.get("camera")) {
    Section s(*c, "camera", source);
    sc.sensors.camera_range = s.number("range", sc.sensors.camera_range, positive, "must be > 0");
    sc.sensors.camera_height = s.number("height", sc.sensors.camera_height, positive, "must be > 0");
    sc.sensors.ambient = s.number("ambient", sc.sensors.ambient);
    s.finish();
  }

  if (const json* p = top.get("planner")) {
    Section s(*p, "planner", source);
    sc.planner.cost_factor = s.number("cost_factor", sc.planner.cost_factor, non_negative, "must be >= 0");
    sc.planner.neutral_cost = s.number("neutral_cost", sc.planner.neutral_cost, positive, "must be > 0");
    sc.planner.inflation_radius = s.number("inflation_radius", sc.planner.inflation_radius, positive, "must be > 0");
    sc.planner.occupied_threshold = s.number("occupied_threshold", sc.planner.occupied_threshold,
                                             [](double x) { return x > 0.5 && x < 1.0; }, "must lie in (0.5, 1)");
    sc.replan_ticks = s.integer("replan_ticks", sc.replan_ticks, [](long long x) { return x > 0; }, "must be > 0");
    s.finish();
  }

  if (const json* d = top.get("dwa")) {
    Section s(*d, "dwa", source);
    sc.dwa.sim_time = s.number("sim_time", sc.dwa.sim_time, positive, "must be > 0");
    sc.dwa.sim_dt = s.number("sim_dt", sc.dwa.sim_dt, positive, "must be > 0");
    if (!(sc.dwa.sim_time > sc.dwa.sim_dt))
      s.fail("must exceed sim_dt", "sim_time");
    sc.dwa.v_samples = s.integer("v_samples", sc.dwa.v_samples, [](long long x) { return x >= 2; }, "must be >= 2");
    sc.dwa.w_samples = s.integer("w_samples", sc.dwa.w_samples, [](long long x) { return x >= 2; }, "must be >= 2");
    sc.dwa.w_goal = s.number("w_goal", sc.dwa.w_goal, non_negative, "must be >= 0");
    sc.dwa.w_vel = s.number("w_vel", sc.dwa.w_vel, non_negative, "must be >= 0");
    sc.dwa.w_clear = s.number("w_clear", sc.dwa.w_clear, non_negative, "must be >= 0");
    sc.dwa.clearance_cap = s.number("clearance_cap", sc.dwa.clearance_cap, positive, "must be > 0");
    sc.dwa.lookahead = s.number("lookahead", sc.dwa.lookahead, positive, "must be > 0");
    sc.dwa.short_lookahead = s.number("short_lookahead", sc.dwa.short_lookahead, positive, "must be > 0");
    sc.dwa.safety_margin = s.number("safety_margin", sc.dwa.safety_margin, non_negative, "must be >= 0");
    s.finish();
  }

  if (const json* t = top.get("goal_tolerance")) {
    Section s(*t, "goal_tolerance", source);
    sc.tolerance.position = s.number("position", sc.tolerance.position, positive, "must be > 0");
    sc.tolerance.heading = s.number("heading", sc.tolerance.heading, positive, "must be > 0");
    s.finish();
  }

  if (const json* sc_json = top.get("screening")) {
    Section s(*sc_json, "screening", source);
    sc.fever_threshold = s.number("fever_threshold", sc.fever_threshold);
    sc.debounce_count =
        s.integer("debounce_count", sc.debounce_count, [](long long x) { return x >= 1; }, "must be >= 1");
    sc.rescreen_absence = s.number("rescreen_absence", sc.rescreen_absence, non_negative, "must be >= 0");
    s.finish();
  }

  sc.intents_path = default_intents_path();
  if (const json* c = top.get("chat")) {
    Section s(*c, "chat", source);
    if (s.has("intents")) {
      std::filesystem::path p = s.string("intents", "");
      sc.intents_path = p.is_absolute() ? p : base_dir / p;
    }
    sc.chat_turn_ticks =
        s.integer("turn_ticks", sc.chat_turn_ticks, [](long long x) { return x >= 1; }, "must be >= 1");
    s.finish();
  }

  top.finish();

  sc.dwa.v_max = sc.limits.v_max;
  sc.dwa.w_max = sc.limits.w_max;
  sc.dwa.a_max = sc.limits.a_max;
  sc.dwa.alpha_max = sc.limits.alpha_max;
  sc.dwa.robot_radius = sc.limits.radius;
  sc.planner.inscribed_radius = sc.limits.radius + 2.0 * sc.dwa.safety_margin;
  sc.dwa.control_dt = sc.dt;
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path)
{
  return parse_scenario(read_config_file(path), path.string(), path.parent_path());
}

}  // namespace fevbot::harness
