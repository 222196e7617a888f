#include "fevbot/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <map>
#include <ostream>
#include <set>

#include "fevbot/dwa.hpp"
#include "fevbot/planner.hpp"
#include "fevbot/servo.hpp"
#include "fevbot/thermal.hpp"

namespace fevbot::harness {

namespace {

using nlohmann::ordered_json;

constexpr std::string_view kAnnouncement =
    "Temperature screening in progress. Please face the robot for a moment as it passes.";

// Ticks without a target before the pan-tilt head returns to its home pose.
constexpr int kHomeAfterTicks = 10;

// Ticks of consecutive planning failure before a goal is given up.
constexpr int kPlanRetryTicks = 30;

double tidy_time(double t)
{
  return std::round(t * 1e9) / 1e9;
}

ordered_json pose_json(const Pose2D& p)
{
  return {{"x", p.x}, {"y", p.y}, {"theta", p.theta}};
}

bool clear_of_obstacles(const Scenario& sc, const Pose2D& p, double r)
{
  if (sc.walled && (p.x - r < sc.bounds.x_min || p.x + r > sc.bounds.x_max || p.y - r < sc.bounds.y_min ||
                    p.y + r > sc.bounds.y_max))
    return false;
  for (const auto& o : sc.obstacles)
    if (o.contains(p.x, p.y) || o.intersects_disk(p.x, p.y, r))
      return false;
  return true;
}

struct GoalLabel {
  int index = 0;  // position in the scenario goal list
  bool intermediate = false;
};

struct PersonTrack {
  thermal::DebounceState debounce;
  std::optional<double> first_seen;
  double last_seen = -std::numeric_limits<double>::infinity();
  int reading_run = 0;
  bool screened = false;
  bool flagged = false;       // fever raised and not yet cleared by absence
  bool ever_flagged = false;
  int hot_visible_run = 0;    // ground truth: consecutive ticks visible above threshold
  bool fever_eligible = false;
  std::size_t script_pos = 0;
  int session_start_tick = -1;
};

class Runner {
 public:
  Runner(const Scenario& sc, const RunOptions& opt)
      : sc_(sc),
        ex_(opt.execution),
        budget_(opt.ticks.value_or(sc.ticks)),
        world_(make_world(sc, opt.seed.value_or(sc.seed), opt.execution)),
        grid_(nav::OccupancyGrid::create(map_geometry(sc))),
        chat_(chat::IntentSet::load(sc.intents_path), sc.fever_threshold)
  {
    // Labels follow the same walk split_goals makes over the list.
    const auto split = nav::split_goals(sc.robot_start, sc.goals, sc.split_distance);
    std::vector<GoalLabel> labels;
    Pose2D prev = sc.robot_start;
    for (std::size_t i = 0; i < sc.goals.size(); ++i) {
      const auto& g = sc.goals[i];
      const double d = distance(prev.x, prev.y, g.x, g.y);
      if (sc.split_distance > 0.0 && d > sc.split_distance) {
        const int pieces = static_cast<int>(std::ceil(d / sc.split_distance));
        for (int k = 1; k < pieces; ++k)
          labels.push_back({static_cast<int>(i), true});
      }
      labels.push_back({static_cast<int>(i), false});
      prev = g;
    }

    // Intermediate goals that land in or near known obstacles are dropped.
    const double keep_out = sc.limits.radius + sc.planner.inflation_radius;
    std::vector<Pose2D> goals;
    for (std::size_t i = 0; i < split.size(); ++i) {
      if (labels[i].intermediate && !clear_of_obstacles(sc, split[i], keep_out))
        continue;
      goals.push_back(split[i]);
      labels_.push_back(labels[i]);
    }
    gm_ = nav::start_navigation(gm_, goals);
    if (!labels_.empty()) {
      active_label_ = labels_.front();
      labels_.pop_front();
    }
    metrics_.goals_total = static_cast<int>(sc.goals.size());
  }

  RunResult run()
  {
    for (int k = 0; k < budget_; ++k) {
      step(k);
      metrics_.ticks_run = k + 1;
      if (gm_.mode == nav::NavMode::idle && chat_.active_count() == 0)
        break;
    }
    finish_metrics();

    RunResult r;
    r.metrics = metrics_;
    r.events = std::move(events_);
    r.trace = std::move(trace_);
    r.ticks = std::move(records_);
    r.transcripts = chat_.finished();
    r.transcripts.insert(r.transcripts.end(), abandoned_.begin(), abandoned_.end());
    for (const auto& [id, _] : tracks_)
      if (chat_.active(id))
        if (auto s = chat_.abandon(id))
          r.transcripts.push_back(*s);
    r.map = std::move(grid_);
    r.world = std::move(world_);
    return r;
  }

 private:
  void emit(int tick, EventKind kind, ordered_json data)
  {
    events_.push_back({tick, tidy_time(tick * sc_.dt), kind, std::move(data)});
  }

  PersonTrack& track(int id)
  {
    auto [it, inserted] = tracks_.try_emplace(id);
    if (inserted) {
      it->second.debounce.threshold = sc_.fever_threshold;
      it->second.debounce.required = sc_.debounce_count;
    }
    return it->second;
  }

  const sim::Person* person(int id) const
  {
    for (const auto& p : world_.people)
      if (p.id == id)
        return &p;
    return nullptr;
  }

  const std::vector<std::string>& script_for(int id) const
  {
    const auto it = sc_.chat_scripts.find(id);
    return it != sc_.chat_scripts.end() ? it->second : default_chat_script();
  }

  void step(int k)
  {
    const double t = world_.clock;
    TickRecord rec;
    rec.tick = k;

    if (t + 1e-9 >= next_announcement_) {
      emit(k, EventKind::announcement, {{"text", kAnnouncement}});
      next_announcement_ += sc_.announcement_period;
    }

    // Sense.
    const auto scan = sim::simulate_lidar(world_);
    const auto detections = sim::simulate_detections(world_);
    const auto frame = sim::simulate_thermal_frame(world_);
    const auto sightings = sim::camera_sightings(world_);
    nav::integrate_scan(grid_, world_.robot.pose, scan);
    for (const double r : scan.ranges) {
      if (!sim::LidarScan::is_return(r))
        continue;
      rec.lidar_min = rec.lidar_min == 0.0 ? r : std::min(rec.lidar_min, r);
      rec.lidar_max = std::max(rec.lidar_max, r);
    }
    if (!detections.empty()) {
      ordered_json list = ordered_json::array();
      for (const auto& d : detections)
        list.push_back({{"person_id", d.person_id}, {"bbox", {d.x_min, d.y_min, d.x_max, d.y_max}}});
      emit(k, EventKind::detection, {{"topic", kDetectionTopic}, {"detections", std::move(list)}});
    }

    // person_present -> goal manager.
    const int present = sim::person_present_count(detections);
    const bool reached = gm_.mode == nav::NavMode::navigating && gm_.active_goal &&
                         nav::at_goal(world_.robot.pose, *gm_.active_goal, sc_.tolerance);
    auto gs = nav::goal_manager_step(gm_, present, reached);
    gm_ = std::move(gs.gm);
    rec.directive = gs.directive;
    handle_directive(k, gs.directive, present);

    // Servo the head toward the most central detection.
    if (const auto target = servo::select_target(detections)) {
      world_.robot = servo::align_step(world_.robot, servo::center_offset(*target), manipulator_);
      lost_ticks_ = 0;
    } else if (++lost_ticks_ >= kHomeAfterTicks) {
      world_.robot.pan = 0.0;
      world_.robot.tilt = 0.0;
      world_.robot.tilt_split = {0.0, 0.0};
    }

    screen(k, t, detections, frame, sightings);
    converse(k);

    // Local control.
    VelocityCommand cmd{0.0, 0.0};
    if (gs.directive != nav::Directive::stop && gm_.mode == nav::NavMode::navigating && gm_.active_goal)
      cmd = drive(k);
    rec.command = cmd;
    rec.mode = gm_.mode;
    rec.active_goal = gm_.active_goal;
    rec.saved_goal = gm_.saved_goal;

    // Physics.
    rec.prev_v = world_.robot.v;
    const Pose2D before = world_.robot.pose;
    world_ = sim::step_world(std::move(world_), sc_.dt, cmd);
    metrics_.distance_traveled += distance(before.x, before.y, world_.robot.pose.x, world_.robot.pose.y);
    rec.applied_v = world_.robot.v;
    records_.push_back(rec);

    const auto& r = world_.robot;
    trace_.push_back({k, tidy_time(k * sc_.dt), r.pose.x, r.pose.y, r.pose.theta, r.v, r.w, r.pan, r.tilt, present});
  }

  void handle_directive(int k, nav::Directive d, int present)
  {
    using nav::Directive;
    switch (d) {
      case Directive::stop:
        emit(k, EventKind::stop,
             {{"topic", kPersonPresentTopic},
              {"person_present", present},
              {"saved_goal", pose_json(*gm_.saved_goal)},
              {"command", {{"v", 0.0}, {"w", 0.0}}}});
        aligning_ = false;
        break;
      case Directive::resume:
        emit(k, EventKind::resume, {{"topic", kPersonPresentTopic}, {"goal", pose_json(*gm_.active_goal)}});
        need_plan_ = true;
        plan_fail_since_.reset();
        break;
      case Directive::next_goal:
      case Directive::finished:
        goal_done(k, d);
        break;
      default:
        break;
    }
  }

  void goal_done(int k, nav::Directive d)
  {
    if (active_label_) {
      emit(k, EventKind::goal_reached,
           {{"goal_index", active_label_->index},
            {"intermediate", active_label_->intermediate},
            {"pose", pose_json(world_.robot.pose)}});
      if (!active_label_->intermediate) {
        ++metrics_.goals_reached;
        metrics_.goal_completion_time = tidy_time(k * sc_.dt);
      }
    }
    advance_label(d);
  }

  void advance_label(nav::Directive d)
  {
    active_label_.reset();
    if (d == nav::Directive::next_goal && !labels_.empty()) {
      active_label_ = labels_.front();
      labels_.pop_front();
    }
    path_.clear();
    need_plan_ = true;
    aligning_ = false;
    plan_fail_since_.reset();
  }

  void screen(int k, double t, const std::vector<sim::Detection>& detections, const sim::ThermalFrame& frame,
              const std::vector<sim::Sighting>& sightings)
  {
    // Ground truth for the missed-fever metric.
    std::set<int> visible;
    for (const auto& s : sightings) {
      visible.insert(s.person_id);
      auto& tr = track(s.person_id);
      const auto* p = person(s.person_id);
      if (p && p->surface_temp(t) > sc_.fever_threshold) {
        if (++tr.hot_visible_run >= sc_.debounce_count)
          tr.fever_eligible = true;
      } else {
        tr.hot_visible_run = 0;
      }
    }

    std::set<int> seen;
    for (const auto& d : detections) {
      seen.insert(d.person_id);
      auto& tr = track(d.person_id);
      if (!tr.first_seen)
        tr.first_seen = t;
      tr.last_seen = t;

      const auto res = thermal::screen_tick(frame, d, tr.debounce);
      tr.debounce = res.state;
      emit(k, EventKind::reading, {{"person_id", d.person_id}, {"reading", *res.reading}});

      if (++tr.reading_run >= sc_.debounce_count && !tr.screened) {
        tr.screened = true;
        ++metrics_.people_screened;
        scan_times_.push_back(t - *tr.first_seen);
      }

      if (res.event && !tr.flagged) {
        tr.flagged = true;
        tr.ever_flagged = true;
        ++metrics_.fevers_flagged;
        const auto* p = person(d.person_id);
        if (p && p->core_temp <= sc_.fever_threshold)
          ++metrics_.false_alarms;
        emit(k, EventKind::fever,
             {{"person_id", res.event->person_id}, {"reading", res.event->reading},
              {"threshold", sc_.fever_threshold}});
        if (!chat_.active(d.person_id)) {
          const auto& s = chat_.start(d.person_id, res.event->reading);
          tr.script_pos = 0;
          tr.session_start_tick = k;
          emit(k, EventKind::chat,
               {{"person_id", d.person_id},
                {"speaker", "robot"},
                {"text", s.transcript.front().text},
                {"state", chat::to_string(s.state)}});
        }
      }
    }

    for (auto& [id, tr] : tracks_) {
      if (!visible.contains(id))
        tr.hot_visible_run = 0;
      if (seen.contains(id))
        continue;
      tr.debounce = thermal::screen_tick(frame, std::nullopt, tr.debounce).state;
      tr.reading_run = 0;
      if (tr.flagged && !chat_.active(id) && t - tr.last_seen >= sc_.rescreen_absence)
        tr.flagged = false;
    }
  }

  void converse(int k)
  {
    std::vector<int> open;
    for (const auto& [id, tr] : tracks_)
      if (chat_.active(id))
        open.push_back(id);

    for (const int id : open) {
      auto& tr = tracks_.at(id);
      if (k == tr.session_start_tick || (k - tr.session_start_tick) % sc_.chat_turn_ticks != 0)
        continue;
      const auto& script = script_for(id);
      if (tr.script_pos >= script.size()) {
        if (auto s = chat_.abandon(id)) {
          emit(k, EventKind::chat,
               {{"person_id", id}, {"speaker", "robot"}, {"text", ""}, {"state", chat::to_string(s->state)},
                {"abandoned", true}});
          abandoned_.push_back(std::move(*s));
        }
        continue;
      }
      const std::string& line = script[tr.script_pos++];
      const auto reply = chat_.respond(id, line);
      emit(k, EventKind::chat, {{"person_id", id}, {"speaker", "person"}, {"text", line}});
      ordered_json robot{{"person_id", id}, {"speaker", "robot"}, {"text", reply.reply}};
      robot["intent"] = reply.intent ? ordered_json(*reply.intent) : ordered_json(nullptr);
      robot["state"] = chat::to_string(reply.session.state);
      emit(k, EventKind::chat, std::move(robot));
      if (reply.reprompt)
        emit(k, EventKind::chat,
             {{"person_id", id}, {"speaker", "robot"}, {"text", *reply.reprompt},
              {"state", chat::to_string(reply.session.state)}});
      if (reply.session.done())
        ++metrics_.chats_completed;
    }
  }

  VelocityCommand drive(int k)
  {
    const auto& pose = world_.robot.pose;
    const Pose2D goal = *gm_.active_goal;
    const double dist = distance(pose.x, pose.y, goal.x, goal.y);

    // Final approach: stop translating and turn onto the goal heading.
    if (dist <= sc_.tolerance.position || (aligning_ && dist <= 2.0 * sc_.tolerance.position)) {
      aligning_ = true;
      const double err = normalize_angle(goal.theta - pose.theta);
      return {0.0, std::clamp(1.5 * err, -sc_.limits.w_max, sc_.limits.w_max)};
    }
    aligning_ = false;

    if (need_plan_ || k - last_plan_tick_ >= sc_.replan_ticks) {
      costmap_ = nav::build_costmap(grid_, sc_.planner, ex_);
      last_plan_tick_ = k;
      auto plan = nav::plan_global(costmap_, pose, goal);
      if (plan.ok()) {
        path_ = std::move(plan.path);
        need_plan_ = false;
        plan_fail_since_.reset();
      } else {
        need_plan_ = true;
        if (!plan_fail_since_)
          plan_fail_since_ = k;
        if (k - *plan_fail_since_ >= kPlanRetryTicks) {
          ++metrics_.plan_failures;
          emit(k, EventKind::plan_failed,
               {{"goal_index", active_label_ ? active_label_->index : -1},
                {"goal", pose_json(goal)},
                {"status", nav::to_string(plan.status)}});
          auto gs = nav::skip_goal(std::move(gm_));
          gm_ = std::move(gs.gm);
          advance_label(gs.directive);
          return {0.0, 0.0};
        }
      }
    }
    if (path_.empty())
      return {0.0, 0.0};

    const double v_cap = std::sqrt(2.0 * sc_.limits.a_max * dist);
    return nav::dwa_step(world_.robot, path_, costmap_, sc_.dwa, ex_, v_cap).cmd;
  }

  void finish_metrics()
  {
    if (!scan_times_.empty()) {
      double sum = 0.0;
      for (const double s : scan_times_)
        sum += s;
      metrics_.mean_time_to_scan = tidy_time(sum / static_cast<double>(scan_times_.size()));
    }
    for (const auto& [id, tr] : tracks_)
      if (tr.fever_eligible && !tr.ever_flagged)
        ++metrics_.missed_fevers;
  }

  const Scenario& sc_;
  kernels::Execution ex_;
  int budget_;
  sim::World world_;
  nav::OccupancyGrid grid_;
  nav::Costmap costmap_;
  chat::ChatEngine chat_;
  servo::ManipulatorModel manipulator_;
  nav::GoalManager gm_;
  std::deque<GoalLabel> labels_;
  std::optional<GoalLabel> active_label_;
  std::vector<Pose2D> path_;
  bool need_plan_ = true;
  bool aligning_ = false;
  int last_plan_tick_ = std::numeric_limits<int>::min() / 2;
  std::optional<int> plan_fail_since_;
  int lost_ticks_ = 0;
  double next_announcement_ = 0.0;
  std::map<int, PersonTrack> tracks_;
  std::vector<double> scan_times_;
  std::vector<chat::Session> abandoned_;
  Metrics metrics_;
  std::vector<EventRecord> events_;
  std::vector<TraceRow> trace_;
  std::vector<TickRecord> records_;
};

}  // namespace

std::string_view to_string(EventKind k)
{
  switch (k) {
    case EventKind::detection: return "detection";
    case EventKind::stop: return "stop";
    case EventKind::resume: return "resume";
    case EventKind::reading: return "reading";
    case EventKind::fever: return "fever";
    case EventKind::chat: return "chat";
    case EventKind::announcement: return "announcement";
    case EventKind::goal_reached: return "goal_reached";
    case EventKind::plan_failed: return "plan_failed";
  }
  return "?";
}

std::string EventRecord::to_line() const
{
  ordered_json j;
  j["schema"] = kEventSchema;
  j["tick"] = tick;
  j["t"] = sim_time;
  j["kind"] = to_string(kind);
  j["data"] = data;
  return j.dump();
}

nlohmann::ordered_json Metrics::to_json() const
{
  auto opt = [](const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); };
  return {{"schema", kMetricsSchema},
          {"people_screened", people_screened},
          {"fevers_flagged", fevers_flagged},
          {"false_alarms", false_alarms},
          {"missed_fevers", missed_fevers},
          {"mean_time_to_scan", opt(mean_time_to_scan)},
          {"goal_completion_time", opt(goal_completion_time)},
          {"distance_traveled", distance_traveled},
          {"goals_reached", goals_reached},
          {"goals_total", goals_total},
          {"plan_failures", plan_failures},
          {"chats_completed", chats_completed},
          {"ticks_run", ticks_run}};
}

sim::World make_world(const Scenario& sc, std::uint64_t seed, kernels::Execution ex)
{
  sim::RobotState robot;
  robot.pose = sc.robot_start;
  auto w = sim::World::create(sc.bounds, sc.walled, sc.obstacles, sc.people, robot, sc.limits, sc.sensors, seed);
  w.execution = ex;
  return w;
}

GridGeometry map_geometry(const Scenario& sc)
{
  constexpr double margin = 1.0;
  GridGeometry g;
  g.resolution = sc.grid_resolution;
  g.origin_x = sc.bounds.x_min - margin;
  g.origin_y = sc.bounds.y_min - margin;
  g.width = static_cast<int>(std::ceil((sc.bounds.x_max - sc.bounds.x_min + 2 * margin) / g.resolution));
  g.height = static_cast<int>(std::ceil((sc.bounds.y_max - sc.bounds.y_min + 2 * margin) / g.resolution));
  return g;
}

nav::OccupancyGrid ground_truth_grid(const Scenario& sc)
{
  auto grid = nav::OccupancyGrid::create(map_geometry(sc));
  const auto& g = grid.geometry;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto c = g.cell_center(g.cell_at(i));
    bool occupied = sc.walled && !sc.bounds.contains(c.x, c.y);
    for (const auto& o : sc.obstacles)
      occupied = occupied || o.contains(c.x, c.y);
    grid.log_odds[i] = occupied ? nav::kLogOddsLimit : -nav::kLogOddsLimit;
    grid.observed[i] = 1;
  }
  return grid;
}

RunResult run(const Scenario& scenario, const RunOptions& options)
{
  return Runner(scenario, options).run();
}

void write_events(std::ostream& out, const std::vector<EventRecord>& events)
{
  for (const auto& e : events)
    out << e.to_line() << '\n';
}

void write_trace(std::ostream& out, const std::vector<TraceRow>& rows)
{
  out << "# " << kTraceSchema << "\n";
  out << "tick,t,x,y,theta,v,w,pan,tilt,person_present\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.3f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%d\n", r.tick, r.t, r.x, r.y, r.theta,
                  r.v, r.w, r.pan, r.tilt, r.person_present);
    out << buf;
  }
}

}  // namespace fevbot::harness
