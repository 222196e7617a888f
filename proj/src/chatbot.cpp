#include "fevbot/chatbot.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <set>

#include "fevbot/config.hpp"

namespace fevbot::chat {

namespace {

constexpr std::array<std::pair<DialogState, std::string_view>, 5> kStateNames{{
    {DialogState::greeting, "greeting"},
    {DialogState::ask_vaccination, "ask_vaccination"},
    {DialogState::ask_symptoms, "ask_symptoms"},
    {DialogState::advise, "advise"},
    {DialogState::done, "done"},
}};

DialogState state_field(const nlohmann::json& j, const std::string& field, const std::string& where)
{
  if (!j.contains(field) || !j[field].is_string())
    throw ConfigError(where + "." + field + ": expected a dialog state name");
  const auto s = parse_state(j[field].get<std::string>());
  if (!s)
    throw ConfigError(where + "." + field + ": unknown dialog state \"" + j[field].get<std::string>() + "\"");
  return *s;
}

std::string string_field(const nlohmann::json& j, const std::string& field, const std::string& where)
{
  if (!j.contains(field) || !j[field].is_string())
    throw ConfigError(where + "." + field + ": expected a string");
  return j[field].get<std::string>();
}

void check_keys(const nlohmann::json& j, std::initializer_list<std::string_view> allowed, const std::string& where)
{
  for (const auto& [key, _] : j.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError(where + ": unknown field '" + key + "'");
}

bool has_cycle(const std::multimap<DialogState, DialogState>& edges)
{
  enum Mark { unseen, open, closed };
  std::map<DialogState, Mark> mark;
  auto visit = [&](auto&& self, DialogState s) -> bool {
    mark[s] = open;
    auto [lo, hi] = edges.equal_range(s);
    for (auto it = lo; it != hi; ++it) {
      if (mark[it->second] == open)
        return true;
      if (mark[it->second] == unseen && self(self, it->second))
        return true;
    }
    mark[s] = closed;
    return false;
  };
  for (const auto& [s, _] : kStateNames)
    if (mark[s] == unseen && visit(visit, s))
      return true;
  return false;
}

std::string format_reading(double reading)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", reading);
  return buf;
}

}  // namespace

std::string_view to_string(DialogState s)
{
  for (const auto& [state, name] : kStateNames)
    if (state == s)
      return name;
  return "?";
}

std::optional<DialogState> parse_state(std::string_view name)
{
  for (const auto& [state, n] : kStateNames)
    if (n == name)
      return state;
  return std::nullopt;
}

IntentSet IntentSet::from_json(const nlohmann::json& doc, std::string_view source)
{
  require_schema(doc, kIntentSchema, source);
  const std::string src(source);
  check_keys(doc, {"schema", "match_threshold", "opening", "prompts", "intents"}, src);

  IntentSet set;
  if (doc.contains("match_threshold")) {
    if (!doc["match_threshold"].is_number())
      throw ConfigError(src + ": match_threshold: expected a number");
    set.match_threshold = doc["match_threshold"].get<double>();
    if (!(set.match_threshold > 0.0 && set.match_threshold <= 1.0))
      throw ConfigError(src + ": match_threshold: must lie in (0, 1]");
  }
  set.opening = string_field(doc, "opening", src);

  if (!doc.contains("prompts") || !doc["prompts"].is_object())
    throw ConfigError(src + ": prompts: expected an object keyed by dialog state");
  for (const auto& [key, value] : doc["prompts"].items()) {
    const auto s = parse_state(key);
    if (!s || *s == DialogState::done)
      throw ConfigError(src + ": prompts." + key + ": not an open dialog state");
    if (!value.is_string())
      throw ConfigError(src + ": prompts." + key + ": expected a string");
    set.prompts[*s] = value.get<std::string>();
  }

  if (!doc.contains("intents") || !doc["intents"].is_array() || doc["intents"].empty())
    throw ConfigError(src + ": intents: expected a non-empty array");
  std::set<std::string> names;
  std::multimap<DialogState, DialogState> edges;
  for (std::size_t i = 0; i < doc["intents"].size(); ++i) {
    const auto& j = doc["intents"][i];
    const std::string where = src + ": intents[" + std::to_string(i) + "]";
    if (!j.is_object())
      throw ConfigError(where + ": expected an object");
    check_keys(j, {"name", "state", "phrases", "response", "next_state"}, where);
    Intent intent;
    intent.name = string_field(j, "name", where);
    if (!names.insert(intent.name).second)
      throw ConfigError(where + ".name: duplicate intent name \"" + intent.name + "\"");
    intent.state = state_field(j, "state", where);
    if (intent.state == DialogState::done)
      throw ConfigError(where + ".state: intents cannot belong to the done state");
    intent.next_state = state_field(j, "next_state", where);
    intent.response = string_field(j, "response", where);
    if (!j.contains("phrases") || !j["phrases"].is_array())
      throw ConfigError(where + ".phrases: expected an array of strings");
    for (const auto& p : j["phrases"]) {
      if (!p.is_string() || tokenize(p.get<std::string>()).empty())
        throw ConfigError(where + ".phrases: every phrase must be a non-empty string");
      intent.sample_phrases.push_back(p.get<std::string>());
    }
    if (intent.sample_phrases.size() < 10 || intent.sample_phrases.size() > 15)
      throw ConfigError(where + ".phrases: " + std::to_string(intent.sample_phrases.size()) +
                        " sample phrases, expected 10 to 15");
    edges.emplace(intent.state, intent.next_state);
    set.intents.push_back(std::move(intent));
  }

  if (has_cycle(edges))
    throw ConfigError(src + ": intents: dialog flow contains a cycle");

  // Every state reachable from greeting needs a prompt and a way out.
  std::set<DialogState> seen{DialogState::greeting};
  std::vector<DialogState> todo{DialogState::greeting};
  while (!todo.empty()) {
    const auto s = todo.back();
    todo.pop_back();
    if (s == DialogState::done)
      continue;
    if (!edges.contains(s))
      throw ConfigError(src + ": intents: no intent leaves state " + std::string(to_string(s)));
    if (!set.prompts.contains(s))
      throw ConfigError(src + ": prompts." + std::string(to_string(s)) + ": missing");
    auto [lo, hi] = edges.equal_range(s);
    for (auto it = lo; it != hi; ++it)
      if (seen.insert(it->second).second)
        todo.push_back(it->second);
  }
  return set;
}

IntentSet IntentSet::load(const std::filesystem::path& path)
{
  return from_json(read_config_file(path), path.string());
}

std::vector<Intent> IntentSet::active(DialogState state) const
{
  std::vector<Intent> out;
  std::copy_if(intents.begin(), intents.end(), std::back_inserter(out),
               [&](const Intent& i) { return i.state == state; });
  return out;
}

std::vector<std::string> tokenize(std::string_view text)
{
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty())
      tokens.push_back(std::move(cur));
    cur.clear();
  };
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c))
      flush();
    else if (!std::ispunct(c))
      cur.push_back(static_cast<char>(std::tolower(c)));
  }
  flush();
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  return tokens;
}

Match match_intent(std::string_view utterance, std::span<const Intent> intents, double threshold)
{
  const auto words = tokenize(utterance);
  Match best;
  if (words.empty())
    return best;
  double top = -1.0;
  std::optional<std::size_t> top_index;
  for (std::size_t i = 0; i < intents.size(); ++i) {
    double score = 0.0;
    for (const auto& phrase : intents[i].sample_phrases) {
      const auto p = tokenize(phrase);
      if (p.empty())
        continue;
      std::size_t common = 0;
      for (const auto& t : p)
        common += std::binary_search(words.begin(), words.end(), t) ? 1 : 0;
      score = std::max(score, static_cast<double>(common) / static_cast<double>(p.size()));
    }
    if (score > top) {
      top = score;
      top_index = i;
    }
  }
  best.score = std::max(top, 0.0);
  if (top_index && top >= threshold)
    best.index = top_index;
  return best;
}

Session start_session(int person_id, double reading, const IntentSet& config, double threshold)
{
  if (!(reading > threshold))
    throw SessionError("reading " + format_reading(reading) + " does not exceed the fever threshold " +
                       format_reading(threshold));
  std::string opening = config.opening;
  if (const auto at = opening.find("{reading}"); at != std::string::npos)
    opening.replace(at, 9, format_reading(reading));
  if (const auto p = config.prompts.find(DialogState::greeting); p != config.prompts.end())
    opening += " " + p->second;

  Session s;
  s.person_id = person_id;
  s.state = DialogState::greeting;
  s.transcript.push_back({Speaker::robot, std::move(opening)});
  return s;
}

Reply respond(Session session, std::string_view utterance, const IntentSet& config)
{
  if (session.done())
    throw SessionError("session for person " + std::to_string(session.person_id) + " is already done");

  session.transcript.push_back({Speaker::person, std::string(utterance)});
  const auto candidates = config.active(session.state);
  const auto m = match_intent(utterance, candidates, config.match_threshold);

  Reply r;
  if (!m.index) {
    r.reply = std::string(kFallbackReply);
    session.transcript.push_back({Speaker::robot, r.reply});
    if (const auto p = config.prompts.find(session.state); p != config.prompts.end()) {
      r.reprompt = p->second;
      session.transcript.push_back({Speaker::robot, p->second});
    }
  } else {
    const auto& intent = candidates[*m.index];
    r.reply = intent.response;
    r.intent = intent.name;
    session.transcript.push_back({Speaker::robot, r.reply});
    session.state = intent.next_state;
  }
  r.session = std::move(session);
  return r;
}

ChatEngine::ChatEngine(IntentSet config, double fever_threshold)
    : config_(std::move(config)), threshold_(fever_threshold)
{
}

const Session& ChatEngine::start(int person_id, double reading)
{
  if (sessions_.contains(person_id))
    throw SessionError("person " + std::to_string(person_id) + " already has an open session");
  auto s = start_session(person_id, reading, config_, threshold_);
  return sessions_.emplace(person_id, std::move(s)).first->second;
}

Reply ChatEngine::respond(int person_id, std::string_view utterance)
{
  const auto it = sessions_.find(person_id);
  if (it == sessions_.end())
    throw SessionError("person " + std::to_string(person_id) + " has no open session");
  auto r = chat::respond(it->second, utterance, config_);
  if (r.session.done()) {
    finished_.push_back(r.session);
    sessions_.erase(it);
  } else {
    it->second = r.session;
  }
  return r;
}

std::optional<Session> ChatEngine::abandon(int person_id)
{
  const auto it = sessions_.find(person_id);
  if (it == sessions_.end())
    return std::nullopt;
  Session s = std::move(it->second);
  sessions_.erase(it);
  return s;
}

}  // namespace fevbot::chat
