#ifndef FEVBOT_CHATBOT_HPP
#define FEVBOT_CHATBOT_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace fevbot::chat {

inline constexpr std::string_view kFallbackReply = "I'm sorry I didn't understand what you said";

inline constexpr std::string_view kIntentSchema = "fevbot.intents/1";

enum class DialogState { greeting, ask_vaccination, ask_symptoms, advise, done };

std::string_view to_string(DialogState s);
std::optional<DialogState> parse_state(std::string_view name);

struct Intent {
  std::string name;
  DialogState state = DialogState::greeting;  // state in which the intent is recognised
  std::vector<std::string> sample_phrases;
  std::string response;
  DialogState next_state = DialogState::done;
};

/// A validated intent configuration: 10 to 15 sample phrases per intent,
/// unique names, a prompt for every open state and an acyclic flow from
/// greeting to done.
struct IntentSet {
  std::vector<Intent> intents;
  std::map<DialogState, std::string> prompts;
  std::string opening;  // "{reading}" is replaced with the measured temperature
  double match_threshold = 0.5;

  static IntentSet from_json(const nlohmann::json& doc, std::string_view source = "<intents>");
  static IntentSet load(const std::filesystem::path& path);

  /// Intents recognised in `state`, in definition order.
  std::vector<Intent> active(DialogState state) const;
};

/// Lower-cased, punctuation-stripped, whitespace-split unique tokens.
std::vector<std::string> tokenize(std::string_view text);

struct Match {
  std::optional<std::size_t> index;  // nullopt means FALLBACK
  double score = 0.0;
};

/// Token-overlap classifier. An intent scores the best, over its sample
/// phrases, of |utterance tokens in phrase| / |phrase tokens|. The top score
/// wins when >= threshold; ties go to the earlier intent.
Match match_intent(std::string_view utterance, std::span<const Intent> intents, double threshold = 0.5);

enum class Speaker { robot, person };

struct Turn {
  Speaker speaker = Speaker::robot;
  std::string text;

  bool operator==(const Turn&) const = default;
};

struct Session {
  int person_id = 0;
  DialogState state = DialogState::greeting;
  std::vector<Turn> transcript;

  bool done() const { return state == DialogState::done; }
};

struct Reply {
  Session session;
  std::string reply;
  std::optional<std::string> reprompt;  // set on fallback
  std::optional<std::string> intent;    // matched intent name
};

class SessionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Opens a session for a fever reading strictly above `threshold`. The
/// transcript starts with the robot's opening line.
Session start_session(int person_id, double reading, const IntentSet& config, double threshold = 38.0);

/// Advances the dialog by one user utterance. Unrecognised input returns the
/// fallback reply and leaves the dialog state where it was.
Reply respond(Session session, std::string_view utterance, const IntentSet& config);

/// Holds at most one open session per person.
class ChatEngine {
 public:
  explicit ChatEngine(IntentSet config, double fever_threshold = 38.0);

  const Session& start(int person_id, double reading);
  Reply respond(int person_id, std::string_view utterance);

  bool active(int person_id) const { return sessions_.contains(person_id); }
  std::size_t active_count() const { return sessions_.size(); }
  const std::vector<Session>& finished() const { return finished_; }
  const IntentSet& config() const { return config_; }

  /// Closes an unfinished session (for example when its script runs out).
  std::optional<Session> abandon(int person_id);

 private:
  IntentSet config_;
  double threshold_;
  std::map<int, Session> sessions_;
  std::vector<Session> finished_;
};

}  // namespace fevbot::chat

#endif  // FEVBOT_CHATBOT_HPP
