#include "fevbot/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace fevbot {

nlohmann::json parse_config_text(std::string_view text, std::string_view source)
{
  try {
    return nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::ostringstream msg;
    msg << source << ":" << line << ":" << column << ": parse error: " << e.what();
    throw ConfigError(msg.str());
  }
}

nlohmann::json read_config_file(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError(path.string() + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

void require_schema(const nlohmann::json& doc, std::string_view expected, std::string_view source)
{
  if (!doc.is_object())
    throw ConfigError(std::string(source) + ": top level must be an object");
  const auto it = doc.find("schema");
  if (it == doc.end() || !it->is_string())
    throw ConfigError(std::string(source) + ": field 'schema' missing (expected \"" + std::string(expected) + "\")");
  if (it->get<std::string>() != expected)
    throw ConfigError(std::string(source) + ": field 'schema' is \"" + it->get<std::string>() + "\", expected \"" +
                      std::string(expected) + "\"");
}

}  // namespace fevbot
