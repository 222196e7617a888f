#ifndef FEVBOT_CONFIG_HPP
#define FEVBOT_CONFIG_HPP

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

namespace fevbot {

/// Malformed or invalid configuration. The message names the file and,
/// for syntax errors, the line and column; for validation errors, the
/// offending field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses UTF-8 JSON text; `source` labels diagnostics.
nlohmann::json parse_config_text(std::string_view text, std::string_view source);

nlohmann::json read_config_file(const std::filesystem::path& path);

/// Checks the top-level "schema" field against the expected tag.
void require_schema(const nlohmann::json& doc, std::string_view expected, std::string_view source);

}  // namespace fevbot

#endif  // FEVBOT_CONFIG_HPP
