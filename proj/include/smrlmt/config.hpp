// Target configuration: where the system under test lives, who may log in,
// and the tunables used by collection and testing.
//
// The file is a flat TOML-style list of `key = value` lines. Values are
// quoted strings ("basic" with escapes or 'literal'), integers, floats,
// booleans, or arrays of those. `#` starts a comment.

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "smrlmt/model.hpp"

namespace smrlmt {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConfigValue;
using ConfigArray = std::vector<ConfigValue>;
struct ConfigValue {
  std::variant<std::string, std::int64_t, double, bool, ConfigArray> v;
};

/// Parses the key/value document. Throws ConfigError with a line number.
std::map<std::string, ConfigValue> parseKeyValues(std::string_view text);

inline const std::vector<std::string> kDefaultErrorPatterns = {
    "(?i)error", "(?i)forbidden", "(?i)not\\s+found", "(?i)exception"};

struct TargetConfig {
  std::string base_url;
  int insecure_port = 0;  // port used for the HTTP channel; 0 keeps the URL's
  int secure_port = 0;    // port used for the HTTPS channel; 0 keeps the URL's
  bool tls = true;        // false: the secure port speaks plain HTTP
  std::string session_cookie;  // empty: any cookie whose name looks like a session id
  std::vector<User> users;
  std::vector<std::pair<std::string, std::string>> supervisors;  // (supervisor, supervised)
  std::vector<std::string> error_patterns = kDefaultErrorPatterns;
  std::string login_pattern = "login|signin|session";
  std::string signup_pattern = "signup|register";
  std::vector<std::string> file_paths;
  std::optional<std::filesystem::path> docroot;
  std::vector<std::pair<std::string, std::string>> path_aliases;  // (from, to)
  std::map<std::string, std::string> form_defaults = {
      {"text", "test"}, {"email", "test@example.com"}, {"number", "1"}, {"password", "test"}};
  std::vector<std::filesystem::path> scripts;
  double page_eq_threshold = 0.05;
  double state_threshold = 0.05;
  std::uint64_t seed = 42;
  std::chrono::milliseconds connect_timeout{10'000};
  std::chrono::milliseconds read_timeout{30'000};
  std::chrono::milliseconds crawl_budget{60'000};
  std::size_t max_redirects = 10;
  bool stateless = false;
  std::size_t workers = 1;

  const User* findUser(std::string_view id) const;
};

/// `base_dir` resolves relative paths (file-path corpus, scripts, docroot).
TargetConfig parseTargetConfig(std::string_view text, const std::filesystem::path& base_dir = {});
TargetConfig loadTargetConfig(const std::filesystem::path& file);

/// Renders a config that parses back to an equal value. File-path corpora
/// are inlined so the output is self-contained.
std::string renderTargetConfig(const TargetConfig& cfg);

/// Paths for RandomFilePath(): the configured list, plus a scan of the
/// document root when one is configured. Images are skipped and alias
/// pairs rewrite path prefixes.
std::vector<std::string> filePathCorpus(const TargetConfig& cfg);

/// Parses "90s", "10m", "24h", "500ms" or a bare number of seconds. Throws
/// std::invalid_argument.
std::chrono::milliseconds parseDuration(std::string_view text);

}  // namespace smrlmt
