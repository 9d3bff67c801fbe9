#include "smrlmt/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace smrlmt {

namespace {

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;
  int line = 1;

  bool eof() const { return pos >= text.size(); }
  char peek() const { return eof() ? '\0' : text[pos]; }
  char get() {
    char c = text[pos++];
    if (c == '\n') ++line;
    return c;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("line " + std::to_string(line) + ": " + msg);
  }
  // Skips blanks and comments; newlines too when `multiline`.
  void skip(bool multiline) {
    while (!eof()) {
      char c = peek();
      if (c == '#') {
        while (!eof() && peek() != '\n') get();
      } else if (c == ' ' || c == '\t' || c == '\r' || (multiline && c == '\n')) {
        get();
      } else {
        break;
      }
    }
  }
};

ConfigValue parseValue(Cursor& cur);

std::string parseBasicString(Cursor& cur) {
  cur.get();  // opening quote
  std::string out;
  while (true) {
    if (cur.eof() || cur.peek() == '\n') cur.fail("unterminated string");
    char c = cur.get();
    if (c == '"') break;
    if (c == '\\') {
      if (cur.eof()) cur.fail("unterminated escape");
      char e = cur.get();
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: cur.fail(std::string("unknown escape \\") + e);
      }
    } else {
      out += c;
    }
  }
  return out;
}

std::string parseLiteralString(Cursor& cur) {
  cur.get();
  std::string out;
  while (true) {
    if (cur.eof() || cur.peek() == '\n') cur.fail("unterminated string");
    char c = cur.get();
    if (c == '\'') break;
    out += c;
  }
  return out;
}

ConfigValue parseScalar(Cursor& cur) {
  std::string word;
  while (!cur.eof()) {
    char c = cur.peek();
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+' || c == '_') {
      word += cur.get();
    } else {
      break;
    }
  }
  if (word.empty()) cur.fail("expected a value");
  if (word == "true") return {true};
  if (word == "false") return {false};
  std::string clean;
  std::copy_if(word.begin(), word.end(), std::back_inserter(clean), [](char c) { return c != '_'; });
  try {
    std::size_t used = 0;
    if (clean.find_first_of(".eE") == std::string::npos) {
      auto v = std::stoll(clean, &used);
      if (used == clean.size()) return {static_cast<std::int64_t>(v)};
    } else {
      auto v = std::stod(clean, &used);
      if (used == clean.size()) return {v};
    }
  } catch (const std::exception&) {
  }
  cur.fail("invalid value '" + word + "'");
}

ConfigValue parseValue(Cursor& cur) {
  char c = cur.peek();
  if (c == '"') return {parseBasicString(cur)};
  if (c == '\'') return {parseLiteralString(cur)};
  if (c == '[') {
    cur.get();
    ConfigArray arr;
    while (true) {
      cur.skip(true);
      if (cur.eof()) cur.fail("unterminated array");
      if (cur.peek() == ']') {
        cur.get();
        break;
      }
      arr.push_back(parseValue(cur));
      cur.skip(true);
      if (cur.peek() == ',') {
        cur.get();
      } else if (cur.peek() != ']') {
        cur.fail("expected ',' or ']' in array");
      }
    }
    return {std::move(arr)};
  }
  return parseScalar(cur);
}

std::string asString(const std::string& key, const ConfigValue& v) {
  if (auto s = std::get_if<std::string>(&v.v)) return *s;
  throw ConfigError(key + ": expected a string");
}

std::int64_t asInt(const std::string& key, const ConfigValue& v) {
  if (auto i = std::get_if<std::int64_t>(&v.v)) return *i;
  throw ConfigError(key + ": expected an integer");
}

double asDouble(const std::string& key, const ConfigValue& v) {
  if (auto d = std::get_if<double>(&v.v)) return *d;
  if (auto i = std::get_if<std::int64_t>(&v.v)) return static_cast<double>(*i);
  throw ConfigError(key + ": expected a number");
}

bool asBool(const std::string& key, const ConfigValue& v) {
  if (auto b = std::get_if<bool>(&v.v)) return *b;
  throw ConfigError(key + ": expected a boolean");
}

std::vector<std::string> asStrings(const std::string& key, const ConfigValue& v) {
  auto arr = std::get_if<ConfigArray>(&v.v);
  if (!arr) throw ConfigError(key + ": expected an array of strings");
  std::vector<std::string> out;
  for (const auto& item : *arr) out.push_back(asString(key, item));
  return out;
}

std::chrono::milliseconds asDuration(const std::string& key, const ConfigValue& v) {
  if (auto s = std::get_if<std::string>(&v.v)) {
    try {
      return parseDuration(*s);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key + ": " + e.what());
    }
  }
  return std::chrono::milliseconds(static_cast<std::int64_t>(asDouble(key, v) * 1000));
}

std::pair<std::string, std::string> splitPair(const std::string& key, const std::string& s, char sep) {
  auto i = s.find(sep);
  if (i == std::string::npos || i == 0 || i + 1 == s.size())
    throw ConfigError(key + ": expected 'a" + std::string(1, sep) + "b', got '" + s + "'");
  return {s.substr(0, i), s.substr(i + 1)};
}

std::vector<std::string> readLines(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read " + file.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty() && line[0] != '#') out.push_back(line);
  }
  return out;
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string quoteList(const std::vector<std::string>& items) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += quote(items[i]);
  }
  return out + "]";
}

}  // namespace

std::map<std::string, ConfigValue> parseKeyValues(std::string_view text) {
  std::map<std::string, ConfigValue> out;
  Cursor cur{text};
  while (true) {
    cur.skip(true);
    if (cur.eof()) break;
    std::string key;
    while (!cur.eof()) {
      char c = cur.peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')
        key += cur.get();
      else
        break;
    }
    if (key.empty()) cur.fail(std::string("unexpected character '") + cur.peek() + "'");
    cur.skip(false);
    if (cur.peek() != '=') cur.fail("expected '=' after key " + key);
    cur.get();
    cur.skip(false);
    int line = cur.line;
    auto value = parseValue(cur);
    cur.skip(false);
    if (!cur.eof() && cur.peek() != '\n') cur.fail("trailing characters after value of " + key);
    if (!out.emplace(key, std::move(value)).second)
      throw ConfigError("line " + std::to_string(line) + ": duplicate key " + key);
  }
  return out;
}

const User* TargetConfig::findUser(std::string_view id) const {
  for (const auto& u : users)
    if (u.id == id) return &u;
  return nullptr;
}

TargetConfig parseTargetConfig(std::string_view text, const std::filesystem::path& base_dir) {
  auto kv = parseKeyValues(text);
  TargetConfig cfg;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
  };
  for (const auto& [key, value] : kv) {
    if (key == "base_url") {
      cfg.base_url = asString(key, value);
      try {
        Url::parse(cfg.base_url);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("base_url: ") + e.what());
      }
    } else if (key == "insecure_port") {
      cfg.insecure_port = static_cast<int>(asInt(key, value));
    } else if (key == "secure_port") {
      cfg.secure_port = static_cast<int>(asInt(key, value));
    } else if (key == "secure_transport") {
      auto t = asString(key, value);
      if (t != "tls" && t != "plain") throw ConfigError("secure_transport: expected \"tls\" or \"plain\"");
      cfg.tls = t == "tls";
    } else if (key == "session_cookie") {
      cfg.session_cookie = asString(key, value);
    } else if (key == "credentials") {
      for (const auto& entry : asStrings(key, value)) {
        // username:password[:role]
        auto first = entry.find(':');
        if (first == std::string::npos || first == 0)
          throw ConfigError("credentials: expected 'username:password[:role]', got '" + entry + "'");
        auto second = entry.find(':', first + 1);
        User u;
        u.username = entry.substr(0, first);
        u.password = entry.substr(first + 1, second == std::string::npos ? std::string::npos : second - first - 1);
        if (second != std::string::npos) u.role = entry.substr(second + 1);
        u.id = u.username;
        if (cfg.findUser(u.id)) throw ConfigError("credentials: duplicate user " + u.id);
        cfg.users.push_back(std::move(u));
      }
    } else if (key == "supervisors") {
      for (const auto& entry : asStrings(key, value)) cfg.supervisors.push_back(splitPair(key, entry, '>'));
    } else if (key == "error_patterns") {
      cfg.error_patterns = asStrings(key, value);
    } else if (key == "login_pattern") {
      cfg.login_pattern = asString(key, value);
    } else if (key == "signup_pattern") {
      cfg.signup_pattern = asString(key, value);
    } else if (key == "file_paths") {
      auto more = asStrings(key, value);
      cfg.file_paths.insert(cfg.file_paths.end(), more.begin(), more.end());
    } else if (key == "file_path_list") {
      auto more = readLines(resolve(asString(key, value)));
      cfg.file_paths.insert(cfg.file_paths.end(), more.begin(), more.end());
    } else if (key == "docroot") {
      cfg.docroot = resolve(asString(key, value));
    } else if (key == "path_aliases") {
      for (const auto& entry : asStrings(key, value)) cfg.path_aliases.push_back(splitPair(key, entry, '='));
    } else if (key == "form_defaults") {
      for (const auto& entry : asStrings(key, value)) {
        auto [type, v] = splitPair(key, entry, '=');
        cfg.form_defaults[type] = v;
      }
    } else if (key == "scripts") {
      for (const auto& s : asStrings(key, value)) cfg.scripts.push_back(resolve(s));
    } else if (key == "page_eq_threshold") {
      cfg.page_eq_threshold = asDouble(key, value);
    } else if (key == "state_threshold") {
      cfg.state_threshold = asDouble(key, value);
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(asInt(key, value));
    } else if (key == "connect_timeout") {
      cfg.connect_timeout = asDuration(key, value);
    } else if (key == "read_timeout") {
      cfg.read_timeout = asDuration(key, value);
    } else if (key == "crawl_budget") {
      cfg.crawl_budget = asDuration(key, value);
    } else if (key == "max_redirects") {
      cfg.max_redirects = static_cast<std::size_t>(asInt(key, value));
    } else if (key == "stateless") {
      cfg.stateless = asBool(key, value);
    } else if (key == "workers") {
      auto w = asInt(key, value);
      if (w < 1) throw ConfigError("workers: must be at least 1");
      cfg.workers = static_cast<std::size_t>(w);
    } else {
      throw ConfigError("unknown key " + key);
    }
  }
  if (cfg.base_url.empty()) throw ConfigError("base_url is required");
  for (double t : {cfg.page_eq_threshold, cfg.state_threshold})
    if (t < 0.0 || t > 1.0) throw ConfigError("thresholds must lie in [0, 1]");
  for (const auto& [a, b] : cfg.supervisors)
    if (!cfg.findUser(a) || !cfg.findUser(b))
      throw ConfigError("supervisors: unknown user in pair " + a + ">" + b);
  return cfg;
}

TargetConfig loadTargetConfig(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read target config " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parseTargetConfig(ss.str(), file.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
}

namespace {

// Shortest text that parses back to the same double; always has a '.' or exponent.
std::string shortestDouble(double d) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, d);
  std::string t(buf, res.ptr);
  if (t.find_first_of(".eEn") == std::string::npos) t += ".0";
  return t;
}

}  // namespace

std::string renderTargetConfig(const TargetConfig& cfg) {
  std::ostringstream out;
  out << "base_url = " << quote(cfg.base_url) << "\n";
  out << "insecure_port = " << cfg.insecure_port << "\n";
  out << "secure_port = " << cfg.secure_port << "\n";
  out << "secure_transport = " << quote(cfg.tls ? "tls" : "plain") << "\n";
  out << "session_cookie = " << quote(cfg.session_cookie) << "\n";
  std::vector<std::string> creds, sup, aliases, defaults, scripts;
  for (const auto& u : cfg.users) creds.push_back(u.username + ":" + u.password + (u.role.empty() ? "" : ":" + u.role));
  for (const auto& [a, b] : cfg.supervisors) sup.push_back(a + ">" + b);
  for (const auto& [a, b] : cfg.path_aliases) aliases.push_back(a + "=" + b);
  for (const auto& [a, b] : cfg.form_defaults) defaults.push_back(a + "=" + b);
  for (const auto& s : cfg.scripts) scripts.push_back(s.string());
  out << "credentials = " << quoteList(creds) << "\n";
  out << "supervisors = " << quoteList(sup) << "\n";
  out << "error_patterns = " << quoteList(cfg.error_patterns) << "\n";
  out << "login_pattern = " << quote(cfg.login_pattern) << "\n";
  out << "signup_pattern = " << quote(cfg.signup_pattern) << "\n";
  out << "file_paths = " << quoteList(filePathCorpus(cfg)) << "\n";
  out << "path_aliases = " << quoteList(aliases) << "\n";
  out << "form_defaults = " << quoteList(defaults) << "\n";
  out << "scripts = " << quoteList(scripts) << "\n";
  out << "page_eq_threshold = " << shortestDouble(cfg.page_eq_threshold) << "\n";
  out << "state_threshold = " << shortestDouble(cfg.state_threshold) << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "connect_timeout = " << quote(std::to_string(cfg.connect_timeout.count()) + "ms") << "\n";
  out << "read_timeout = " << quote(std::to_string(cfg.read_timeout.count()) + "ms") << "\n";
  out << "crawl_budget = " << quote(std::to_string(cfg.crawl_budget.count()) + "ms") << "\n";
  out << "max_redirects = " << cfg.max_redirects << "\n";
  out << "stateless = " << (cfg.stateless ? "true" : "false") << "\n";
  out << "workers = " << cfg.workers << "\n";
  return out.str();
}

std::vector<std::string> filePathCorpus(const TargetConfig& cfg) {
  static const std::set<std::string> images = {"png", "jpg", "jpeg", "gif", "svg", "ico"};
  auto isImage = [](const std::string& p) {
    auto dot = p.rfind('.');
    if (dot == std::string::npos) return false;
    std::string ext = p.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return images.count(ext) > 0;
  };
  auto alias = [&](std::string p) {
    for (const auto& [from, to] : cfg.path_aliases) {
      if (p == from || p.starts_with(from + "/")) {
        p = to + p.substr(from.size());
        break;
      }
    }
    return p;
  };
  std::vector<std::string> out;
  std::set<std::string> seen;
  auto add = [&](const std::string& p) {
    if (p.empty() || isImage(p)) return;
    auto a = alias(p);
    if (seen.insert(a).second) out.push_back(a);
  };
  for (const auto& p : cfg.file_paths) add(p);
  if (cfg.docroot) {
    std::error_code ec;
    std::vector<std::string> scanned;
    for (auto it = std::filesystem::recursive_directory_iterator(*cfg.docroot, ec);
         !ec && it != std::filesystem::recursive_directory_iterator(); it.increment(ec)) {
      if (it->is_regular_file() && !it->is_symlink())
        scanned.push_back(std::filesystem::relative(it->path(), *cfg.docroot).generic_string());
    }
    std::sort(scanned.begin(), scanned.end());
    for (const auto& p : scanned) add(p);
  }
  return out;
}

std::chrono::milliseconds parseDuration(std::string_view text) {
  std::string s(text);
  std::size_t used = 0;
  double value = 0;
  try {
    value = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("invalid duration '" + s + "'");
  }
  if (value < 0) throw std::invalid_argument("negative duration '" + s + "'");
  auto unit = s.substr(used);
  double ms = 0;
  if (unit.empty() || unit == "s") ms = value * 1000;
  else if (unit == "ms") ms = value;
  else if (unit == "m" || unit == "min") ms = value * 60'000;
  else if (unit == "h") ms = value * 3'600'000;
  else throw std::invalid_argument("unknown duration unit in '" + s + "'");
  return std::chrono::milliseconds(static_cast<std::int64_t>(ms));
}

}  // namespace smrlmt
