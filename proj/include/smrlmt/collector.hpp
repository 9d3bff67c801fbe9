// Data collection: crawl the target once per user, derive source inputs
// from the state graphs, ingest manual scripts, and assemble the pool.

#pragma once

#include <chrono>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "smrlmt/config.hpp"
#include "smrlmt/executor.hpp"
#include "smrlmt/html.hpp"
#include "smrlmt/pool.hpp"

namespace smrlmt {

class CrawlError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ScriptParseError : public std::runtime_error {
 public:
  ScriptParseError(int line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line(line) {}
  int line;
};

/// Login/signup classification of a form: a password field and a text-like
/// field, submitted to a URL or from a form whose name/id matches the
/// pattern. Signup wins when both patterns match.
bool looksLikeLogin(const HtmlForm& form, const std::string& action_url, const TargetConfig& cfg);
bool looksLikeSignup(const HtmlForm& form, const std::string& action_url, const TargetConfig& cfg);

/// Builds the action that submits `form` as `user` (null: anonymous
/// defaults). Relative form actions resolve against `page_url`.
Action formAction(const HtmlForm& form, const Url& page_url, const User* user, const TargetConfig& cfg);

/// Explores anchors and forms reachable by `user` from the base URL. Each
/// candidate action is replayed from a fresh session along the recorded path
/// to its source state, so the executor's session never leaks between
/// branches. Throws CrawlError when the base URL is unreachable.
StateGraph crawl(const TargetConfig& cfg, const User& user, Executor& exec, std::chrono::milliseconds budget);

/// Depth-first root-to-leaf paths. Child order follows edge insertion. An
/// edge that returns to a state already on the path is taken and ends the
/// path. Ids are `<prefix>-<n>`, starting at 1.
std::vector<InputSequence> deriveInputs(const StateGraph& graph, const std::string& id_prefix,
                                        std::size_t max_sequences = 10000);

/// Parses a native script. Statements are separated by newlines or ';':
///   visit <path>              GET request
///   click <path>              GET request triggered by a link
///   fill <name>=<value> ...   stages form fields
///   submit [path]             POSTs staged fields (default: last visited URL)
///   header <name>: <value>    header sent with the following actions
///   # comment
InputSequence ingestScript(std::string_view text, const TargetConfig& cfg, const std::string& id);
InputSequence ingestScriptFile(const std::filesystem::path& file, const TargetConfig& cfg, const std::string& id);

/// Crawl per user, derive inputs, run each input once to record its
/// outputs, then ingest and run the configured scripts.
DataPool collect(const TargetConfig& cfg, const ExecutorFactory& make_executor);

}  // namespace smrlmt
