// Metamorphic data classes: inputs (sequences of user actions) and the
// outputs they produce when executed against the system under test.

#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace smrlmt {

using Param = std::pair<std::string, std::string>;
using ParamList = std::vector<Param>;

/// Order-insensitive comparison of two parameter lists, treated as multisets
/// of (name, value) pairs.
bool sameParams(const ParamList& a, const ParamList& b);

/// Returns the list sorted by (name, value).
ParamList sortedParams(ParamList params);

std::string urlEncode(std::string_view s);
std::string urlDecode(std::string_view s);
std::string encodeParams(const ParamList& params);
ParamList decodeParams(std::string_view query);

struct Url {
  std::string scheme;  // lowercase, "http" or "https"
  std::string host;
  int port = 0;        // 0 when the URL carries no explicit port
  std::string path = "/";
  std::string query;   // without '?'

  /// Throws std::invalid_argument unless `text` is an absolute http(s) URL.
  static Url parse(std::string_view text);

  int effectivePort() const { return port != 0 ? port : (scheme == "https" ? 443 : 80); }
  std::string authority() const;
  std::string origin() const { return scheme + "://" + authority(); }
  std::string target() const { return query.empty() ? path : path + "?" + query; }
  std::string str() const { return origin() + target(); }

  /// Resolves `ref` (absolute, root-relative, or relative) against this URL.
  Url resolve(std::string_view ref) const;
};

enum class ActionKind { Request, FormSubmit };
enum class Channel { Http, Https };
enum class Provenance { Crawled, Script, FollowUp };

std::string_view toString(ActionKind k);
std::string_view toString(Channel c);
std::string_view toString(Provenance p);
ActionKind actionKindFromString(std::string_view s);
Channel channelFromString(std::string_view s);
Provenance provenanceFromString(std::string_view s);

struct User {
  std::string id;
  std::string username;
  std::string password;
  std::string role;

  bool operator==(const User&) const = default;
};

struct Session {
  std::string id;  // empty: anonymous, pre-login state
  std::optional<std::string> owner;

  bool anonymous() const { return id.empty(); }
  bool operator==(const Session&) const = default;
};

struct Action {
  ActionKind kind = ActionKind::Request;
  std::string method = "GET";
  std::string url;  // absolute, without query string
  Channel channel = Channel::Https;
  ParamList query_params;
  ParamList form_data;
  ParamList headers;
  std::optional<std::string> element_locator;
  Session session;
  std::optional<std::string> user;
  bool is_login = false;
  bool is_signup = false;

  /// Builds a request action from an absolute URL; the query string is split
  /// into `query_params` and the channel follows the scheme.
  static Action request(std::string_view method, std::string_view absolute_url);
  static Action formSubmit(std::string_view method, std::string_view absolute_url, ParamList form);

  /// Absolute URL including the query string.
  std::string fullUrl() const;

  /// Rewrites the URL scheme to match `c`; nothing else of the URL changes.
  void setChannel(Channel c);

  std::size_t parameterCount() const { return query_params.size() + form_data.size(); }
  /// 1-based over query parameters followed by form fields.
  Param& parameter(std::size_t pos);
  const Param& parameter(std::size_t pos) const;

  /// Checks the structural invariants; throws std::invalid_argument.
  void validate() const;

  bool operator==(const Action& o) const;
};

struct InputSequence {
  std::string id;
  std::vector<Action> actions;
  Provenance provenance = Provenance::Crawled;
  std::optional<std::string> parent;

  void validate() const;
  bool operator==(const InputSequence&) const = default;
};

struct Page {
  std::string body;
  int status = 200;
  std::string session_id;
  std::string content_type;
  std::string final_url;

  bool operator==(const Page&) const = default;
};

struct OutputSequence {
  std::string input;
  std::vector<Page> pages;

  bool operator==(const OutputSequence&) const = default;
};

/// (method, URL, sorted params) identifying one HTTP request.
struct RequestFingerprint {
  std::string method;
  std::string url;
  ParamList params;

  auto operator<=>(const RequestFingerprint&) const = default;
  bool operator==(const RequestFingerprint&) const = default;
};

RequestFingerprint fingerprintOf(const Action& a);

struct FailureRecord {
  std::string relation;
  std::vector<InputSequence> source_inputs;
  std::vector<InputSequence> follow_up_inputs;
  std::vector<OutputSequence> outputs;
  std::map<std::string, std::size_t> view_indices;
  std::set<RequestFingerprint> novel_requests;
};

/// Lowercase hex SHA-256 of `data`.
std::string contentHash(std::string_view data);

void to_json(nlohmann::json& j, const User& u);
void from_json(const nlohmann::json& j, User& u);
void to_json(nlohmann::json& j, const Session& s);
void from_json(const nlohmann::json& j, Session& s);
void to_json(nlohmann::json& j, const Action& a);
void from_json(const nlohmann::json& j, Action& a);
void to_json(nlohmann::json& j, const InputSequence& s);
void from_json(const nlohmann::json& j, InputSequence& s);
void to_json(nlohmann::json& j, const RequestFingerprint& f);
void from_json(const nlohmann::json& j, RequestFingerprint& f);

/// Page metadata for reports: the body is summarized by hash and length.
nlohmann::json pageSummary(const Page& p);
nlohmann::json outputSummary(const OutputSequence& o);
nlohmann::json failureToJson(const FailureRecord& f);

}  // namespace smrlmt
