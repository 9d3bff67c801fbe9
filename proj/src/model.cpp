#include "smrlmt/model.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include <openssl/evp.h>

namespace smrlmt {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Collapses "." and ".." segments of an absolute path.
std::string normalizePath(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i <= path.size()) {
    std::size_t j = path.find('/', i);
    if (j == std::string_view::npos) j = path.size();
    std::string seg(path.substr(i, j - i));
    if (seg == "..") {
      if (!parts.empty()) parts.pop_back();
    } else if (!seg.empty() && seg != ".") {
      parts.push_back(seg);
    }
    i = j + 1;
  }
  std::string out;
  for (const auto& p : parts) out += "/" + p;
  if (out.empty() || (!path.empty() && path.back() == '/')) out += "/";
  if (out.size() > 1 && out.substr(out.size() - 2) == "//") out.pop_back();
  return out;
}

}  // namespace

bool sameParams(const ParamList& a, const ParamList& b) {
  if (a.size() != b.size()) return false;
  return sortedParams(a) == sortedParams(b);
}

ParamList sortedParams(ParamList params) {
  std::sort(params.begin(), params.end());
  return params;
}

std::string urlEncode(std::string_view s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~' || c == '/') {
      out += static_cast<char>(c);
    } else if (c == ' ') {
      out += '+';
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

std::string urlDecode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '+') {
      out += ' ';
    } else if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
               std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out += static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

std::string encodeParams(const ParamList& params) {
  std::string out;
  for (const auto& [k, v] : params) {
    if (!out.empty()) out += '&';
    out += urlEncode(k) + "=" + urlEncode(v);
  }
  return out;
}

ParamList decodeParams(std::string_view query) {
  ParamList out;
  std::size_t i = 0;
  while (i < query.size()) {
    std::size_t j = query.find('&', i);
    if (j == std::string_view::npos) j = query.size();
    auto part = query.substr(i, j - i);
    if (!part.empty()) {
      auto eq = part.find('=');
      if (eq == std::string_view::npos)
        out.emplace_back(urlDecode(part), "");
      else
        out.emplace_back(urlDecode(part.substr(0, eq)), urlDecode(part.substr(eq + 1)));
    }
    i = j + 1;
  }
  return out;
}

Url Url::parse(std::string_view text) {
  auto sep = text.find("://");
  if (sep == std::string_view::npos) throw std::invalid_argument("not an absolute URL: " + std::string(text));
  Url u;
  u.scheme = lower(text.substr(0, sep));
  if (u.scheme != "http" && u.scheme != "https")
    throw std::invalid_argument("unsupported URL scheme: " + std::string(text));
  auto rest = text.substr(sep + 3);
  if (auto hash = rest.find('#'); hash != std::string_view::npos) rest = rest.substr(0, hash);
  auto slash = rest.find_first_of("/?");
  auto auth = rest.substr(0, slash);
  if (auth.empty()) throw std::invalid_argument("URL has no host: " + std::string(text));
  auto colon = auth.rfind(':');
  if (colon != std::string_view::npos && auth.find(']') == std::string_view::npos) {
    u.host = lower(auth.substr(0, colon));
    auto port = auth.substr(colon + 1);
    if (port.empty() || !std::all_of(port.begin(), port.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      throw std::invalid_argument("bad port in URL: " + std::string(text));
    u.port = std::stoi(std::string(port));
  } else {
    u.host = lower(auth);
  }
  if (slash != std::string_view::npos) {
    auto pq = rest.substr(slash);
    auto q = pq.find('?');
    u.path = std::string(pq.substr(0, q));
    if (u.path.empty()) u.path = "/";
    if (q != std::string_view::npos) u.query = std::string(pq.substr(q + 1));
  }
  return u;
}

std::string Url::authority() const {
  if (port == 0) return host;
  return host + ":" + std::to_string(port);
}

Url Url::resolve(std::string_view ref) const {
  if (ref.find("://") != std::string_view::npos) return parse(ref);
  Url out = *this;
  if (auto hash = ref.find('#'); hash != std::string_view::npos) ref = ref.substr(0, hash);
  if (ref.empty()) return out;
  if (ref.starts_with("//")) return parse(scheme + ":" + std::string(ref));
  std::string_view path = ref;
  std::string query;
  if (auto q = ref.find('?'); q != std::string_view::npos) {
    path = ref.substr(0, q);
    query = std::string(ref.substr(q + 1));
  }
  if (path.empty()) {
    out.query = query;
    return out;
  }
  if (path.front() == '/') {
    out.path = normalizePath(path);
  } else {
    auto dir = this->path.substr(0, this->path.rfind('/') + 1);
    out.path = normalizePath(dir + std::string(path));
  }
  out.query = query;
  return out;
}

std::string_view toString(ActionKind k) { return k == ActionKind::Request ? "REQUEST" : "FORM_SUBMIT"; }
std::string_view toString(Channel c) { return c == Channel::Http ? "HTTP" : "HTTPS"; }
std::string_view toString(Provenance p) {
  switch (p) {
    case Provenance::Crawled: return "CRAWLED";
    case Provenance::Script: return "SCRIPT";
    case Provenance::FollowUp: return "FOLLOW_UP";
  }
  return "CRAWLED";
}

ActionKind actionKindFromString(std::string_view s) {
  if (s == "REQUEST") return ActionKind::Request;
  if (s == "FORM_SUBMIT") return ActionKind::FormSubmit;
  throw std::invalid_argument("unknown action kind: " + std::string(s));
}

Channel channelFromString(std::string_view s) {
  auto l = lower(s);
  if (l == "http") return Channel::Http;
  if (l == "https") return Channel::Https;
  throw std::invalid_argument("unknown channel: " + std::string(s));
}

Provenance provenanceFromString(std::string_view s) {
  if (s == "CRAWLED") return Provenance::Crawled;
  if (s == "SCRIPT") return Provenance::Script;
  if (s == "FOLLOW_UP") return Provenance::FollowUp;
  throw std::invalid_argument("unknown provenance: " + std::string(s));
}

Action Action::request(std::string_view method, std::string_view absolute_url) {
  Url u = Url::parse(absolute_url);
  Action a;
  a.kind = ActionKind::Request;
  a.method = std::string(method);
  a.query_params = decodeParams(u.query);
  u.query.clear();
  a.url = u.str();
  a.channel = u.scheme == "http" ? Channel::Http : Channel::Https;
  return a;
}

Action Action::formSubmit(std::string_view method, std::string_view absolute_url, ParamList form) {
  Action a = request(method.empty() ? "POST" : method, absolute_url);
  a.kind = ActionKind::FormSubmit;
  a.form_data = std::move(form);
  return a;
}

std::string Action::fullUrl() const {
  if (query_params.empty()) return url;
  return url + "?" + encodeParams(query_params);
}

void Action::setChannel(Channel c) {
  Url u = Url::parse(url);
  u.scheme = c == Channel::Http ? "http" : "https";
  url = u.str();
  channel = c;
}

Param& Action::parameter(std::size_t pos) {
  if (pos == 0 || pos > parameterCount())
    throw std::out_of_range("parameter position " + std::to_string(pos) + " out of range 1.." +
                            std::to_string(parameterCount()));
  return pos <= query_params.size() ? query_params[pos - 1] : form_data[pos - 1 - query_params.size()];
}

const Param& Action::parameter(std::size_t pos) const { return const_cast<Action*>(this)->parameter(pos); }

void Action::validate() const {
  Url u = Url::parse(url);
  if ((u.scheme == "https") != (channel == Channel::Https))
    throw std::invalid_argument("action channel does not match URL scheme: " + url);
  if (is_login && is_signup) throw std::invalid_argument("action cannot be both login and signup: " + url);
}

bool Action::operator==(const Action& o) const {
  return kind == o.kind && method == o.method && url == o.url && channel == o.channel &&
         sameParams(query_params, o.query_params) && sameParams(form_data, o.form_data) &&
         sameParams(headers, o.headers) && element_locator == o.element_locator && session == o.session &&
         user == o.user && is_login == o.is_login && is_signup == o.is_signup;
}

void InputSequence::validate() const {
  if (actions.empty()) throw std::invalid_argument("input sequence " + id + " has no actions");
  if (provenance == Provenance::FollowUp && !parent)
    throw std::invalid_argument("follow-up input " + id + " has no parent");
  for (const auto& a : actions) a.validate();
}

RequestFingerprint fingerprintOf(const Action& a) {
  ParamList params = a.query_params;
  params.insert(params.end(), a.form_data.begin(), a.form_data.end());
  return {a.method, a.url, sortedParams(std::move(params))};
}

std::string contentHash(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::string out;
  out.reserve(len * 2);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    out += buf;
  }
  return out;
}

// JSON ---------------------------------------------------------------------

namespace {

nlohmann::json paramsToJson(const ParamList& params) {
  auto arr = nlohmann::json::array();
  for (const auto& [k, v] : params) arr.push_back({k, v});
  return arr;
}

ParamList paramsFromJson(const nlohmann::json& j) {
  ParamList out;
  for (const auto& p : j) out.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
  return out;
}

}  // namespace

void to_json(nlohmann::json& j, const User& u) {
  j = {{"id", u.id}, {"username", u.username}, {"password", u.password}, {"role", u.role}};
}

void from_json(const nlohmann::json& j, User& u) {
  u.id = j.at("id").get<std::string>();
  u.username = j.at("username").get<std::string>();
  u.password = j.value("password", "");
  u.role = j.value("role", "");
  if (u.username.empty()) throw std::invalid_argument("user " + u.id + " has an empty username");
}

void to_json(nlohmann::json& j, const Session& s) {
  j = {{"id", s.id}};
  j["owner"] = s.owner ? nlohmann::json(*s.owner) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, Session& s) {
  s.id = j.at("id").get<std::string>();
  s.owner.reset();
  if (j.contains("owner") && !j["owner"].is_null()) s.owner = j["owner"].get<std::string>();
}

void to_json(nlohmann::json& j, const Action& a) {
  j = {{"kind", toString(a.kind)},
       {"method", a.method},
       {"url", a.url},
       {"channel", toString(a.channel)},
       {"query_params", paramsToJson(a.query_params)},
       {"form_data", paramsToJson(a.form_data)},
       {"session", a.session},
       {"is_login", a.is_login},
       {"is_signup", a.is_signup}};
  if (!a.headers.empty()) j["headers"] = paramsToJson(a.headers);
  j["element_locator"] = a.element_locator ? nlohmann::json(*a.element_locator) : nlohmann::json(nullptr);
  j["user"] = a.user ? nlohmann::json(*a.user) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, Action& a) {
  a.kind = actionKindFromString(j.at("kind").get<std::string>());
  a.method = j.at("method").get<std::string>();
  a.url = j.at("url").get<std::string>();
  a.channel = channelFromString(j.at("channel").get<std::string>());
  a.query_params = paramsFromJson(j.value("query_params", nlohmann::json::array()));
  a.form_data = paramsFromJson(j.value("form_data", nlohmann::json::array()));
  a.headers = paramsFromJson(j.value("headers", nlohmann::json::array()));
  a.session = j.value("session", Session{});
  a.is_login = j.value("is_login", false);
  a.is_signup = j.value("is_signup", false);
  a.element_locator.reset();
  a.user.reset();
  if (j.contains("element_locator") && !j["element_locator"].is_null())
    a.element_locator = j["element_locator"].get<std::string>();
  if (j.contains("user") && !j["user"].is_null()) a.user = j["user"].get<std::string>();
  a.validate();
}

void to_json(nlohmann::json& j, const InputSequence& s) {
  j = {{"id", s.id}, {"actions", s.actions}, {"provenance", toString(s.provenance)}};
  j["parent"] = s.parent ? nlohmann::json(*s.parent) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, InputSequence& s) {
  s.id = j.at("id").get<std::string>();
  s.actions = j.at("actions").get<std::vector<Action>>();
  s.provenance = provenanceFromString(j.at("provenance").get<std::string>());
  s.parent.reset();
  if (j.contains("parent") && !j["parent"].is_null()) s.parent = j["parent"].get<std::string>();
  s.validate();
}

void to_json(nlohmann::json& j, const RequestFingerprint& f) {
  j = {{"method", f.method}, {"url", f.url}, {"params", paramsToJson(f.params)}};
}

void from_json(const nlohmann::json& j, RequestFingerprint& f) {
  f.method = j.at("method").get<std::string>();
  f.url = j.at("url").get<std::string>();
  f.params = paramsFromJson(j.at("params"));
}

nlohmann::json pageSummary(const Page& p) {
  return {{"status", p.status},
          {"session_id", p.session_id},
          {"content_type", p.content_type},
          {"final_url", p.final_url},
          {"body_sha256", contentHash(p.body)},
          {"body_length", p.body.size()}};
}

nlohmann::json outputSummary(const OutputSequence& o) {
  auto pages = nlohmann::json::array();
  for (const auto& p : o.pages) pages.push_back(pageSummary(p));
  return {{"input", o.input}, {"pages", pages}};
}

nlohmann::json failureToJson(const FailureRecord& f) {
  nlohmann::json j;
  j["relation"] = f.relation;
  j["source_inputs"] = f.source_inputs;
  j["follow_up_inputs"] = f.follow_up_inputs;
  auto outs = nlohmann::json::array();
  for (const auto& o : f.outputs) outs.push_back(outputSummary(o));
  j["outputs"] = outs;
  j["view_indices"] = f.view_indices;
  j["novel_requests"] = f.novel_requests;
  return j;
}

}  // namespace smrlmt
