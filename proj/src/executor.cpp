#include "smrlmt/executor.hpp"

#include <cstdlib>
#include <regex>

#include <httplib.h>

namespace smrlmt {

std::set<RequestFingerprint> recordRequests(const InputSequence& seq) {
  std::set<RequestFingerprint> out;
  for (const auto& a : seq.actions) out.insert(fingerprintOf(a));
  return out;
}

struct HttpExecutor::Clients {
  std::map<std::string, std::unique_ptr<httplib::ClientImpl>> by_origin;
};

namespace {

bool isRedirect(int status) {
  return status == 301 || status == 302 || status == 303 || status == 307 || status == 308;
}

struct Proxy {
  std::string host;
  int port = 0;
};

std::optional<Proxy> proxyFromEnv() {
  const char* env = std::getenv("SMRLMT_PROXY");
  if (!env || !*env) return std::nullopt;
  std::string s = env;
  if (auto p = s.find("://"); p != std::string::npos) s = s.substr(p + 3);
  if (!s.empty() && s.back() == '/') s.pop_back();
  auto colon = s.rfind(':');
  if (colon == std::string::npos) return Proxy{s, 8080};
  return Proxy{s.substr(0, colon), std::atoi(s.c_str() + colon + 1)};
}

// Name/value of a Set-Cookie header; attributes are ignored.
std::pair<std::string, std::string> parseSetCookie(const std::string& header) {
  auto semi = header.find(';');
  std::string pair = header.substr(0, semi);
  auto eq = pair.find('=');
  auto trim = [](std::string s) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  if (eq == std::string::npos) return {trim(pair), ""};
  return {trim(pair.substr(0, eq)), trim(pair.substr(eq + 1))};
}

bool expires(const std::string& header) {
  std::string l;
  for (char c : header) l += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return l.find("max-age=0") != std::string::npos || l.find("expires=thu, 01 jan 1970") != std::string::npos;
}

}  // namespace

HttpExecutor::HttpExecutor(TargetConfig cfg) : cfg_(std::move(cfg)), clients_(std::make_unique<Clients>()) {}

HttpExecutor::~HttpExecutor() = default;

void HttpExecutor::clearSession() { jar_.clear(); }

std::string HttpExecutor::sessionCookie() const {
  if (!cfg_.session_cookie.empty()) {
    auto it = jar_.find(cfg_.session_cookie);
    return it == jar_.end() ? "" : it->second;
  }
  static const std::regex looks_like_session("sess|sid|token", std::regex::icase);
  for (const auto& [name, value] : jar_)
    if (std::regex_search(name, looks_like_session)) return value;
  return "";
}

std::string HttpExecutor::cookieHeader() const {
  std::string out;
  for (const auto& [name, value] : jar_) {
    if (!out.empty()) out += "; ";
    out += name + "=" + value;
  }
  return out;
}

void HttpExecutor::storeCookies(const std::vector<std::string>& set_cookie) {
  for (const auto& h : set_cookie) {
    auto [name, value] = parseSetCookie(h);
    if (name.empty()) continue;
    if (expires(h)) jar_.erase(name);
    else jar_[name] = value;
  }
}

Page HttpExecutor::perform(const Action& action) {
  Url url = Url::parse(action.fullUrl());
  if (action.channel == Channel::Http) {
    url.scheme = "http";
    if (cfg_.insecure_port) url.port = cfg_.insecure_port;
  } else {
    url.scheme = "https";
    if (cfg_.secure_port) url.port = cfg_.secure_port;
  }
  std::string method = action.method;
  std::string body;
  if (!action.form_data.empty()) {
    if (method == "GET" || method == "HEAD") {
      auto q = encodeParams(action.form_data);
      url.query = url.query.empty() ? q : url.query + "&" + q;
    } else {
      body = encodeParams(action.form_data);
    }
  }

  Page page;
  static const auto proxy = proxyFromEnv();
  for (std::size_t hop = 0;; ++hop) {
    const bool tls = url.scheme == "https" && cfg_.tls;
    const std::string key = (tls ? "https://" : "http://") + url.authority();
    auto& cli = clients_->by_origin[key];
    if (!cli) {
#ifdef CPPHTTPLIB_OPENSSL_SUPPORT
      if (tls) {
        auto ssl = std::make_unique<httplib::SSLClient>(url.host, url.effectivePort());
        ssl->enable_server_certificate_verification(false);
        cli = std::move(ssl);
      } else {
        cli = std::make_unique<httplib::ClientImpl>(url.host, url.effectivePort());
      }
#else
      if (tls) {
        page = Page{"", 0, sessionCookie(), "", url.str()};
        break;
      }
      cli = std::make_unique<httplib::ClientImpl>(url.host, url.effectivePort());
#endif
      cli->set_keep_alive(true);
      cli->set_tcp_nodelay(true);
      cli->set_url_encode(false);
      cli->set_follow_location(false);
      auto secs = [](std::chrono::milliseconds ms) {
        return std::pair<time_t, time_t>(ms.count() / 1000, (ms.count() % 1000) * 1000);
      };
      auto [cs, cu] = secs(cfg_.connect_timeout);
      auto [rs, ru] = secs(cfg_.read_timeout);
      cli->set_connection_timeout(cs, cu);
      cli->set_read_timeout(rs, ru);
      if (proxy) cli->set_proxy(proxy->host, proxy->port);
    }

    httplib::Request req;
    req.method = method;
    req.path = url.target();
    for (const auto& [k, v] : action.headers) req.set_header(k, v);
    if (auto c = cookieHeader(); !c.empty()) req.set_header("Cookie", c);
    if (!body.empty()) {
      req.body = body;
      req.set_header("Content-Type", "application/x-www-form-urlencoded");
    }
    ++requests_;
    auto res = cli->send(req);
    if (!res) {
      if (transcript_)
        *transcript_ << nlohmann::json{{"method", method}, {"url", url.str()}, {"error", httplib::to_string(res.error())}}.dump()
                     << "\n";
      page = Page{"", 0, sessionCookie(), "", url.str()};
      break;
    }
    std::vector<std::string> set_cookie;
    for (auto [it, end] = res->headers.equal_range("Set-Cookie"); it != end; ++it) set_cookie.push_back(it->second);
    storeCookies(set_cookie);
    if (transcript_)
      *transcript_ << nlohmann::json{{"method", method}, {"url", url.str()}, {"status", res->status},
                                     {"bytes", res->body.size()}}
                          .dump()
                   << "\n";

    if (isRedirect(res->status) && res->has_header("Location") && hop < cfg_.max_redirects) {
      url = url.resolve(res->get_header_value("Location"));
      if (res->status == 303 || ((res->status == 301 || res->status == 302) && method == "POST")) {
        method = "GET";
        body.clear();
      }
      continue;
    }
    page.body = res->body;
    page.status = res->status;
    page.content_type = res->get_header_value("Content-Type");
    page.final_url = url.str();
    page.session_id = sessionCookie();
    break;
  }
  return page;
}

OutputSequence HttpExecutor::execute(const InputSequence& seq, bool fresh_session) {
  if (fresh_session) clearSession();
  OutputSequence out;
  out.input = seq.id;
  for (const auto& a : seq.actions) out.pages.push_back(perform(a));
  return out;
}

OutputSequence RecordingExecutor::execute(const InputSequence& seq, bool fresh_session) {
  {
    std::lock_guard lock(mu_);
    ++executions_;
    for (const auto& a : seq.actions) log_.push_back(fingerprintOf(a));
  }
  if (inner_) return inner_->execute(seq, fresh_session);
  OutputSequence out;
  out.input = seq.id;
  for (const auto& a : seq.actions) out.pages.push_back(Page{"", 200, "", "text/html", a.fullUrl()});
  return out;
}

std::vector<RequestFingerprint> RecordingExecutor::log() const {
  std::lock_guard lock(mu_);
  return log_;
}

std::size_t RecordingExecutor::executions() const {
  std::lock_guard lock(mu_);
  return executions_;
}

}  // namespace smrlmt
