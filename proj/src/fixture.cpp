#include "smrlmt/fixture.hpp"

#include <sstream>

#include <httplib.h>

namespace smrlmt {

namespace {

struct Account {
  const char* username;
  const char* password;
  const char* role;
};

constexpr Account kAccounts[] = {
    {"admin", "adminpw", "admin"},
    {"devel", "develpw", "devel"},
    {"tester", "testerpw", "tester"},
};

const Account* account(const std::string& name) {
  for (const auto& a : kAccounts)
    if (name == a.username) return &a;
  return nullptr;
}

const std::map<std::string, std::string>& files() {
  static const std::map<std::string, std::string> fs = {
      {"docs/readme.txt",
       "Build farm readme\n\nThe farm compiles every branch on push and keeps the last twenty builds.\n"
       "Developers can inspect job queues from the jobs page and trigger rebuilds from the command line\n"
       "with the farm client. Ask an administrator before adding new build agents.\n"},
      {"docs/testplan.txt",
       "Release test plan\n\n1. Smoke suite on every nightly build.\n2. Integration suite on release candidates.\n"
       "3. Manual exploratory session of two hours per candidate, notes filed in the tracker.\n"
       "Testers sign off in the tests page once all three stages are green.\n"},
      {"docs/manual.txt",
       "Administrator manual\n\nAgents are registered from the slaves page. Starting a slave reserves a\n"
       "machine from the pool for one hour. User accounts are reviewed monthly; remove accounts that have\n"
       "not logged in for ninety days. Backups of the job history run at midnight.\n"},
      {"config/secrets.txt",
       "# deployment secrets\ndb_password=Zr8!kq2Lm\napi_token=tok_4f9a8c1d7e2b6a3f\n"
       "signing_key=ed25519:9c1f0a7b3e5d2c4f6a8b0e1d3c5f7a9b\nsmtp_password=mailrelay-2291\n"
       "backup_passphrase=correct-horse-battery-staple\n"},
      {"config/users.db",
       "id|username|hash|role\n1|admin|$2b$12$Qm9vYmFyYmF6cXV4cXV1eA|admin\n2|devel|$2b$12$ZGV2ZWxkZXZlbGRldmVs|devel\n"
       "3|tester|$2b$12$dGVzdGVydGVzdGVydGVzdA|tester\n4|ops|$2b$12$b3Bzb3Bzb3Bzb3Bzb3Bzbw|admin\n"},
      {"logs/access.log",
       "127.0.0.1 - admin [01/Mar/2024] \"GET /admin/users\" 200\n127.0.0.1 - devel [01/Mar/2024] \"GET /jobs\" 200\n"
       "127.0.0.1 - tester [01/Mar/2024] \"GET /tests\" 200\n127.0.0.1 - admin [01/Mar/2024] \"GET /admin/startSlave\" 200\n"},
      {"../../etc/passwd",
       "root:x:0:0:root:/root:/bin/bash\ndaemon:x:1:1:daemon:/usr/sbin:/usr/sbin/nologin\n"
       "www-data:x:33:33:www-data:/var/www:/usr/sbin/nologin\nbuild:x:1000:1000:build farm:/home/build:/bin/sh\n"},
  };
  return fs;
}

const std::map<std::string, std::vector<std::string>>& downloads() {
  static const std::map<std::string, std::vector<std::string>> allowed = {
      {"admin", {"docs/readme.txt", "docs/testplan.txt", "docs/manual.txt"}},
      {"devel", {"docs/readme.txt"}},
      {"tester", {"docs/testplan.txt"}},
  };
  return allowed;
}

std::string page(const std::string& title, const std::string& content) {
  std::ostringstream o;
  o << "<!DOCTYPE html>\n<html>\n<head><title>Build Farm - " << title
    << "</title><link rel=\"stylesheet\" href=\"/static/site.css\"></head>\n<body>\n<h1>" << title << "</h1>\n"
    << content << "\n<p class=\"footer\">Build Farm demo site, static pages for automated scanning.</p>\n</body>\n</html>\n";
  return o.str();
}

std::string link(const std::string& href, const std::string& text) {
  return "<li><a href=\"" + href + "\">" + text + "</a></li>\n";
}

std::string homeLink() { return "<p><a href=\"/home\">Back to your dashboard</a></p>"; }

void html(httplib::Response& res, int status, const std::string& body) {
  res.status = status;
  res.set_content(body, "text/html; charset=utf-8");
}

void failure(httplib::Response& res, int status, const std::string& message) {
  html(res, status,
       page("Request refused", "<p class=\"error\">Error: " + message +
                                   "</p>\n<p>The request could not be completed. Return to the start page and try "
                                   "again with an account that holds the required role.</p>"));
}

}  // namespace

FixtureOptions FixtureOptions::fromVulnList(std::string_view list) {
  FixtureOptions o;
  std::string item;
  std::istringstream in{std::string(list)};
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    for (auto& c : item) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (item.empty()) continue;
    if (item == "V1") o.v1 = true;
    else if (item == "V2") o.v2 = true;
    else if (item == "V3") o.v3 = true;
    else if (item == "V4") o.v4 = true;
    else if (item == "ALL") o.v1 = o.v2 = o.v3 = o.v4 = true;
    else throw ConfigError("unknown vulnerability toggle '" + item + "' (expected V1..V4)");
  }
  return o;
}

FixtureServer::FixtureServer(FixtureOptions opts) : opts_(std::move(opts)) {}

FixtureServer::~FixtureServer() { stop(); }

std::vector<std::string> FixtureServer::pathCorpus() {
  return {"docs/readme.txt",   "docs/testplan.txt", "docs/manual.txt",  "config/secrets.txt",
          "config/users.db",   "logs/access.log",   "../../etc/passwd", "docs/missing.txt",
          "images/logo.png"};
}

TargetConfig FixtureServer::targetConfig() const {
  TargetConfig cfg;
  cfg.base_url = "https://" + opts_.host + ":" + std::to_string(secure_port_) + "/";
  cfg.insecure_port = port_;
  cfg.secure_port = secure_port_;
  cfg.tls = false;
  cfg.session_cookie = "SID";
  for (const auto& a : kAccounts) cfg.users.push_back(User{a.username, a.username, a.password, a.role});
  cfg.file_paths = pathCorpus();
  cfg.connect_timeout = std::chrono::milliseconds(2000);
  cfg.read_timeout = std::chrono::milliseconds(5000);
  return cfg;
}

void FixtureServer::reset() {
  std::lock_guard lock(mu_);
  sessions_.clear();
  next_sid_ = 0;
}

std::string FixtureServer::newSession(const std::string& user) {
  std::string sid = "sid" + std::to_string(++next_sid_);
  sessions_[sid] = SessionState{user};
  return sid;
}

const FixtureServer::SessionState* FixtureServer::session(const httplib::Request& req, std::string* sid) const {
  std::string cookies = req.get_header_value("Cookie");
  std::istringstream in(cookies);
  std::string part;
  while (std::getline(in, part, ';')) {
    part.erase(0, part.find_first_not_of(' '));
    if (part.rfind("SID=", 0) != 0) continue;
    std::string value = part.substr(4);
    auto it = sessions_.find(value);
    if (it == sessions_.end()) continue;
    if (sid) *sid = value;
    return &it->second;
  }
  return nullptr;
}

void FixtureServer::handle(const httplib::Request& req, httplib::Response& res, bool secure) {
  std::lock_guard lock(mu_);
  const std::string& path = req.path;
  const bool get = req.method == "GET" || req.method == "HEAD";
  const SessionState* s = session(req);
  const Account* me = s && !s->user.empty() ? account(s->user) : nullptr;
  const std::string role = me ? me->role : "";

  if (path == "/__echo") {
    res.set_content(req.get_header_value("Cookie"), "text/plain");
    return;
  }
  if (path == "/" && get) {
    html(res, 200,
         page("Welcome",
              "<p>This build farm coordinates compilation jobs, nightly test runs and release downloads for the "
              "whole team. Sign in to reach your dashboard or request a new account.</p>\n<ul>\n" +
                  link("/login", "Sign in") + link("/signup", "Create an account") + "</ul>"));
    return;
  }
  if (path == "/login" && get) {
    html(res, 200,
         page("Sign in",
              "<p>Enter the user name and password issued by the farm administrators. Sessions last until the "
              "browser is closed.</p>\n<form name=\"login\" action=\"/login\" method=\"post\">\n"
              "<input type=\"text\" name=\"username\">\n<input type=\"password\" name=\"password\">\n"
              "<input type=\"submit\" value=\"Sign in\">\n</form>"));
    return;
  }
  if (path == "/login" && req.method == "POST") {
    if (!secure && !opts_.v2) {
      failure(res, 403, "sign-in over an unencrypted channel is refused");
      return;
    }
    const Account* a = account(req.get_param_value("username"));
    if (!a || req.get_param_value("password") != a->password) {
      failure(res, 401, "invalid credentials");
      return;
    }
    std::string sid = newSession(a->username);
    res.set_header("Set-Cookie", "SID=" + sid + "; Path=/; HttpOnly");
    res.set_redirect("/home", 302);
    return;
  }
  if (path == "/signup" && get) {
    html(res, 200,
         page("Create an account",
              "<p>New accounts start without any role. An administrator assigns developer or tester rights "
              "after reviewing the request, usually within one working day.</p>\n"
              "<form name=\"signup\" action=\"/signup\" method=\"post\">\n"
              "<input type=\"text\" name=\"username\">\n<input type=\"password\" name=\"password\">\n"
              "<input type=\"submit\" value=\"Request account\">\n</form>\n<p><a href=\"/\">Start page</a></p>"));
    return;
  }
  if (path == "/signup" && req.method == "POST") {
    std::string sid;
    bool keep = opts_.v4 && session(req, &sid);
    if (!keep) {
      sid = newSession("");
      res.set_header("Set-Cookie", "SID=" + sid + "; Path=/; HttpOnly");
    }
    html(res, 200,
         page("Account requested",
              "<p>Account created. Your request was queued for review and a confirmation message will be sent "
              "once a role has been assigned to it.</p>\n<p><a href=\"/\">Start page</a></p>"));
    return;
  }

  // everything below needs a signed-in user
  static const std::vector<std::string> known = {"/home", "/stats", "/jobs", "/tests", "/admin/startSlave",
                                                 "/admin/users", "/download"};
  if (std::find(known.begin(), known.end(), path) == known.end()) {
    failure(res, 404, "page not found");
    return;
  }
  if (!me) {
    failure(res, 401, "please sign in first");
    return;
  }

  if (path == "/home") {
    std::string items;
    std::string intro;
    if (role == "admin") {
      intro = "Administrator dashboard. You manage agents, accounts and every document of the farm.";
      items = link("/stats", "Farm statistics") + link("/jobs", "Job queue") + link("/tests", "Test runs") +
              link("/admin/startSlave", "Start a build slave") + link("/admin/users", "Manage accounts") +
              link("/download?path=docs/readme.txt", "Readme") +
              link("/download?path=docs/testplan.txt", "Test plan") +
              link("/download?path=docs/manual.txt", "Administrator manual");
    } else if (role == "devel") {
      intro = "Developer dashboard. Follow your builds through the queue and read the build notes.";
      items = link("/stats", "Farm statistics") + link("/jobs", "Job queue") +
              link("/download?path=docs/readme.txt", "Readme");
    } else {
      intro = "Tester dashboard. Review nightly test runs and the current release test plan.";
      items = link("/stats", "Farm statistics") + link("/tests", "Test runs") +
              link("/download?path=docs/testplan.txt", "Test plan");
    }
    html(res, 200, page("Dashboard of " + std::string(me->username), "<p>" + intro + "</p>\n<ul>\n" + items + "</ul>"));
    return;
  }
  if (path == "/stats") {
    html(res, 200,
         page("Farm statistics",
              "<table>\n<tr><td>Agents online</td><td>6</td></tr>\n<tr><td>Builds today</td><td>148</td></tr>\n"
              "<tr><td>Median build time</td><td>7m 12s</td></tr>\n<tr><td>Queue length</td><td>3</td></tr>\n"
              "</table>\n" + homeLink()));
    return;
  }
  if (path == "/jobs") {
    if (role != "devel" && role != "admin") return failure(res, 403, "access to the job queue is forbidden");
    html(res, 200,
         page("Job queue",
              "<ol>\n<li>core-lib #4411 compiling on agent-2</li>\n<li>web-ui #918 waiting for an agent</li>\n"
              "<li>installer #77 packaging artifacts</li>\n</ol>\n<p>Jobs older than a week are archived "
              "automatically.</p>\n" + homeLink()));
    return;
  }
  if (path == "/tests") {
    if (role != "tester" && role != "admin") return failure(res, 403, "access to test runs is forbidden");
    html(res, 200,
         page("Test runs",
              "<ul>\n<li>nightly smoke: 412 passed, 0 skipped</li>\n<li>integration rc-3: 1290 passed, 4 flaky "
              "retried</li>\n<li>exploratory session 12: notes attached</li>\n</ul>\n" + homeLink()));
    return;
  }
  if (path == "/admin/startSlave") {
    if (role != "admin" && !opts_.v1) return failure(res, 403, "only administrators may start slaves");
    html(res, 200,
         page("Start a build slave",
              "<p>Slave agent-7 reserved for one hour and booting now. It will join the pool and pick up queued "
              "jobs as soon as its toolchain check completes.</p>\n" + homeLink()));
    return;
  }
  if (path == "/admin/users") {
    if (role != "admin") return failure(res, 403, "only administrators may manage accounts");
    html(res, 200,
         page("Manage accounts",
              "<table>\n<tr><th>user</th><th>role</th><th>last sign-in</th></tr>\n"
              "<tr><td>admin</td><td>admin</td><td>today</td></tr>\n<tr><td>devel</td><td>devel</td><td>today</td></tr>\n"
              "<tr><td>tester</td><td>tester</td><td>yesterday</td></tr>\n</table>\n" + homeLink()));
    return;
  }
  // /download
  std::string file = req.get_param_value("path");
  const auto& fs = files();
  bool allowed;
  if (opts_.v3) {
    allowed = fs.count(file) != 0;
    if (!allowed) return failure(res, 404, "file not found");
  } else {
    const auto& mine = downloads().at(role);
    allowed = std::find(mine.begin(), mine.end(), file) != mine.end();
    if (!allowed) return failure(res, 403, "access to this path is forbidden");
  }
  res.status = 200;
  res.set_content(fs.at(file), "text/plain; charset=utf-8");
}

void FixtureServer::routes(httplib::Server& srv, bool secure) {
  auto h = [this, secure](const httplib::Request& req, httplib::Response& res) { handle(req, res, secure); };
  srv.Get(".*", h);
  srv.Post(".*", h);
  srv.Put(".*", h);
  srv.Delete(".*", h);
  srv.Patch(".*", h);
  srv.Options(".*", h);
  // handlers are serialized by mu_; a few workers keep idle keep-alive
  // connections from starving other clients
  srv.new_task_queue = [] { return new httplib::ThreadPool(4); };
  srv.set_keep_alive_max_count(100);
  srv.set_tcp_nodelay(true);
  // httplib's default adds SO_REUSEPORT, which would let a second instance
  // share the port instead of failing
  srv.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
}

void FixtureServer::start() {
  if (plain_) return;
  plain_ = std::make_unique<httplib::Server>();
  secure_ = std::make_unique<httplib::Server>();
  routes(*plain_, false);
  routes(*secure_, true);
  auto bind = [&](httplib::Server& srv, int want) {
    if (want == 0) return srv.bind_to_any_port(opts_.host);
    return srv.bind_to_port(opts_.host, want) ? want : -1;
  };
  port_ = bind(*plain_, opts_.port);
  secure_port_ = bind(*secure_, opts_.secure_port);
  if (port_ < 0 || secure_port_ < 0) {
    plain_.reset();
    secure_.reset();
    throw std::runtime_error("fixture: cannot bind " + opts_.host + " ports " + std::to_string(opts_.port) + "/" +
                             std::to_string(opts_.secure_port));
  }
  plain_thread_ = std::thread([this] { plain_->listen_after_bind(); });
  secure_thread_ = std::thread([this] { secure_->listen_after_bind(); });
  plain_->wait_until_ready();
  secure_->wait_until_ready();
}

void FixtureServer::stop() {
  if (!plain_) return;
  plain_->stop();
  secure_->stop();
  if (plain_thread_.joinable()) plain_thread_.join();
  if (secure_thread_.joinable()) secure_thread_.join();
  plain_.reset();
  secure_.reset();
}

}  // namespace smrlmt
