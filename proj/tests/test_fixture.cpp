#include <doctest.h>

#include "smrlmt/executor.hpp"
#include "smrlmt/fixture.hpp"
#include "smrlmt/levenshtein.hpp"

using namespace smrlmt;

namespace {

struct Client {
  TargetConfig cfg;
  HttpExecutor exec;
  explicit Client(const FixtureServer& s) : cfg(s.targetConfig()), exec(cfg) {}

  Action get(const std::string& path) { return Action::request("GET", cfg.base_url + path); }
  Action login(const std::string& user, const std::string& pw, Channel ch = Channel::Https) {
    auto a = Action::formSubmit("POST", cfg.base_url + "login", {{"username", user}, {"password", pw}});
    a.setChannel(ch);
    return a;
  }
  // signs in as `user` and fetches `path`
  Page as(const std::string& user, const std::string& path) {
    InputSequence s{"t", {login(user, user + "pw"), get(path)}, Provenance::Crawled, std::nullopt};
    return exec.execute(s).pages.back();
  }
};

}  // namespace

TEST_CASE("target configuration of a running instance") {
  FixtureServer s;
  s.start();
  auto cfg = s.targetConfig();
  CHECK(cfg.base_url == "https://127.0.0.1:" + std::to_string(s.securePort()) + "/");
  CHECK(cfg.insecure_port == s.port());
  CHECK_FALSE(cfg.tls);
  CHECK(cfg.session_cookie == "SID");
  REQUIRE(cfg.users.size() == 3);
  CHECK(cfg.users[0].username == "admin");
  CHECK(cfg.file_paths == FixtureServer::pathCorpus());
  CHECK(s.port() != s.securePort());
}

TEST_CASE("roles and V1") {
  for (bool v1 : {false, true}) {
    CAPTURE(v1);
    FixtureOptions o;
    o.v1 = v1;
    FixtureServer s(o);
    s.start();
    Client c(s);
    auto admin = c.as("admin", "admin/startSlave");
    auto devel = c.as("devel", "admin/startSlave");
    auto tester = c.as("tester", "admin/startSlave");
    CHECK(admin.status == 200);
    CHECK(devel.status == (v1 ? 200 : 403));
    CHECK(tester.status == (v1 ? 200 : 403));
    // under V1 the page is the same for everyone; patched it is an error page
    CHECK(pageEqual(admin.body, devel.body, 0.05) == v1);
    CHECK(pageEqual(devel.body, tester.body, 0.05));
    CHECK((devel.body.find("only administrators") != std::string::npos) == !v1);

    CHECK(c.as("devel", "jobs").status == 200);
    CHECK(c.as("devel", "tests").status == 403);
    CHECK(c.as("tester", "tests").status == 200);
    CHECK(c.as("tester", "admin/users").status == 403);
    CHECK(c.as("admin", "admin/users").status == 200);
  }
}

TEST_CASE("anonymous access and unknown pages") {
  FixtureServer s;
  s.start();
  Client c(s);
  CHECK(c.exec.perform(c.get("home")).status == 401);
  CHECK(c.exec.perform(c.get("")).status == 200);
  CHECK(c.exec.perform(c.get("nope")).status == 404);
  auto bad = c.exec.execute({"t", {c.login("admin", "wrong")}, Provenance::Crawled, std::nullopt});
  CHECK(bad.pages[0].status == 401);
  auto ok = c.exec.execute({"t", {c.login("admin", "adminpw")}, Provenance::Crawled, std::nullopt});
  CHECK(ok.pages[0].status == 200);
  CHECK(ok.pages[0].session_id == "sid1");
  CHECK(ok.pages[0].final_url.find("/home") != std::string::npos);
  CHECK(ok.pages[0].body.find("Dashboard of admin") != std::string::npos);
}

TEST_CASE("V2: sign-in over the plain channel") {
  for (bool v2 : {false, true}) {
    CAPTURE(v2);
    FixtureOptions o;
    o.v2 = v2;
    FixtureServer s(o);
    s.start();
    Client c(s);
    auto p = c.exec.execute({"t", {c.login("devel", "develpw", Channel::Http)}, Provenance::Crawled, std::nullopt});
    CHECK(p.pages[0].status == (v2 ? 200 : 403));
    CHECK(p.pages[0].session_id.empty() == !v2);
  }
}

TEST_CASE("V3: downloads outside the role's documents") {
  for (bool v3 : {false, true}) {
    CAPTURE(v3);
    FixtureOptions o;
    o.v3 = v3;
    FixtureServer s(o);
    s.start();
    Client c(s);
    CHECK(c.as("devel", "download?path=docs/readme.txt").status == 200);
    auto secret = c.as("devel", "download?path=config/secrets.txt");
    CHECK(secret.status == (v3 ? 200 : 403));
    auto passwd = c.as("tester", "download?path=../../etc/passwd");
    CHECK(passwd.status == (v3 ? 200 : 403));
    if (v3) CHECK(passwd.body.find("root:") != std::string::npos);
    CHECK(c.as("devel", "download?path=docs/missing.txt").status == (v3 ? 404 : 403));
  }
}

TEST_CASE("V4: signup keeps the session id") {
  for (bool v4 : {false, true}) {
    CAPTURE(v4);
    FixtureOptions o;
    o.v4 = v4;
    FixtureServer s(o);
    s.start();
    Client c(s);
    auto signup = Action::formSubmit("POST", c.cfg.base_url + "signup", {{"username", "n"}, {"password", "p"}});
    auto out = c.exec.execute({"t", {c.login("tester", "testerpw"), signup}, Provenance::Crawled, std::nullopt});
    CHECK(out.pages[0].session_id == "sid1");
    CHECK(out.pages[1].session_id == (v4 ? "sid1" : "sid2"));
    // anonymous signup always issues a session
    auto anon = c.exec.execute({"t", {signup}, Provenance::Crawled, std::nullopt});
    CHECK_FALSE(anon.pages[0].session_id.empty());
  }
}

TEST_CASE("responses are deterministic and reset restarts session ids") {
  FixtureServer s(FixtureOptions::all());
  s.start();
  Client c(s);
  auto a = c.as("admin", "home");
  auto b = c.as("admin", "home");
  CHECK(a.body == b.body);
  CHECK(b.session_id == "sid2");
  s.reset();
  // the jar still holds sid2, which the server forgot
  CHECK(c.exec.perform(c.get("home")).status == 401);
  CHECK(c.as("admin", "stats").session_id == "sid1");
}

TEST_CASE("a taken port is an error") {
  FixtureServer a;
  a.start();
  FixtureOptions o;
  o.port = a.port();
  FixtureServer b(o);
  CHECK_THROWS_AS(b.start(), std::runtime_error);
  a.stop();
  a.stop();  // idempotent
}

TEST_CASE("vulnerability lists") {
  auto o = FixtureOptions::fromVulnList("V1,v3");
  CHECK(o.v1);
  CHECK_FALSE(o.v2);
  CHECK(o.v3);
  CHECK_FALSE(o.v4);
  auto all = FixtureOptions::fromVulnList("ALL");
  CHECK((all.v1 && all.v2 && all.v3 && all.v4));
  auto none = FixtureOptions::fromVulnList("");
  CHECK_FALSE((none.v1 || none.v2 || none.v3 || none.v4));
  CHECK_THROWS_AS(FixtureOptions::fromVulnList("V9"), ConfigError);
}
