#include <doctest.h>

#include <sstream>
#include <thread>

#include <httplib.h>

#include "smrlmt/executor.hpp"

using namespace smrlmt;

namespace {

// Echo server: reports what it received; a few routes set cookies or redirect.
struct EchoServer {
  httplib::Server srv;
  std::thread th;
  int port = 0;
  std::string name;

  explicit EchoServer(std::string n) : name(std::move(n)) {
    auto echo = [this](const httplib::Request& req, httplib::Response& res) {
      std::string params;
      for (const auto& [k, v] : req.params) params += k + "=" + v + ";";
      res.set_content(name + "|" + req.method + "|" + req.path + "|" + params + "|" + req.body + "|" +
                          req.get_header_value("Cookie") + "|" + req.get_header_value("X-Test"),
                      "text/plain");
    };
    srv.Get("/set", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Set-Cookie", "SID=abc; Path=/; HttpOnly");
      res.set_content("set", "text/plain");
    });
    srv.Get("/drop", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Set-Cookie", "SID=; Max-Age=0");
      res.set_content("dropped", "text/plain");
    });
    srv.Post("/go", [](const httplib::Request&, httplib::Response& res) { res.set_redirect("/landed?x=1", 302); });
    srv.Get("/loop", [](const httplib::Request&, httplib::Response& res) { res.set_redirect("/loop", 302); });
    srv.Get(".*", echo);
    srv.Post(".*", echo);
    srv.Put(".*", echo);
    port = srv.bind_to_any_port("127.0.0.1");
    th = std::thread([this] { srv.listen_after_bind(); });
    srv.wait_until_ready();
  }
  ~EchoServer() {
    srv.stop();
    th.join();
  }
};

TargetConfig target(int secure, int plain = 0) {
  TargetConfig cfg;
  cfg.base_url = "https://127.0.0.1:" + std::to_string(secure) + "/";
  cfg.secure_port = secure;
  cfg.insecure_port = plain;
  cfg.tls = false;
  cfg.session_cookie = "SID";
  cfg.connect_timeout = std::chrono::seconds(2);
  cfg.read_timeout = std::chrono::seconds(2);
  return cfg;
}

std::vector<std::string> fields(const std::string& body) {
  std::vector<std::string> out;
  std::stringstream ss(body);
  std::string f;
  while (std::getline(ss, f, '|')) out.push_back(f);
  while (out.size() < 7) out.push_back("");
  return out;
}

InputSequence seqOf(std::vector<Action> actions) { return {"s", std::move(actions), Provenance::Crawled, std::nullopt}; }

}  // namespace

TEST_CASE("requests are replayed as recorded") {
  EchoServer s("sec");
  HttpExecutor exec(target(s.port));
  auto base = "https://127.0.0.1:" + std::to_string(s.port);

  auto get = Action::request("GET", base + "/page?b=2&a=1");
  get.headers = {{"X-Test", "yes"}};
  auto f = fields(exec.perform(get).body);
  CHECK(f[1] == "GET");
  CHECK(f[2] == "/page");
  CHECK(f[3] == "a=1;b=2;");
  CHECK(f[6] == "yes");

  auto post = Action::formSubmit("POST", base + "/form?q=1", {{"user", "a b"}, {"pw", "x&y"}});
  f = fields(exec.perform(post).body);
  CHECK(f[1] == "POST");
  CHECK(f[4] == "user=a+b&pw=x%26y");

  auto getForm = Action::formSubmit("GET", base + "/search", {{"q", "term"}});
  f = fields(exec.perform(getForm).body);
  CHECK(f[3] == "q=term;");
  CHECK(f[4].empty());

  auto put = Action::request("PUT", base + "/thing");
  CHECK(fields(exec.perform(put).body)[1] == "PUT");
  CHECK(exec.requestCount() == 4);
}

TEST_CASE("cookie jar and sessions") {
  EchoServer s("sec");
  auto base = "https://127.0.0.1:" + std::to_string(s.port);
  HttpExecutor exec(target(s.port));
  auto out = exec.execute(seqOf({Action::request("GET", base + "/set"), Action::request("GET", base + "/echo"),
                                 Action::request("GET", base + "/drop"), Action::request("GET", base + "/echo")}));
  REQUIRE(out.pages.size() == 4);
  CHECK(out.pages[0].session_id == "abc");
  CHECK(fields(out.pages[1].body)[5] == "SID=abc");
  CHECK(out.pages[2].session_id.empty());
  CHECK(fields(out.pages[3].body)[5].empty());

  // fresh_session starts from an empty jar; false keeps it
  exec.execute(seqOf({Action::request("GET", base + "/set")}));
  auto kept = exec.execute(seqOf({Action::request("GET", base + "/echo")}), false);
  CHECK(fields(kept.pages[0].body)[5] == "SID=abc");
  auto fresh = exec.execute(seqOf({Action::request("GET", base + "/echo")}), true);
  CHECK(fields(fresh.pages[0].body)[5].empty());

  // executors never share cookies
  HttpExecutor other(target(s.port));
  exec.execute(seqOf({Action::request("GET", base + "/set")}));
  CHECK(fields(other.perform(Action::request("GET", base + "/echo")).body)[5].empty());
}

TEST_CASE("redirects") {
  EchoServer s("sec");
  auto base = "https://127.0.0.1:" + std::to_string(s.port);
  auto cfg = target(s.port);
  HttpExecutor exec(cfg);
  auto p = exec.perform(Action::formSubmit("POST", base + "/go", {{"a", "1"}}));
  auto f = fields(p.body);
  CHECK(p.status == 200);
  CHECK(f[1] == "GET");
  CHECK(f[2] == "/landed");
  CHECK(p.final_url == "https://127.0.0.1:" + std::to_string(s.port) + "/landed?x=1");
  cfg.max_redirects = 3;
  HttpExecutor limited(cfg);
  CHECK(limited.perform(Action::request("GET", base + "/loop")).status == 302);
  CHECK(limited.requestCount() == 4);
}

TEST_CASE("channels pick the configured port") {
  EchoServer sec("sec"), plain("plain");
  HttpExecutor exec(target(sec.port, plain.port));
  auto a = Action::request("GET", "https://127.0.0.1:" + std::to_string(sec.port) + "/x");
  CHECK(fields(exec.perform(a).body)[0] == "sec");
  a.setChannel(Channel::Http);
  CHECK(fields(exec.perform(a).body)[0] == "plain");
}

TEST_CASE("transport failures are status-0 pages") {
  int dead_port;
  {
    httplib::Server tmp;
    dead_port = tmp.bind_to_any_port("127.0.0.1");
  }  // closed again
  auto cfg = target(dead_port);
  HttpExecutor exec(cfg);
  std::ostringstream transcript;
  exec.setTranscript(&transcript);
  auto out = exec.execute(seqOf({Action::request("GET", cfg.base_url + "a"), Action::request("GET", cfg.base_url + "b")}));
  REQUIRE(out.pages.size() == 2);
  CHECK(out.pages[0].status == 0);
  CHECK(out.pages[1].status == 0);
  auto line = transcript.str().substr(0, transcript.str().find('\n'));
  auto j = nlohmann::json::parse(line);
  CHECK(j.contains("error"));
  CHECK(j["method"] == "GET");
}

TEST_CASE("transcript has one JSON object per exchange") {
  EchoServer s("sec");
  auto base = "https://127.0.0.1:" + std::to_string(s.port);
  HttpExecutor exec(target(s.port));
  std::ostringstream transcript;
  exec.setTranscript(&transcript);
  exec.perform(Action::formSubmit("POST", base + "/go", {}));
  std::istringstream in(transcript.str());
  std::string line;
  std::vector<nlohmann::json> lines;
  while (std::getline(in, line)) lines.push_back(nlohmann::json::parse(line));
  REQUIRE(lines.size() == 2);
  CHECK(lines[0]["status"] == 302);
  CHECK(lines[1]["status"] == 200);
}

TEST_CASE("recording executor") {
  auto a = Action::request("GET", "https://h/x?b=1&a=2");
  auto b = Action::formSubmit("POST", "https://h/x", {{"k", "v"}});
  RecordingExecutor rec;
  auto out = rec.execute(seqOf({a, b, a}));
  CHECK(out.pages.size() == 3);
  CHECK(out.pages[0].status == 200);
  CHECK(rec.executions() == 1);
  CHECK(rec.log().size() == 3);
  CHECK(recordRequests(seqOf({a, b, a})).size() == 2);
  CHECK(fingerprintOf(a) == fingerprintOf(Action::request("GET", "https://h/x?a=2&b=1")));
  CHECK_FALSE(fingerprintOf(a) == fingerprintOf(b));

  EchoServer s("sec");
  HttpExecutor http(target(s.port));
  RecordingExecutor wrapped(&http);
  auto p = wrapped.execute(seqOf({Action::request("GET", "https://127.0.0.1:" + std::to_string(s.port) + "/y")}));
  CHECK(fields(p.pages[0].body)[0] == "sec");
}
