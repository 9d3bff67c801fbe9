#include <doctest.h>

#include <map>

#include "smrlmt/collector.hpp"
#include "smrlmt/fixture.hpp"

using namespace smrlmt;

namespace {

// Serves fixed bodies by path.
struct FakeSite : Executor {
  std::map<std::string, std::string> pages;
  std::size_t requests = 0;
  OutputSequence execute(const InputSequence& seq, bool) override {
    OutputSequence out{seq.id, {}};
    for (const auto& a : seq.actions) {
      ++requests;
      auto path = Url::parse(a.url).path;
      auto it = pages.find(path);
      if (it == pages.end()) out.pages.push_back(Page{"not found", 404, "", "text/plain", a.url});
      else out.pages.push_back(Page{it->second, 200, "", "text/html", a.url});
    }
    return out;
  }
};

TargetConfig fakeTarget() {
  TargetConfig cfg;
  cfg.base_url = "https://site/";
  cfg.users = {{"u", "u", "upw", "user"}};
  return cfg;
}

std::string pad(std::string s, std::size_t n, char c = '.') {
  s.resize(n, c);
  return s;
}

GraphState state(const std::string& id) {
  GraphState s;
  s.id = id;
  return s;
}

GraphEdge edge(const std::string& from, const std::string& path, const std::string& to) {
  return {from, Action::request("GET", "https://h" + path), to};
}

std::vector<std::string> paths(const InputSequence& s) {
  std::vector<std::string> out;
  for (const auto& a : s.actions) out.push_back(Url::parse(a.url).path);
  return out;
}

}  // namespace

TEST_CASE("a 100-byte page with 6 edits is a new state, with 5 it is not") {
  const std::string root = pad("<a href=\"/a\">a</a>", 100);
  REQUIRE(root.size() == 100);
  for (int edits : {5, 6}) {
    CAPTURE(edits);
    std::string other = root;
    for (int i = 0; i < edits; ++i) other[99 - i] = 'x';
    FakeSite site;
    site.pages = {{"/", root}, {"/a", other}};
    auto g = crawl(fakeTarget(), fakeTarget().users[0], site, std::chrono::seconds(5));
    CHECK(g.states.size() == (edits == 6 ? 2u : 1u));
    CHECK(g.edges.size() == (edits == 6 ? 1u : 0u));  // self-loops are dropped
  }
}

TEST_CASE("crawl follows links and forms and records replay-able edges") {
  FakeSite site;
  site.pages = {
      {"/", pad("<h1>start</h1><a href=\"/b\">b</a><a href=\"https://elsewhere/x\">x</a>"
                "<form action=\"/find\"><input name=\"q\"></form>", 200)},
      {"/b", pad("<h1>bravo</h1><a href=\"/\">back</a><a href=\"mailto:a@b\">m</a>", 200, '-')},
      {"/find", pad("<h1>results</h1>", 200, '#')},
  };
  auto cfg = fakeTarget();
  auto g = crawl(cfg, cfg.users[0], site, std::chrono::seconds(5));
  REQUIRE(g.states.size() == 3);
  CHECK(g.root == "u-s0");
  CHECK(g.states[1].id == "u-s1");
  // root->b, root->find, b->root
  REQUIRE(g.edges.size() == 3);
  CHECK(g.edges[0].action.element_locator == std::optional<std::string>("//a[1]"));
  CHECK(g.edges[1].action.element_locator == std::optional<std::string>("//form[1]"));
  CHECK(g.edges[1].action.form_data == ParamList{{"q", "test"}});
  CHECK(g.edges[2].to == "u-s0");
  for (const auto& e : g.edges) CHECK(e.action.user == std::optional<std::string>("u"));

  auto inputs = deriveInputs(g, "u");
  REQUIRE(inputs.size() == 2);
  CHECK(inputs[0].id == "u-1");
  CHECK(paths(inputs[0]) == std::vector<std::string>{"/b", "/"});
  CHECK(paths(inputs[1]) == std::vector<std::string>{"/find"});
}

TEST_CASE("crawl errors") {
  struct Dead : Executor {
    OutputSequence execute(const InputSequence& seq, bool) override {
      return {seq.id, std::vector<Page>(seq.actions.size(), Page{"", 0, "", "", ""})};
    }
  } dead;
  auto cfg = fakeTarget();
  CHECK_THROWS_AS(crawl(cfg, cfg.users[0], dead, std::chrono::seconds(1)), CrawlError);
  cfg.base_url = "not a url";
  FakeSite site;
  CHECK_THROWS_AS(crawl(cfg, cfg.users[0], site, std::chrono::seconds(1)), CrawlError);
}

TEST_CASE("deriveInputs: root-to-leaf paths, cycles end a path") {
  StateGraph g;
  g.root = "r";
  g.states = {state("r"), state("a"), state("b"), state("c")};
  g.edges = {edge("r", "/a", "a"), edge("r", "/b", "b"), edge("a", "/c", "c"), edge("c", "/r", "r"),
             edge("b", "/b2", "b"), edge("a", "/b", "b")};
  auto in = deriveInputs(g, "x");
  std::vector<std::vector<std::string>> got;
  for (const auto& s : in) got.push_back(paths(s));
  // b has only a self-loop, which ends the path
  std::vector<std::vector<std::string>> want = {
      {"/a", "/c", "/r"}, {"/a", "/b", "/b2"}, {"/b", "/b2"}};
  CHECK(got == want);
  CHECK(in[2].id == "x-3");
  CHECK(deriveInputs(g, "x", 2).size() == 2);
  CHECK(deriveInputs(StateGraph{}, "x").empty());
  StateGraph lone;
  lone.root = "r";
  lone.states = {state("r")};
  CHECK(deriveInputs(lone, "x").empty());
}

TEST_CASE("scripts") {
  auto cfg = fakeTarget();
  auto s = ingestScript("# sign in\nvisit /login\nfill username=admin password=adminpw; submit\n"
                        "header X-Trace: 1\nclick /home?tab=2\n",
                        cfg, "script-1");
  CHECK(s.id == "script-1");
  CHECK((s.provenance == Provenance::Script));
  REQUIRE(s.actions.size() == 3);
  CHECK(s.actions[0].fullUrl() == "https://site/login");
  CHECK(s.actions[1].method == "POST");
  CHECK(s.actions[1].url == "https://site/login");
  CHECK(s.actions[1].form_data == ParamList{{"username", "admin"}, {"password", "adminpw"}});
  CHECK(s.actions[2].query_params == ParamList{{"tab", "2"}});
  CHECK(s.actions[2].headers == ParamList{{"X-Trace", "1"}});
  CHECK(s.actions[0].headers.empty());

  auto err = [&](const std::string& text) -> std::string {
    try {
      ingestScript(text, cfg, "s");
    } catch (const ScriptParseError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(err("") == "line 1: script has no actions");
  CHECK(err("# only\n") == "line 1: script has no actions");
  CHECK(err("visit /\nx /y") == "line 2: unknown verb 'x'");
  CHECK(err("visit /\nfill a=1") == "line 2: fill without a following submit");
  CHECK(err("fill a") == "line 1: fill expects name=value, got 'a'");
  CHECK(err("submit") == "line 1: submit without a visited page or target");
  CHECK(err("visit") == "line 1: visit needs a target");
  CHECK(err("header nocolon") == "line 1: header expects <name>: <value>");
}

TEST_CASE("form classification and submission") {
  auto cfg = fakeTarget();
  HtmlForm login;
  login.action = "/login";
  login.method = "POST";
  login.fields = {{"user", "text", "", false}, {"pw", "password", "", false}, {"go", "submit", "Sign in", false}};
  auto page = Url::parse("https://site/login");
  CHECK(looksLikeLogin(login, "https://site/login", cfg));
  CHECK_FALSE(looksLikeSignup(login, "https://site/login", cfg));
  auto a = formAction(login, page, &cfg.users[0], cfg);
  CHECK(a.is_login);
  CHECK(a.form_data == ParamList{{"user", "u"}, {"pw", "upw"}, {"go", "Sign in"}});
  auto anon = formAction(login, page, nullptr, cfg);
  CHECK(anon.form_data == ParamList{{"user", "test"}, {"pw", "test"}, {"go", "Sign in"}});

  HtmlForm signup = login;
  signup.action = "/signup";
  CHECK(looksLikeSignup(signup, "https://site/signup", cfg));
  CHECK_FALSE(looksLikeLogin(signup, "https://site/signup", cfg));
  auto sa = formAction(signup, page, &cfg.users[0], cfg);
  CHECK(sa.is_signup);
  CHECK(sa.form_data.at(1).second == "test");  // never the user's password

  HtmlForm search;
  search.fields = {{"q", "text", "", false}};
  CHECK_FALSE(looksLikeLogin(search, "https://site/login", cfg));
}

TEST_CASE("collect from the fixture: states per role") {
  FixtureServer server(FixtureOptions::all());
  server.start();
  auto cfg = server.targetConfig();
  auto pool = collect(cfg, [&] { return std::make_unique<HttpExecutor>(cfg); });
  REQUIRE(pool.graphs.size() == 3);
  CHECK(pool.graphs.at("admin").states.size() == 13);
  CHECK(pool.graphs.at("devel").states.size() == 8);
  CHECK(pool.graphs.at("tester").states.size() == 8);
  CHECK(pool.graphs.at("admin").edges.size() == 19);
  CHECK(pool.inputs.size() == 20);
  CHECK(pool.outputs.size() == pool.inputs.size());
  bool start_slave = false;
  for (const auto& s : pool.inputs)
    for (const auto& a : s.actions) start_slave |= a.url.find("/admin/startSlave") != std::string::npos;
  CHECK(start_slave);

  // patched, same structure
  FixtureServer patched;
  patched.start();
  auto pcfg = patched.targetConfig();
  auto ppool = collect(pcfg, [&] { return std::make_unique<HttpExecutor>(pcfg); });
  CHECK(ppool.graphs.at("admin").states.size() == 13);
  CHECK(ppool.inputs.size() == 20);
}
