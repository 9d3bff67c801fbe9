#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "smrlmt/pool.hpp"

using namespace smrlmt;
namespace fs = std::filesystem;

namespace {

DataPool samplePool() {
  DataPool p;
  p.users = {{"alice", "alice", "pw", "admin"}, {"bob", "bob", "pw2", ""}};
  auto login = Action::formSubmit("POST", "https://h/login", {{"username", "alice"}, {"password", "pw"}});
  login.is_login = true;
  login.user = "alice";
  auto jobs = Action::request("GET", "https://h/jobs?page=2");
  jobs.user = "alice";
  jobs.session = {"sid1", std::string("alice")};
  StateGraph g;
  g.root = "alice-s0";
  g.states = {{"alice-s0", "<html>root</html>", "alice", "https://h/", {}},
              {"alice-s1", "<html>jobs</html>", "alice", "https://h/jobs", {"https://h/logo.png"}}};
  g.edges = {{"alice-s0", login, "alice-s1"}, {"alice-s1", jobs, "alice-s1"}};
  p.graphs["alice"] = g;
  p.inputs.push_back({"alice-1", {login, jobs}, Provenance::Crawled, std::nullopt});
  Page page{"<html>jobs</html>", 200, "sid1", "text/html", "https://h/jobs"};
  Page same = page;  // identical bodies share one stored file
  p.outputs.push_back({"alice", {"alice-1", {page, same}}});
  return p;
}

fs::path scratch(const char* name) {
  auto d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("pool: save and load round trip") {
  auto dir = scratch("smrlmt_pool_rt");
  auto p = samplePool();
  savePool(p, dir);
  CHECK(fs::exists(dir / "users.json"));
  CHECK(fs::exists(dir / "graph.json"));
  CHECK(fs::exists(dir / "inputs.json"));
  CHECK(fs::exists(dir / "outputs.json"));
  std::size_t bodies = 0;
  for (auto& e : fs::directory_iterator(dir / "outputs")) bodies += e.is_regular_file();
  CHECK(bodies == 2);
  CHECK(loadPool(dir) == p);
  fs::remove_all(dir);
}

TEST_CASE("pool: never overwrites an existing pool") {
  auto dir = scratch("smrlmt_pool_ow");
  savePool(samplePool(), dir);
  CHECK_THROWS_AS(savePool(samplePool(), dir), PoolError);
  fs::remove_all(dir);
}

TEST_CASE("pool: malformed directories") {
  auto dir = scratch("smrlmt_pool_bad");
  CHECK_THROWS_AS(loadPool(dir), PoolError);
  savePool(samplePool(), dir);
  std::ofstream(dir / "inputs.json") << "{not json";
  CHECK_THROWS_AS(loadPool(dir), PoolError);
  fs::remove_all(dir);
  savePool(samplePool(), dir);
  std::ofstream(dir / "users.json") << R"([{"id":"a","username":"a"},{"id":"a","username":"b"}])";
  CHECK_THROWS_AS(loadPool(dir), PoolError);
  fs::remove_all(dir);
  savePool(samplePool(), dir);
  for (auto& e : fs::directory_iterator(dir / "outputs")) fs::remove(e.path());
  CHECK_THROWS_AS(loadPool(dir), PoolError);
  fs::remove_all(dir);
}

TEST_CASE("pool: lookups") {
  auto p = samplePool();
  CHECK(p.findUser("bob") != nullptr);
  CHECK(p.findInput("alice-1") != nullptr);
  CHECK(p.findInput("nope") == nullptr);
  auto urls = p.reachableUrls("alice");
  CHECK(urls == std::set<std::string>{"/login", "/jobs?page=2"});
  CHECK(p.reachableUrls("bob").empty());
  CHECK(p.pagesOf("alice").size() == 2);
}

TEST_CASE("reachabilityKey ignores origin and query order") {
  CHECK(reachabilityKey("https://a:1/x?b=2&a=1") == reachabilityKey("http://b/x?a=1&b=2"));
  CHECK(reachabilityKey("https://a/x") != reachabilityKey("https://a/y"));
}
