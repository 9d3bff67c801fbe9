#include <doctest.h>

#include "smrlmt/model.hpp"

using namespace smrlmt;

TEST_CASE("Url: parse and render") {
  auto u = Url::parse("HTTPS://Example.org:8443/a/b?x=1&y=2");
  CHECK(u.scheme == "https");
  CHECK(u.port == 8443);
  CHECK(u.path == "/a/b");
  CHECK(u.query == "x=1&y=2");
  CHECK(u.effectivePort() == 8443);
  CHECK(Url::parse("http://h").path == "/");
  CHECK(Url::parse("http://h").effectivePort() == 80);
  CHECK(Url::parse("https://h/").effectivePort() == 443);
  CHECK_THROWS_AS(Url::parse("ftp://h/"), std::invalid_argument);
  CHECK_THROWS_AS(Url::parse("/relative"), std::invalid_argument);
}

TEST_CASE("Url: resolve references") {
  auto base = Url::parse("http://h:1/dir/page?q=1");
  CHECK(base.resolve("other").str() == "http://h:1/dir/other");
  CHECK(base.resolve("/root").str() == "http://h:1/root");
  CHECK(base.resolve("../up").str() == "http://h:1/up");
  CHECK(base.resolve("?z=2").str() == "http://h:1/dir/page?z=2");
  CHECK(base.resolve("https://x/y").str() == "https://x/y");
}

TEST_CASE("params: encoding round trip and multiset equality") {
  ParamList p{{"path", "../../etc/passwd"}, {"q", "a b&c=d"}};
  auto enc = encodeParams(p);
  CHECK(enc == "path=../../etc/passwd&q=a+b%26c%3Dd");
  CHECK(decodeParams(enc) == p);
  CHECK(sameParams({{"a", "1"}, {"b", "2"}}, {{"b", "2"}, {"a", "1"}}));
  CHECK_FALSE(sameParams({{"a", "1"}, {"a", "1"}}, {{"a", "1"}}));
  CHECK(urlDecode("%41%2f+") == "A/ ");
}

TEST_CASE("Action: query string lives in query_params") {
  auto a = Action::request("GET", "https://h:9/download?path=docs/readme.txt");
  CHECK(a.url == "https://h:9/download");
  CHECK((a.channel == Channel::Https));
  REQUIRE(a.parameterCount() == 1);
  CHECK(a.parameter(1).second == "docs/readme.txt");
  CHECK(a.fullUrl() == "https://h:9/download?path=docs/readme.txt");
  CHECK_THROWS(a.parameter(2));
}

TEST_CASE("Action: setChannel rewrites only the scheme") {
  auto a = Action::formSubmit("POST", "https://h:9/login", {{"u", "x"}});
  a.setChannel(Channel::Http);
  CHECK(a.url == "http://h:9/login");
  CHECK((a.channel == Channel::Http));
  CHECK(a.form_data.size() == 1);
  CHECK_NOTHROW(a.validate());
}

TEST_CASE("Action: parameters are query params then form fields") {
  auto a = Action::formSubmit("POST", "http://h/f?a=1", {{"b", "2"}, {"c", "3"}});
  CHECK(a.parameterCount() == 3);
  CHECK(a.parameter(1).first == "a");
  CHECK(a.parameter(3).first == "c");
}

TEST_CASE("Action: validation") {
  Action a = Action::request("GET", "http://h/");
  a.channel = Channel::Https;
  CHECK_THROWS_AS(a.validate(), std::invalid_argument);
  a = Action::request("GET", "http://h/");
  a.is_login = a.is_signup = true;
  CHECK_THROWS_AS(a.validate(), std::invalid_argument);
  InputSequence s{"s", {}, Provenance::Crawled, std::nullopt};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.actions.push_back(Action::request("GET", "http://h/"));
  s.provenance = Provenance::FollowUp;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("Action: equality ignores parameter order") {
  auto a = Action::formSubmit("POST", "http://h/f", {{"x", "1"}, {"y", "2"}});
  auto b = Action::formSubmit("POST", "http://h/f", {{"y", "2"}, {"x", "1"}});
  CHECK(a == b);
  b.form_data[0].second = "3";
  CHECK_FALSE(a == b);
}

TEST_CASE("fingerprint: method, url, sorted params") {
  auto a = Action::formSubmit("POST", "http://h/f?z=0", {{"b", "2"}, {"a", "1"}});
  auto f = fingerprintOf(a);
  CHECK(f.method == "POST");
  CHECK(f.url == "http://h/f");
  CHECK(f.params == ParamList{{"a", "1"}, {"b", "2"}, {"z", "0"}});
}

TEST_CASE("json round trip") {
  InputSequence s{"x-1", {}, Provenance::FollowUp, std::string("x")};
  auto a = Action::formSubmit("POST", "https://h/login", {{"username", "u"}, {"password", "p"}});
  a.is_login = true;
  a.user = "u";
  a.session = Session{"sid1", std::string("u")};
  a.element_locator = "//form[1]";
  a.headers = {{"X-Test", "1"}};
  s.actions.push_back(a);
  s.actions.push_back(Action::request("GET", "https://h/home?tab=2"));
  nlohmann::json j = s;
  CHECK(j.get<InputSequence>() == s);
  User u{"id", "name", "pw", "role"};
  CHECK(nlohmann::json(u).get<User>() == u);
}

TEST_CASE("contentHash is sha256") {
  CHECK(contentHash("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(contentHash("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
