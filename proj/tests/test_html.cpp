#include <doctest.h>

#include "smrlmt/html.hpp"

using namespace smrlmt;

TEST_CASE("anchors keep document order and ordinals") {
  auto doc = parseHtml(R"(<p><A HREF="/one">1</A> <a name="x">no href</a> <a href='/two?a=1&amp;b=2'>2</a>
    <!-- <a href="/hidden">c</a> --> <a href=/three>3</a></p>)");
  REQUIRE(doc.anchors.size() == 3);
  CHECK(doc.anchors[0].href == "/one");
  CHECK(doc.anchors[0].ordinal == 1);
  CHECK(doc.anchors[1].href == "/two?a=1&b=2");
  CHECK(doc.anchors[1].ordinal == 3);
  CHECK(doc.anchors[2].href == "/three");
}

TEST_CASE("script bodies are not scanned") {
  auto doc = parseHtml(R"(<script src="/app.js">var s = "<a href='/nope'>";</script><a href="/yes">y</a>)");
  REQUIRE(doc.anchors.size() == 1);
  CHECK(doc.anchors[0].href == "/yes");
  CHECK(doc.resources == std::vector<std::string>{"/app.js"});
}

TEST_CASE("forms and their fields") {
  auto doc = parseHtml(R"(
    <form name="login" id="f1" action="/login" method="post">
      <input type="text" name="username">
      <input type="PASSWORD" name="password">
      <input type="hidden" name="csrf" value="t&lt;1">
      <input type="checkbox" name="remember" checked>
      <input value="no name">
      <textarea name="note">a &amp; b</textarea>
      <select name="role"><option value="x">X</option><option value="y" selected>Y</option></select>
      <button name="go" value="1">Go</button>
    </form>
    <form action="search"><input name="q"></form>)");
  REQUIRE(doc.forms.size() == 2);
  const auto& f = doc.forms[0];
  CHECK(f.method == "POST");
  CHECK(f.name == "login");
  CHECK(f.id == "f1");
  CHECK(f.ordinal == 1);
  REQUIRE(f.fields.size() == 7);
  CHECK(f.fields[1].type == "password");
  CHECK(f.fields[2].value == "t<1");
  CHECK(f.fields[3].checked);
  CHECK(f.fields[4].type == "textarea");
  CHECK(f.fields[4].value == "a & b");
  CHECK(f.fields[5].type == "select");
  CHECK(f.fields[5].value == "y");
  CHECK(f.fields[6].type == "submit");
  CHECK(doc.forms[1].method == "GET");
  CHECK(doc.forms[1].fields.at(0).type == "text");
  CHECK(doc.forms[1].ordinal == 2);
}

TEST_CASE("resources") {
  auto doc = parseHtml(R"(<link rel="stylesheet" href="/s.css"><img src="logo.png"><img alt="none">)");
  CHECK(doc.resources == std::vector<std::string>{"/s.css", "logo.png"});
}

TEST_CASE("entities") {
  CHECK(decodeEntities("a&amp;b&lt;c&gt;&quot;&apos;") == "a&b<c>\"'");
  CHECK(decodeEntities("&#65;&#x42;") == "AB");
  CHECK(decodeEntities("&nbsp;") == "&nbsp;");
  CHECK(decodeEntities("5 & 6") == "5 & 6");
}

TEST_CASE("malformed input does not throw") {
  for (const char* s : {"<", "<a href=\"/x", "<form><input name=a", "<!-- open", "<select name=s><option value=1>",
                        "</form><input name=z>", "<textarea name=t>unterminated"})
    CHECK_NOTHROW(parseHtml(s));
  CHECK(parseHtml("</form><input name=z>").forms.empty());
}
