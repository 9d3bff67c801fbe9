// Minimal extraction from server-rendered HTML: anchors, forms and
// resource references. Not a general HTML parser.

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace smrlmt {

struct HtmlAnchor {
  std::string href;
  std::size_t ordinal = 0;  // 1-based among <a> elements
};

struct HtmlField {
  std::string name;
  std::string type = "text";  // lowercased input type; "textarea" and "select" for those elements
  std::string value;
  bool checked = false;
};

struct HtmlForm {
  std::string action;  // as written, may be empty
  std::string method = "GET";
  std::string name;
  std::string id;
  std::vector<HtmlField> fields;
  std::size_t ordinal = 0;  // 1-based among <form> elements
};

struct HtmlDocument {
  std::vector<HtmlAnchor> anchors;
  std::vector<HtmlForm> forms;
  std::vector<std::string> resources;  // img/script src, link href
};

HtmlDocument parseHtml(std::string_view html);

/// Decodes the handful of named and numeric entities seen in attributes.
std::string decodeEntities(std::string_view s);

}  // namespace smrlmt
