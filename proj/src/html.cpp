#include "smrlmt/html.hpp"

#include <cctype>

namespace smrlmt {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

struct Tag {
  std::string name;  // lowercased, "/form" for closing tags
  std::map<std::string, std::string> attrs;
  bool has(const std::string& k) const { return attrs.count(k) != 0; }
  std::string get(const std::string& k) const {
    auto it = attrs.find(k);
    return it == attrs.end() ? "" : it->second;
  }
};

class Scanner {
 public:
  explicit Scanner(std::string_view s) : s_(s) {}

  // Advances to the next tag; false at end of input.
  bool next(Tag& tag) {
    while (true) {
      auto lt = s_.find('<', i_);
      if (lt == std::string_view::npos) return false;
      i_ = lt + 1;
      if (s_.substr(lt, 4) == "<!--") {
        auto end = s_.find("-->", lt + 4);
        i_ = end == std::string_view::npos ? s_.size() : end + 3;
        continue;
      }
      if (i_ < s_.size() && (s_[i_] == '!' || s_[i_] == '?')) {
        auto gt = s_.find('>', i_);
        i_ = gt == std::string_view::npos ? s_.size() : gt + 1;
        continue;
      }
      tag = Tag{};
      std::size_t start = i_;
      if (i_ < s_.size() && s_[i_] == '/') ++i_;
      while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '-')) ++i_;
      if (i_ == start) continue;
      tag.name = lower(s_.substr(start, i_ - start));
      attributes(tag);
      if (tag.name == "script" || tag.name == "style") skipRaw(tag.name);
      return true;
    }
  }

  // Text up to the closing tag `name` (used for textarea).
  std::string textUntil(const std::string& name) {
    std::string close = "</" + name;
    std::size_t end = i_;
    while (end < s_.size()) {
      end = s_.find("</", end);
      if (end == std::string_view::npos) {
        end = s_.size();
        break;
      }
      if (lower(s_.substr(end, close.size())) == close) break;
      end += 2;
    }
    std::string text(s_.substr(i_, end - i_));
    i_ = end;
    return text;
  }

 private:
  void skipSpace() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }

  void attributes(Tag& tag) {
    while (true) {
      skipSpace();
      if (i_ >= s_.size()) return;
      if (s_[i_] == '>') {
        ++i_;
        return;
      }
      if (s_[i_] == '/') {
        ++i_;
        continue;
      }
      std::size_t start = i_;
      while (i_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[i_])) && s_[i_] != '=' &&
             s_[i_] != '>' && s_[i_] != '/')
        ++i_;
      if (i_ == start) {
        ++i_;
        continue;
      }
      std::string key = lower(s_.substr(start, i_ - start));
      skipSpace();
      std::string value;
      if (i_ < s_.size() && s_[i_] == '=') {
        ++i_;
        skipSpace();
        if (i_ < s_.size() && (s_[i_] == '"' || s_[i_] == '\'')) {
          char q = s_[i_++];
          auto end = s_.find(q, i_);
          if (end == std::string_view::npos) end = s_.size();
          value = s_.substr(i_, end - i_);
          i_ = std::min(end + 1, s_.size());
        } else {
          std::size_t vs = i_;
          while (i_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[i_])) && s_[i_] != '>') ++i_;
          value = s_.substr(vs, i_ - vs);
        }
      }
      tag.attrs.emplace(key, decodeEntities(value));
    }
  }

  void skipRaw(const std::string& name) {
    std::string close = "</" + name;
    while (i_ < s_.size()) {
      auto p = s_.find("</", i_);
      if (p == std::string_view::npos) {
        i_ = s_.size();
        return;
      }
      if (lower(s_.substr(p, close.size())) == close) {
        i_ = p;
        return;
      }
      i_ = p + 2;
    }
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

}  // namespace

std::string decodeEntities(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out += s[i];
      continue;
    }
    auto semi = s.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) {
      out += s[i];
      continue;
    }
    auto ent = s.substr(i + 1, semi - i - 1);
    if (ent == "amp") out += '&';
    else if (ent == "lt") out += '<';
    else if (ent == "gt") out += '>';
    else if (ent == "quot") out += '"';
    else if (ent == "apos") out += '\'';
    else if (!ent.empty() && ent[0] == '#') {
      long code = ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X')
                      ? std::strtol(std::string(ent.substr(2)).c_str(), nullptr, 16)
                      : std::strtol(std::string(ent.substr(1)).c_str(), nullptr, 10);
      if (code > 0 && code < 128) out += static_cast<char>(code);
      else out += '?';
    } else {
      out += s.substr(i, semi - i + 1);
    }
    i = semi;
  }
  return out;
}

HtmlDocument parseHtml(std::string_view html) {
  HtmlDocument doc;
  Scanner sc(html);
  Tag tag;
  HtmlForm* form = nullptr;
  std::size_t anchors = 0;
  while (sc.next(tag)) {
    const auto& n = tag.name;
    if (n == "a") {
      ++anchors;
      if (tag.has("href")) doc.anchors.push_back({tag.get("href"), anchors});
    } else if (n == "form") {
      HtmlForm f;
      f.action = tag.get("action");
      f.method = tag.has("method") ? tag.get("method") : "GET";
      for (auto& c : f.method) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      f.name = tag.get("name");
      f.id = tag.get("id");
      f.ordinal = doc.forms.size() + 1;
      doc.forms.push_back(std::move(f));
      form = &doc.forms.back();
    } else if (n == "/form") {
      form = nullptr;
    } else if (form && (n == "input" || n == "textarea" || n == "select" || n == "button")) {
      if (!tag.has("name")) continue;
      HtmlField field;
      field.name = tag.get("name");
      if (n == "input") {
        field.type = tag.has("type") ? lower(tag.get("type")) : "text";
        field.value = tag.get("value");
        field.checked = tag.has("checked");
      } else if (n == "textarea") {
        field.type = "textarea";
        field.value = decodeEntities(sc.textUntil("textarea"));
      } else if (n == "select") {
        field.type = "select";
        Tag opt;
        while (sc.next(opt) && opt.name != "/select") {
          if (opt.name == "option" && (field.value.empty() || opt.has("selected"))) field.value = opt.get("value");
        }
      } else {
        field.type = "submit";
        field.value = tag.get("value");
      }
      form->fields.push_back(std::move(field));
    } else if ((n == "img" || n == "script") && tag.has("src")) {
      doc.resources.push_back(tag.get("src"));
    } else if (n == "link" && tag.has("href")) {
      doc.resources.push_back(tag.get("href"));
    }
  }
  return doc;
}

}  // namespace smrlmt
