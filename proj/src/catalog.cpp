#include "smrlmt/catalog.hpp"

#include <algorithm>
#include <cctype>

#include "smrlmt/dsl/checker.hpp"
#include "smrlmt/dsl/parser.hpp"

namespace smrlmt {

// generated from catalog/*.smrl
const std::vector<CatalogEntry>& embeddedCatalog();

const std::vector<CatalogEntry>& catalogEntries() { return embeddedCatalog(); }

std::vector<std::string> catalogNames() {
  std::vector<std::string> out;
  for (const auto& e : catalogEntries()) out.push_back(e.name);
  return out;
}

std::map<std::string, dsl::RelationAst> loadCatalog() {
  std::map<std::string, dsl::RelationAst> out;
  for (const auto& e : catalogEntries())
    for (auto& r : dsl::parseSource(e.source)) out.emplace(r.name, dsl::check(r));
  return out;
}

const CatalogEntry* findCatalogEntry(const std::string& name) {
  auto up = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    return s;
  };
  std::string key = up(name);
  if (key.size() > 5 && key.substr(key.size() - 5) == ".SMRL") key.resize(key.size() - 5);
  for (const auto& e : catalogEntries())
    if (up(e.name) == key || up(e.file.substr(0, e.file.size() - 5)) == key) return &e;
  return nullptr;
}

}  // namespace smrlmt
