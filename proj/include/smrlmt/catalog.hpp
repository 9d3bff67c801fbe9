// Metamorphic relations shipped with the tool. Sources are embedded at build
// time from catalog/*.smrl.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "smrlmt/dsl/ast.hpp"

namespace smrlmt {

struct CatalogEntry {
  std::string name;  // e.g. OTG_AUTHZ_002
  std::string file;  // e.g. otg_authz_002.smrl
  std::string source;
};

const std::vector<CatalogEntry>& catalogEntries();
std::vector<std::string> catalogNames();

/// Parsed and checked relations keyed by relation name.
std::map<std::string, dsl::RelationAst> loadCatalog();

/// Null when `name` (relation name or file stem, any case) is unknown.
const CatalogEntry* findCatalogEntry(const std::string& name);

}  // namespace smrlmt
