#pragma once

#include <vector>

#include "smrlmt/dsl/ast.hpp"
#include "smrlmt/dsl/diagnostics.hpp"

namespace smrlmt::dsl {

/// Static semantics: variables resolve, functions exist in the library with
/// a matching arity and argument kinds, metamorphic expressions are boolean,
/// and EQUAL targets a data function (directly or through a variable bound
/// to one).
std::vector<Diagnostic> diagnose(const RelationAst& ast);

/// Throws SemError carrying every diagnostic when `ast` is invalid.
RelationAst check(const RelationAst& ast);

/// Checks a compilation set: every relation plus uniqueness of the
/// package-qualified names.
std::vector<Diagnostic> diagnoseAll(const std::vector<RelationAst>& set);

}  // namespace smrlmt::dsl
