#pragma once

#include <string_view>
#include <vector>

#include "smrlmt/dsl/ast.hpp"
#include "smrlmt/dsl/lexer.hpp"

namespace smrlmt::dsl {

/// Grammar:
///   file      := ('package' dotted ';')? ('import' dotted ';')* relation*
///   relation  := 'MR' IDENT '{' statement* '}'
///   statement := 'for' '(' 'var' IDENT ':' expr ')' ( '{' statement* '}' | statement )
///              | 'var' IDENT '=' expr ';'
///              | expr ';'
///   expr      := compare ('..' compare)?
///   compare   := additive (('=='|'!='|'<'|'<='|'>'|'>=') additive)?
///   additive  := postfix (('+'|'-') postfix)*
///   postfix   := primary ('.' IDENT)*
///   primary   := INT | STRING | 'true' | 'false' | IDENT ('(' args? ')')? | '(' expr ')'
///
/// Calls are classified by name into boolean operators, data functions and
/// library calls. Throws ParseError.
std::vector<RelationAst> parse(const std::vector<Token>& tokens);

/// tokenize + parse.
std::vector<RelationAst> parseSource(std::string_view source);

}  // namespace smrlmt::dsl
