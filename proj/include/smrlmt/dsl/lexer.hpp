#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "smrlmt/dsl/diagnostics.hpp"

namespace smrlmt::dsl {

enum class Tok {
  Ident,
  Int,
  String,
  // keywords
  Package,
  Import,
  Mr,
  For,
  Var,
  True,
  False,
  // punctuation
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Semi,
  Colon,
  Dot,
  DotDot,
  Assign,
  EqEq,
  NotEq,
  Lt,
  Le,
  Gt,
  Ge,
  Plus,
  Minus,
  End,
};

std::string_view toString(Tok t);

struct Token {
  Tok kind;
  std::string text;  // identifier name, literal value (unescaped), or punctuation
  SourcePos pos;
};

/// Splits MR source into tokens; `//` and `/* */` comments are skipped. The
/// stream always ends with an End token. Throws LexError.
std::vector<Token> tokenize(std::string_view source);

}  // namespace smrlmt::dsl
