#include "smrlmt/dsl/lexer.hpp"

#include <cctype>
#include <map>

namespace smrlmt::dsl {

std::string_view toString(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::String: return "string";
    case Tok::Package: return "'package'";
    case Tok::Import: return "'import'";
    case Tok::Mr: return "'MR'";
    case Tok::For: return "'for'";
    case Tok::Var: return "'var'";
    case Tok::True: return "'true'";
    case Tok::False: return "'false'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Dot: return "'.'";
    case Tok::DotDot: return "'..'";
    case Tok::Assign: return "'='";
    case Tok::EqEq: return "'=='";
    case Tok::NotEq: return "'!='";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::End: return "end of input";
  }
  return "?";
}

std::string format(const Diagnostic& d, std::string_view file) {
  return std::string(file) + ":" + std::to_string(d.pos.line) + ":" + std::to_string(d.pos.col) + ": " +
         (d.severity == Severity::Error ? "error" : "warning") + ": " + d.message;
}

SemError::SemError(std::vector<Diagnostic> diags)
    : std::runtime_error(diags.empty() ? "semantic error" : diags.front().message), diagnostics(std::move(diags)) {}

std::vector<Token> tokenize(std::string_view src) {
  static const std::map<std::string, Tok, std::less<>> keywords = {
      {"package", Tok::Package}, {"import", Tok::Import}, {"MR", Tok::Mr},       {"for", Tok::For},
      {"var", Tok::Var},         {"true", Tok::True},     {"false", Tok::False}};

  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1, col = 1;
  auto advance = [&](std::size_t n = 1) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto at = [&](std::size_t k) { return i + k < src.size() ? src[i + k] : '\0'; };

  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance();
      continue;
    }
    SourcePos pos{line, col};
    if (c == '/' && at(1) == '/') {
      while (i < src.size() && src[i] != '\n') advance();
      continue;
    }
    if (c == '/' && at(1) == '*') {
      advance(2);
      while (i < src.size() && !(src[i] == '*' && at(1) == '/')) advance();
      if (i >= src.size()) throw LexError(pos, "unterminated comment");
      advance(2);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string word;
      while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) {
        word += src[i];
        advance();
      }
      auto kw = keywords.find(word);
      out.push_back({kw != keywords.end() ? kw->second : Tok::Ident, word, pos});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string digits;
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
        digits += src[i];
        advance();
      }
      if (digits.size() > 18) throw LexError(pos, "integer literal too large");
      out.push_back({Tok::Int, digits, pos});
      continue;
    }
    if (c == '"') {
      advance();
      std::string value;
      while (true) {
        if (i >= src.size() || src[i] == '\n') throw LexError(pos, "unterminated string");
        char d = src[i];
        if (d == '"') {
          advance();
          break;
        }
        if (d == '\\') {
          char e = at(1);
          switch (e) {
            case 'n': value += '\n'; break;
            case 't': value += '\t'; break;
            case '"': value += '"'; break;
            case '\\': value += '\\'; break;
            default: throw LexError({line, col}, std::string("invalid escape sequence \\") + e);
          }
          advance(2);
          continue;
        }
        value += d;
        advance();
      }
      out.push_back({Tok::String, value, pos});
      continue;
    }
    auto two = [&](char a, char b) { return c == a && at(1) == b; };
    Tok kind;
    std::size_t len = 1;
    if (two('.', '.')) kind = Tok::DotDot, len = 2;
    else if (two('=', '=')) kind = Tok::EqEq, len = 2;
    else if (two('!', '=')) kind = Tok::NotEq, len = 2;
    else if (two('<', '=')) kind = Tok::Le, len = 2;
    else if (two('>', '=')) kind = Tok::Ge, len = 2;
    else {
      switch (c) {
        case '(': kind = Tok::LParen; break;
        case ')': kind = Tok::RParen; break;
        case '{': kind = Tok::LBrace; break;
        case '}': kind = Tok::RBrace; break;
        case ',': kind = Tok::Comma; break;
        case ';': kind = Tok::Semi; break;
        case ':': kind = Tok::Colon; break;
        case '.': kind = Tok::Dot; break;
        case '=': kind = Tok::Assign; break;
        case '<': kind = Tok::Lt; break;
        case '>': kind = Tok::Gt; break;
        case '+': kind = Tok::Plus; break;
        case '-': kind = Tok::Minus; break;
        default: {
          std::string shown = std::isprint(static_cast<unsigned char>(c)) ? std::string(1, c) : "\\x" + std::to_string(static_cast<unsigned char>(c));
          throw LexError(pos, "illegal character '" + shown + "'");
        }
      }
    }
    out.push_back({kind, std::string(src.substr(i, len)), pos});
    advance(len);
  }
  out.push_back({Tok::End, "", {line, col}});
  return out;
}

}  // namespace smrlmt::dsl
