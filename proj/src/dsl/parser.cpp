#include "smrlmt/dsl/parser.hpp"

#include <initializer_list>

namespace smrlmt::dsl {

namespace {

class Parser {
 public:
  explicit Parser(const std::vector<Token>& toks) : toks_(toks) {}

  std::vector<RelationAst> file() {
    std::string package;
    std::vector<std::string> imports;
    if (accept(Tok::Package)) {
      package = dotted();
      expect(Tok::Semi);
    }
    while (accept(Tok::Import)) {
      imports.push_back(dotted());
      expect(Tok::Semi);
    }
    std::vector<RelationAst> out;
    while (!at(Tok::End)) {
      if (!at(Tok::Mr)) fail({Tok::Mr, Tok::End});
      out.push_back(relation(package, imports));
    }
    return out;
  }

 private:
  const Token& peek(std::size_t k = 0) const {
    auto i = std::min(pos_ + k, toks_.size() - 1);
    return toks_[i];
  }
  bool at(Tok t) const { return peek().kind == t; }
  bool accept(Tok t) {
    if (!at(t)) return false;
    ++pos_;
    return true;
  }
  const Token& expect(Tok t) {
    if (!at(t)) fail({t});
    return toks_[pos_++];
  }

  [[noreturn]] void fail(std::initializer_list<Tok> expected) const {
    std::vector<std::string> names;
    std::string msg = "expected ";
    for (auto t : expected) {
      if (!names.empty()) msg += " or ";
      names.emplace_back(toString(t));
      msg += names.back();
    }
    failWith(msg, std::move(names));
  }

  [[noreturn]] void failWith(std::string msg, std::vector<std::string> expected) const {
    const auto& t = peek();
    msg += ", found " + (t.kind == Tok::End ? std::string("end of input") : "'" + t.text + "'");
    throw ParseError(t.pos, msg, std::move(expected));
  }

  std::string dotted() {
    std::string name = expect(Tok::Ident).text;
    while (accept(Tok::Dot)) name += "." + expect(Tok::Ident).text;
    return name;
  }

  RelationAst relation(const std::string& package, const std::vector<std::string>& imports) {
    RelationAst r;
    r.pos = expect(Tok::Mr).pos;
    r.package = package;
    r.imports = imports;
    r.name = expect(Tok::Ident).text;
    expect(Tok::LBrace);
    while (!accept(Tok::RBrace)) r.body.push_back(statement());
    return r;
  }

  Statement statement() {
    SourcePos pos = peek().pos;
    if (accept(Tok::For)) {
      expect(Tok::LParen);
      expect(Tok::Var);
      ForLoop loop{expect(Tok::Ident).text, Expr{}, {}};
      expect(Tok::Colon);
      loop.iterable = expr();
      expect(Tok::RParen);
      if (accept(Tok::LBrace)) {
        while (!accept(Tok::RBrace)) {
          if (at(Tok::End)) fail({Tok::RBrace});
          loop.body.push_back(statement());
        }
      } else {
        loop.body.push_back(statement());
      }
      return {std::move(loop), pos};
    }
    if (accept(Tok::Var)) {
      VarDecl decl{expect(Tok::Ident).text, Expr{}};
      expect(Tok::Assign);
      decl.init = expr();
      expect(Tok::Semi);
      return {std::move(decl), pos};
    }
    if (at(Tok::RBrace) || at(Tok::End)) fail({Tok::For, Tok::Var, Tok::Ident, Tok::RBrace});
    ExprStmt st{expr()};
    expect(Tok::Semi);
    return {std::move(st), pos};
  }

  Expr expr() {
    Expr lo = compare();
    if (at(Tok::DotDot)) {
      SourcePos pos = peek().pos;
      ++pos_;
      Expr hi = compare();
      return {RangeExpr{std::move(lo), std::move(hi)}, pos};
    }
    return lo;
  }

  Expr compare() {
    Expr lhs = additive();
    CompareOp op;
    switch (peek().kind) {
      case Tok::EqEq: op = CompareOp::Eq; break;
      case Tok::NotEq: op = CompareOp::Ne; break;
      case Tok::Lt: op = CompareOp::Lt; break;
      case Tok::Le: op = CompareOp::Le; break;
      case Tok::Gt: op = CompareOp::Gt; break;
      case Tok::Ge: op = CompareOp::Ge; break;
      default: return lhs;
    }
    SourcePos pos = peek().pos;
    ++pos_;
    Expr rhs = additive();
    return {CompareExpr{op, std::move(lhs), std::move(rhs)}, pos};
  }

  Expr additive() {
    Expr lhs = postfix();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      SourcePos pos = peek().pos;
      ArithOp op = at(Tok::Plus) ? ArithOp::Add : ArithOp::Sub;
      ++pos_;
      Expr rhs = postfix();
      lhs = Expr{ArithExpr{op, std::move(lhs), std::move(rhs)}, pos};
    }
    return lhs;
  }

  Expr postfix() {
    Expr e = primary();
    while (at(Tok::Dot)) {
      SourcePos pos = peek().pos;
      ++pos_;
      std::string field = expect(Tok::Ident).text;
      e = Expr{FieldAccess{std::move(e), std::move(field)}, pos};
    }
    return e;
  }

  std::vector<Expr> args() {
    std::vector<Expr> out;
    expect(Tok::LParen);
    if (accept(Tok::RParen)) return out;
    while (true) {
      out.push_back(expr());
      if (accept(Tok::RParen)) return out;
      if (!accept(Tok::Comma)) fail({Tok::Comma, Tok::RParen});
    }
  }

  Expr primary() {
    const Token& t = peek();
    SourcePos pos = t.pos;
    switch (t.kind) {
      case Tok::Int:
        ++pos_;
        return {IntLit{std::stoll(t.text)}, pos};
      case Tok::String:
        ++pos_;
        return {StringLit{t.text}, pos};
      case Tok::True:
        ++pos_;
        return {BoolLit{true}, pos};
      case Tok::False:
        ++pos_;
        return {BoolLit{false}, pos};
      case Tok::LParen: {
        ++pos_;
        Expr inner = expr();
        expect(Tok::RParen);
        return inner;
      }
      case Tok::Ident: {
        std::string name = t.text;
        ++pos_;
        if (!at(Tok::LParen)) return {VarRef{name}, pos};
        auto a = args();
        MetaOp op;
        if (metaOpFromName(name, op)) return {MetaOpExpr{op, std::move(a)}, pos};
        if (isDataFunctionName(name)) return {DataFnExpr{name, std::move(a)}, pos};
        return {CallExpr{name, std::move(a)}, pos};
      }
      default:
        failWith("expected an expression", {"expression"});
    }
  }

  const std::vector<Token>& toks_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<RelationAst> parse(const std::vector<Token>& tokens) {
  if (tokens.empty() || tokens.back().kind != Tok::End) throw ParseError({1, 1}, "token stream must end with End", {});
  return Parser(tokens).file();
}

std::vector<RelationAst> parseSource(std::string_view source) { return parse(tokenize(source)); }

}  // namespace smrlmt::dsl
