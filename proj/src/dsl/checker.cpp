#include "smrlmt/dsl/checker.hpp"

#include <map>
#include <set>

#include "smrlmt/dsl/library.hpp"

namespace smrlmt::dsl {

namespace {

struct VarInfo {
  Type type;
  bool designator = false;  // bound to a data-function call
};

class Checker {
 public:
  std::vector<Diagnostic> run(const RelationAst& ast) {
    scopes_.emplace_back();
    body(ast.body);
    return std::move(diags_);
  }

 private:
  void error(SourcePos pos, std::string msg) { diags_.push_back({pos, Severity::Error, std::move(msg)}); }

  const VarInfo* lookup(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
      if (auto f = it->find(name); f != it->end()) return &f->second;
    return nullptr;
  }

  void body(const std::vector<Statement>& stmts) {
    for (const auto& st : stmts) statement(st);
  }

  void statement(const Statement& st) {
    if (auto f = std::get_if<ForLoop>(&st.node)) {
      Type it = expr(f->iterable);
      Type elem{Kind::Any};
      if (it.kind == Kind::List) elem = {it.elem};
      else if (it.kind == Kind::Range) elem = {Kind::Int};
      else if (it.kind != Kind::Any) error(f->iterable.pos, "for loop needs a list or range, got " + describe(it));
      scopes_.emplace_back();
      scopes_.back()[f->var] = {elem, false};
      body(f->body);
      scopes_.pop_back();
    } else if (auto v = std::get_if<VarDecl>(&st.node)) {
      Type t = expr(v->init);
      bool designator = std::holds_alternative<DataFnExpr>(v->init.node);
      if (scopes_.back().count(v->name)) error(st.pos, "variable " + v->name + " already declared");
      scopes_.back()[v->name] = {t, designator};
    } else {
      const auto& e = std::get<ExprStmt>(st.node).expr;
      Type t = expr(e);
      if (t.kind != Kind::Bool && t.kind != Kind::Any)
        error(e.pos, "metamorphic expression must be boolean, got " + describe(t));
    }
  }

  static bool accepts(Kind param, const Type& arg) {
    return param == Kind::Any || arg.kind == Kind::Any || param == arg.kind;
  }

  Type call(const Expr& e, const std::string& name, const std::vector<Expr>& args) {
    std::vector<Type> types;
    for (const auto& a : args) types.push_back(expr(a));
    const FunctionSig* sig = findFunction(name);
    if (!sig) {
      error(e.pos, "unresolved function " + name);
      return {};
    }
    if (name == "RandomValue") {
      Kind k;
      const auto* lit = args.size() == 1 ? std::get_if<StringLit>(&args[0].node) : nullptr;
      if (!lit || !randomValueType(lit->value, k)) {
        error(e.pos, "RandomValue expects one of \"int\", \"string\", \"boolean\"");
        return {};
      }
      return {k};
    }
    std::set<std::size_t> arities;
    for (const auto& ov : sig->overloads) arities.insert(ov.params.size());
    if (!arities.count(args.size())) {
      std::string expected;
      for (auto n : arities) expected += (expected.empty() ? "" : " or ") + std::to_string(n);
      error(e.pos, name + " expects " + expected + " argument" + (expected == "1" ? "" : "s") + ", got " +
                       std::to_string(args.size()));
      return sig->overloads.front().result;
    }
    const Overload* mismatch = nullptr;
    for (const auto& ov : sig->overloads) {
      if (ov.params.size() != args.size()) continue;
      bool ok = true;
      for (std::size_t i = 0; i < args.size(); ++i) ok = ok && accepts(ov.params[i], types[i]);
      if (ok) return ov.result;
      if (!mismatch) mismatch = &ov;
    }
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (!accepts(mismatch->params[i], types[i])) {
        error(args[i].pos, "argument " + std::to_string(i + 1) + " of " + name + " must be " +
                               std::string(toString(mismatch->params[i])) + ", got " + describe(types[i]));
      }
    }
    return mismatch->result;
  }

  bool isDesignator(const Expr& e) const {
    if (std::holds_alternative<DataFnExpr>(e.node)) return true;
    if (auto v = std::get_if<VarRef>(&e.node)) {
      const VarInfo* info = lookup(v->name);
      return info && info->designator;
    }
    return false;
  }

  Type metaOp(const Expr& e, const MetaOpExpr& m) {
    std::vector<Type> types;
    for (const auto& a : m.args) types.push_back(expr(a));
    const std::string name(toString(m.op));
    auto arity = [&](std::size_t lo, std::size_t hi) {
      if (m.args.size() < lo || m.args.size() > hi) {
        std::string want = lo == hi ? std::to_string(lo) : "at least " + std::to_string(lo);
        error(e.pos, name + " expects " + want + " argument" + (lo == 1 && hi == 1 ? "" : "s") + ", got " +
                         std::to_string(m.args.size()));
        return false;
      }
      return true;
    };
    constexpr std::size_t many = static_cast<std::size_t>(-1);
    switch (m.op) {
      case MetaOp::True:
      case MetaOp::False:
        arity(0, 0);
        break;
      case MetaOp::Not:
        arity(1, 1);
        break;
      case MetaOp::Implies:
        arity(2, 2);
        break;
      case MetaOp::And:
      case MetaOp::Or:
        arity(2, many);
        break;
      case MetaOp::Equal:
        if (arity(2, 2)) {
          if (!isDesignator(m.args[0])) error(m.args[0].pos, "EQUAL target must be an input designator");
          if (!(types[0].kind == Kind::Any || types[1].kind == Kind::Any || types[0].kind == types[1].kind))
            error(e.pos, "EQUAL compares " + describe(types[0]) + " with " + describe(types[1]));
        }
        return {Kind::Bool};
    }
    for (std::size_t i = 0; i < m.args.size(); ++i)
      if (!accepts(Kind::Bool, types[i]))
        error(m.args[i].pos, name + " argument " + std::to_string(i + 1) + " must be boolean, got " + describe(types[i]));
    return {Kind::Bool};
  }

  Type expr(const Expr& e) {
    return std::visit(
        [&](const auto& n) -> Type {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, IntLit>) {
            return {Kind::Int};
          } else if constexpr (std::is_same_v<N, StringLit>) {
            return {Kind::String};
          } else if constexpr (std::is_same_v<N, BoolLit>) {
            return {Kind::Bool};
          } else if constexpr (std::is_same_v<N, VarRef>) {
            if (const VarInfo* v = lookup(n.name)) return v->type;
            error(e.pos, "unresolved variable " + n.name);
            return {};
          } else if constexpr (std::is_same_v<N, CallExpr> || std::is_same_v<N, DataFnExpr>) {
            return call(e, n.name, n.args);
          } else if constexpr (std::is_same_v<N, MetaOpExpr>) {
            return metaOp(e, n);
          } else if constexpr (std::is_same_v<N, CompareExpr>) {
            Type l = expr(*n.lhs), r = expr(*n.rhs);
            if (n.op == CompareOp::Eq || n.op == CompareOp::Ne) {
              if (l.kind != Kind::Any && r.kind != Kind::Any && l.kind != r.kind)
                error(e.pos, "cannot compare " + describe(l) + " with " + describe(r));
            } else if (!accepts(Kind::Int, l) || !accepts(Kind::Int, r)) {
              error(e.pos, "ordering comparison needs int operands");
            }
            return {Kind::Bool};
          } else if constexpr (std::is_same_v<N, ArithExpr>) {
            Type l = expr(*n.lhs), r = expr(*n.rhs);
            if (!accepts(Kind::Int, l) || !accepts(Kind::Int, r)) error(e.pos, "arithmetic needs int operands");
            return {Kind::Int};
          } else if constexpr (std::is_same_v<N, RangeExpr>) {
            Type l = expr(*n.lo), r = expr(*n.hi);
            if (!accepts(Kind::Int, l) || !accepts(Kind::Int, r)) error(e.pos, "range bounds must be int");
            return {Kind::Range};
          } else {
            Type obj = expr(*n.object);
            if (obj.kind == Kind::Any) return {};
            if (const FieldSig* f = findField(obj.kind, n.field)) return f->result;
            error(e.pos, "unknown field ." + n.field + " on " + describe(obj));
            return {};
          }
        },
        e.node);
  }

  std::vector<std::map<std::string, VarInfo>> scopes_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

std::vector<Diagnostic> diagnose(const RelationAst& ast) { return Checker().run(ast); }

RelationAst check(const RelationAst& ast) {
  auto diags = diagnose(ast);
  if (!diags.empty()) throw SemError(std::move(diags));
  return ast;
}

std::vector<Diagnostic> diagnoseAll(const std::vector<RelationAst>& set) {
  std::vector<Diagnostic> out;
  std::set<std::string> names;
  for (const auto& r : set) {
    auto d = diagnose(r);
    out.insert(out.end(), d.begin(), d.end());
    if (!names.insert(r.qualifiedName()).second)
      out.push_back({r.pos, Severity::Error, "duplicate relation " + r.qualifiedName()});
  }
  return out;
}

}  // namespace smrlmt::dsl
