#include "smrlmt/dsl/ast.hpp"

#include <array>
#include <sstream>

namespace smrlmt::dsl {

namespace {

constexpr std::array<std::string_view, 7> kMetaOpNames = {"IMPLIES", "AND", "OR", "NOT", "EQUAL", "TRUE", "FALSE"};
constexpr std::array<std::string_view, 8> kDataFnNames = {"Input",          "Action",        "Session",   "User",
                                                          "Output",         "HttpMethod",    "RandomFilePath",
                                                          "RandomValue"};

bool sameArgs(const std::vector<Expr>& a, const std::vector<Expr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!sameStructure(a[i], b[i])) return false;
  return true;
}

bool sameBody(const std::vector<Statement>& a, const std::vector<Statement>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!sameStructure(a[i], b[i])) return false;
  return true;
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string printCall(std::string_view name, const std::vector<Expr>& args) {
  std::string out(name);
  out += "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    out += print(args[i]);
  }
  return out + ")";
}

void printBody(std::ostringstream& out, const std::vector<Statement>& body, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  for (const auto& st : body) {
    if (auto f = std::get_if<ForLoop>(&st.node)) {
      out << pad << "for (var " << f->var << " : " << print(f->iterable) << ") {\n";
      printBody(out, f->body, indent + 1);
      out << pad << "}\n";
    } else if (auto v = std::get_if<VarDecl>(&st.node)) {
      out << pad << "var " << v->name << " = " << print(v->init) << ";\n";
    } else {
      out << pad << print(std::get<ExprStmt>(st.node).expr) << ";\n";
    }
  }
}

}  // namespace

std::string_view toString(MetaOp op) { return kMetaOpNames[static_cast<std::size_t>(op)]; }

std::string_view toString(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "==";
    case CompareOp::Ne: return "!=";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "==";
}

std::string_view toString(ArithOp op) { return op == ArithOp::Add ? "+" : "-"; }

bool metaOpFromName(std::string_view name, MetaOp& op) {
  for (std::size_t i = 0; i < kMetaOpNames.size(); ++i) {
    if (kMetaOpNames[i] == name) {
      op = static_cast<MetaOp>(i);
      return true;
    }
  }
  return false;
}

bool isDataFunctionName(std::string_view name) {
  for (auto n : kDataFnNames)
    if (n == name) return true;
  return false;
}

bool sameStructure(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, CallExpr> || std::is_same_v<T, DataFnExpr>) {
          return x.name == y.name && sameArgs(x.args, y.args);
        } else if constexpr (std::is_same_v<T, MetaOpExpr>) {
          return x.op == y.op && sameArgs(x.args, y.args);
        } else if constexpr (std::is_same_v<T, IntLit> || std::is_same_v<T, StringLit> ||
                             std::is_same_v<T, BoolLit>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, VarRef>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, CompareExpr> || std::is_same_v<T, ArithExpr>) {
          return x.op == y.op && sameStructure(*x.lhs, *y.lhs) && sameStructure(*x.rhs, *y.rhs);
        } else if constexpr (std::is_same_v<T, RangeExpr>) {
          return sameStructure(*x.lo, *y.lo) && sameStructure(*x.hi, *y.hi);
        } else {
          return x.field == y.field && sameStructure(*x.object, *y.object);
        }
      },
      a.node);
}

bool sameStructure(const Statement& a, const Statement& b) {
  if (a.node.index() != b.node.index()) return false;
  if (auto f = std::get_if<ForLoop>(&a.node)) {
    const auto& g = std::get<ForLoop>(b.node);
    return f->var == g.var && sameStructure(f->iterable, g.iterable) && sameBody(f->body, g.body);
  }
  if (auto v = std::get_if<VarDecl>(&a.node)) {
    const auto& w = std::get<VarDecl>(b.node);
    return v->name == w.name && sameStructure(v->init, w.init);
  }
  return sameStructure(std::get<ExprStmt>(a.node).expr, std::get<ExprStmt>(b.node).expr);
}

bool sameStructure(const RelationAst& a, const RelationAst& b) {
  return a.package == b.package && a.imports == b.imports && a.name == b.name && sameBody(a.body, b.body);
}

std::string print(const Expr& e) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, CallExpr> || std::is_same_v<T, DataFnExpr>) {
          return printCall(x.name, x.args);
        } else if constexpr (std::is_same_v<T, MetaOpExpr>) {
          return printCall(toString(x.op), x.args);
        } else if constexpr (std::is_same_v<T, IntLit>) {
          return std::to_string(x.value);
        } else if constexpr (std::is_same_v<T, StringLit>) {
          return quote(x.value);
        } else if constexpr (std::is_same_v<T, BoolLit>) {
          return x.value ? "true" : "false";
        } else if constexpr (std::is_same_v<T, VarRef>) {
          return x.name;
        } else if constexpr (std::is_same_v<T, CompareExpr> || std::is_same_v<T, ArithExpr>) {
          return "(" + print(*x.lhs) + " " + std::string(toString(x.op)) + " " + print(*x.rhs) + ")";
        } else if constexpr (std::is_same_v<T, RangeExpr>) {
          return "(" + print(*x.lo) + " .. " + print(*x.hi) + ")";
        } else {
          return print(*x.object) + "." + x.field;
        }
      },
      e.node);
}

std::string print(const RelationAst& r) {
  std::ostringstream out;
  if (!r.package.empty()) out << "package " << r.package << ";\n";
  for (const auto& i : r.imports) out << "import " << i << ";\n";
  out << "MR " << r.name << " {\n";
  printBody(out, r.body, 1);
  out << "}\n";
  return out.str();
}

}  // namespace smrlmt::dsl
