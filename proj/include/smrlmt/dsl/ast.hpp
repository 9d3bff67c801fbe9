// Syntax tree of a metamorphic relation.

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace smrlmt::dsl {

struct SourcePos {
  int line = 1;
  int col = 1;
  bool operator==(const SourcePos&) const = default;
};

/// Owning pointer with value semantics, for recursive nodes.
template <class T>
class Box {
 public:
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
  Box(const Box& o) : ptr_(std::make_unique<T>(*o.ptr_)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& o) {
    if (this != &o) ptr_ = std::make_unique<T>(*o.ptr_);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;
  ~Box() = default;

  T& operator*() { return *ptr_; }
  const T& operator*() const { return *ptr_; }
  T* operator->() { return ptr_.get(); }
  const T* operator->() const { return ptr_.get(); }

 private:
  std::unique_ptr<T> ptr_;
};

enum class MetaOp { Implies, And, Or, Not, Equal, True, False };
enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };
enum class ArithOp { Add, Sub };

std::string_view toString(MetaOp op);
std::string_view toString(CompareOp op);
std::string_view toString(ArithOp op);

/// Returns true and sets `op` when `name` is one of the seven boolean operators.
bool metaOpFromName(std::string_view name, MetaOp& op);
/// Data functions: Input, Action, Session, User, Output, HttpMethod,
/// RandomFilePath, RandomValue.
bool isDataFunctionName(std::string_view name);

struct Expr;

struct CallExpr {
  std::string name;
  std::vector<Expr> args;
};
struct MetaOpExpr {
  MetaOp op;
  std::vector<Expr> args;
};
struct DataFnExpr {
  std::string name;
  std::vector<Expr> args;
};
struct IntLit {
  std::int64_t value;
};
struct StringLit {
  std::string value;
};
struct BoolLit {
  bool value;
};
struct VarRef {
  std::string name;
};
struct CompareExpr {
  CompareOp op;
  Box<Expr> lhs;
  Box<Expr> rhs;
};
struct ArithExpr {
  ArithOp op;
  Box<Expr> lhs;
  Box<Expr> rhs;
};
struct RangeExpr {
  Box<Expr> lo;
  Box<Expr> hi;
};
struct FieldAccess {
  Box<Expr> object;
  std::string field;
};

struct Expr {
  std::variant<CallExpr, MetaOpExpr, DataFnExpr, IntLit, StringLit, BoolLit, VarRef, CompareExpr, ArithExpr,
               RangeExpr, FieldAccess>
      node;
  SourcePos pos;
};

struct Statement;

struct ForLoop {
  std::string var;
  Expr iterable;
  std::vector<Statement> body;
};
struct VarDecl {
  std::string name;
  Expr init;
};
struct ExprStmt {
  Expr expr;
};

struct Statement {
  std::variant<ForLoop, VarDecl, ExprStmt> node;
  SourcePos pos;
};

struct RelationAst {
  std::string package;
  std::vector<std::string> imports;
  std::string name;
  std::vector<Statement> body;
  SourcePos pos;

  std::string qualifiedName() const { return package.empty() ? name : package + "." + name; }
};

/// Structural equality that ignores source positions.
bool sameStructure(const Expr& a, const Expr& b);
bool sameStructure(const Statement& a, const Statement& b);
bool sameStructure(const RelationAst& a, const RelationAst& b);

/// Renders source text that parses back to a structurally equal tree.
std::string print(const Expr& e);
std::string print(const RelationAst& r);

}  // namespace smrlmt::dsl
