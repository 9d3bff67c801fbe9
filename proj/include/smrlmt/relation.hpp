// Executable metamorphic relations: a checked AST evaluated against one view
// of the data provider, with the data functions and web functions of the
// MR library.

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <regex>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "smrlmt/config.hpp"
#include "smrlmt/dsl/ast.hpp"
#include "smrlmt/executor.hpp"
#include "smrlmt/model.hpp"
#include "smrlmt/pool.hpp"

namespace smrlmt {

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A requested data item does not exist in the current view.
class ProviderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Action or parameter position out of range in a web function.
class IndexError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Value;

/// An action together with the sequence it belongs to, so that position
/// and afterLogin can be answered. `detached` holds a modified copy that no
/// longer lives in `seq` (e.g. the result of setChannel).
struct ActionRef {
  std::shared_ptr<const InputSequence> seq;
  std::size_t index = 0;  // 0-based
  std::shared_ptr<const Action> detached;

  const Action& action() const { return detached ? *detached : seq->actions.at(index); }
  std::int64_t position() const { return static_cast<std::int64_t>(index) + 1; }
};

struct IntRange {
  std::int64_t lo = 1;
  std::int64_t hi = 0;
};

using InputPtr = std::shared_ptr<const InputSequence>;
using PagePtr = std::shared_ptr<const Page>;
using OutputPtr = std::shared_ptr<const OutputSequence>;
using ListPtr = std::shared_ptr<const std::vector<Value>>;

struct Value {
  std::variant<std::monostate, bool, std::int64_t, std::string, InputPtr, ActionRef, User, Session, PagePtr,
               OutputPtr, ListPtr, IntRange>
      v;

  template <class T>
  bool is() const { return std::holds_alternative<T>(v); }
  template <class T>
  const T& as() const { return std::get<T>(v); }
};

/// Human-readable kind of a runtime value, for error messages.
std::string kindName(const Value& v);

/// One view of the data pools: the i-th (1-based) item of a type.
class DataView {
 public:
  virtual ~DataView() = default;
  /// Throws ProviderError when the view holds fewer than `index` items.
  virtual Value item(const std::string& type, std::int64_t index) const = 0;
};

/// Everything web functions need to know about the target besides the
/// executor: users, what each user reached while crawling, the pages each
/// user received, supervision pairs, and the page oracles.
struct WebEnvironment {
  std::vector<User> users;
  std::map<std::string, std::set<std::string>> reachable;     // user id -> reachability keys
  std::map<std::string, std::vector<std::string>> retrieved;  // user id -> page bodies
  std::vector<std::pair<std::string, std::string>> supervisors;
  std::vector<std::regex> error_patterns;
  double page_eq_threshold = 0.05;

  static WebEnvironment build(const DataPool& pool, const TargetConfig& cfg);

  const User* findUser(const std::string& id) const;
  bool isError(const Page& p) const;
  bool isSupervisorOf(const std::string& a, const std::string& b) const;
  bool canRetrieve(const std::string& user, const Page& p) const;
};

/// Compiles a `(?i)`-prefixed or plain ECMAScript pattern. Throws ConfigError.
std::regex compilePattern(const std::string& pattern);

struct ExecutionContext {
  Executor* executor = nullptr;
  const WebEnvironment* env = nullptr;
};

/// Outcome of one MR.run invocation.
struct RunResult {
  bool holds = true;
  std::vector<InputSequence> source_inputs;     // inputs fetched from the view
  std::vector<InputSequence> follow_up_inputs;  // bound by the failing expression
  std::vector<OutputSequence> outputs;          // of the inputs above that were executed
  std::size_t executions = 0;
};

class CompiledRelation {
 public:
  std::string name;
  /// Data function name -> largest index used (zero-argument functions count
  /// as index 1). Output is not an input type and never appears here.
  std::map<std::string, std::int64_t> referenced_input_types;

  RunResult run(const DataView& view, ExecutionContext& ctx) const;

  const dsl::RelationAst& ast() const { return *ast_; }

 private:
  friend CompiledRelation compile(const dsl::RelationAst& ast);
  std::shared_ptr<const dsl::RelationAst> ast_;
};

/// Expects a checked AST.
CompiledRelation compile(const dsl::RelationAst& ast);

/// Structural equality used by EQUAL when it compares: pages by edit
/// distance, outputs page by page, inputs by their actions.
bool valuesEqual(const Value& a, const Value& b, double page_threshold);

// web functions on plain model values
InputSequence changeCredentials(const InputSequence& seq, const User& user);
InputSequence copyActionTo(const InputSequence& seq, std::int64_t from, std::int64_t to);
InputSequence insertAction(const InputSequence& seq, std::int64_t pos, const Action& action);
InputSequence replaceAction(const InputSequence& seq, std::int64_t pos, const Action& action);
InputSequence setParameterValue(const InputSequence& seq, std::int64_t action_pos, std::int64_t param_pos,
                                const std::string& value);

/// RandomValue(t) for one pool draw.
Value randomValueOf(const std::string& type, std::uint64_t draw);

}  // namespace smrlmt
