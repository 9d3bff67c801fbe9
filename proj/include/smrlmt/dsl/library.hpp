// Static signatures of the data functions, library functions and field
// accessors that MR sources may use. The interpreter provides one
// implementation per entry.

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace smrlmt::dsl {

enum class Kind { Bool, Int, String, Input, Action, User, Session, Page, Output, List, Range, Any };

std::string_view toString(Kind k);

struct Type {
  Kind kind = Kind::Any;
  Kind elem = Kind::Any;  // element kind of a List

  bool operator==(const Type&) const = default;
};

std::string describe(const Type& t);

struct Overload {
  std::vector<Kind> params;
  Type result;
};

struct FunctionSig {
  std::string name;
  bool data_function = false;
  std::vector<Overload> overloads;
};

/// Every callable name, data functions first.
const std::vector<FunctionSig>& functionLibrary();
const FunctionSig* findFunction(std::string_view name);

/// Data functions that designate inputs drawn from the data pool; these can
/// be the target of EQUAL-as-assignment.
bool isInputDesignator(std::string_view data_function);

struct FieldSig {
  Kind object;
  std::string field;
  Type result;
};

const std::vector<FieldSig>& fieldLibrary();
const FieldSig* findField(Kind object, std::string_view field);

/// Types accepted by RandomValue.
bool randomValueType(std::string_view name, Kind& kind);

}  // namespace smrlmt::dsl
