#include "smrlmt/dsl/library.hpp"

namespace smrlmt::dsl {

std::string_view toString(Kind k) {
  switch (k) {
    case Kind::Bool: return "boolean";
    case Kind::Int: return "int";
    case Kind::String: return "string";
    case Kind::Input: return "Input";
    case Kind::Action: return "Action";
    case Kind::User: return "User";
    case Kind::Session: return "Session";
    case Kind::Page: return "Page";
    case Kind::Output: return "Output";
    case Kind::List: return "list";
    case Kind::Range: return "range";
    case Kind::Any: return "any";
  }
  return "?";
}

std::string describe(const Type& t) {
  if (t.kind == Kind::List) return "list of " + std::string(toString(t.elem));
  return std::string(toString(t.kind));
}

namespace {

Type T(Kind k) { return {k, Kind::Any}; }

}  // namespace

const std::vector<FunctionSig>& functionLibrary() {
  using K = Kind;
  static const std::vector<FunctionSig> lib = {
      // data functions
      {"Input", true, {{{K::Int}, T(K::Input)}}},
      {"Action", true, {{{K::Int}, T(K::Action)}}},
      {"Session", true, {{{K::Int}, T(K::Session)}}},
      {"User", true, {{{K::Int}, T(K::User)}}},
      {"Output", true, {{{K::Input}, T(K::Output)}, {{K::Input, K::Int}, T(K::Page)}}},
      {"HttpMethod", true, {{{}, T(K::String)}}},
      {"RandomFilePath", true, {{{}, T(K::String)}}},
      {"RandomValue", true, {{{K::String}, T(K::Any)}}},
      // web-specific functions
      {"changeCredentials", false, {{{K::Input, K::User}, T(K::Input)}}},
      {"copyActionTo", false, {{{K::Input, K::Int, K::Int}, T(K::Input)}}},
      {"insertAction", false, {{{K::Input, K::Int, K::Action}, T(K::Input)}}},
      {"replaceAction", false, {{{K::Input, K::Int, K::Action}, T(K::Input)}}},
      {"cannotReachThroughGUI", false, {{{K::User, K::String}, T(K::Bool)}}},
      {"isSupervisorOf", false, {{{K::User, K::User}, T(K::Bool)}}},
      {"isLogin", false, {{{K::Action}, T(K::Bool)}}},
      {"afterLogin", false, {{{K::Action}, T(K::Bool)}}},
      {"isSignup", false, {{{K::Action}, T(K::Bool)}}},
      {"isError", false, {{{K::Page}, T(K::Bool)}}},
      {"userCanRetrieveContent", false, {{{K::User, K::Page}, T(K::Bool)}, {{K::User, K::Output}, T(K::Bool)}}},
      {"setChannel", false, {{{K::Action, K::String}, T(K::Action)}}},
      {"setParameterValue", false, {{{K::Input, K::Int, K::Int, K::String}, T(K::Input)}}},
      {"parameterCount", false, {{{K::Action}, T(K::Int)}}},
      {"sessionIdOf", false, {{{K::Page}, T(K::String)}}},
  };
  return lib;
}

const FunctionSig* findFunction(std::string_view name) {
  for (const auto& f : functionLibrary())
    if (f.name == name) return &f;
  return nullptr;
}

bool isInputDesignator(std::string_view name) {
  return name == "Input" || name == "Action" || name == "Session" || name == "User";
}

const std::vector<FieldSig>& fieldLibrary() {
  using K = Kind;
  static const std::vector<FieldSig> fields = {
      {K::Input, "actions", {K::List, K::Action}},
      {K::Input, "length", T(K::Int)},
      {K::Input, "id", T(K::String)},
      {K::Action, "url", T(K::String)},
      {K::Action, "method", T(K::String)},
      {K::Action, "position", T(K::Int)},
      {K::Action, "channel", T(K::String)},
      {K::Action, "parameters", {K::List, K::String}},
      {K::Action, "user", T(K::User)},
      {K::Action, "session", T(K::Session)},
      {K::User, "id", T(K::String)},
      {K::User, "username", T(K::String)},
      {K::User, "role", T(K::String)},
      {K::Session, "id", T(K::String)},
      {K::Page, "status", T(K::Int)},
      {K::Page, "sessionId", T(K::String)},
      {K::Page, "body", T(K::String)},
      {K::Page, "url", T(K::String)},
      {K::Output, "pages", {K::List, K::Page}},
      {K::Output, "length", T(K::Int)},
      {K::String, "length", T(K::Int)},
      {K::List, "length", T(K::Int)},
  };
  return fields;
}

const FieldSig* findField(Kind object, std::string_view field) {
  for (const auto& f : fieldLibrary())
    if (f.object == object && f.field == field) return &f;
  return nullptr;
}

bool randomValueType(std::string_view name, Kind& kind) {
  if (name == "int") kind = Kind::Int;
  else if (name == "string") kind = Kind::String;
  else if (name == "boolean") kind = Kind::Bool;
  else return false;
  return true;
}

}  // namespace smrlmt::dsl
