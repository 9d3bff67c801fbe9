#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "smrlmt/dsl/ast.hpp"

namespace smrlmt::dsl {

enum class Severity { Error, Warning };

struct Diagnostic {
  SourcePos pos;
  Severity severity = Severity::Error;
  std::string message;
};

/// `file:line:col: severity: message`
std::string format(const Diagnostic& d, std::string_view file);

class LexError : public std::runtime_error {
 public:
  LexError(SourcePos pos, const std::string& msg) : std::runtime_error(msg), pos(pos) {}
  SourcePos pos;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(SourcePos pos, const std::string& msg, std::vector<std::string> expected)
      : std::runtime_error(msg), pos(pos), expected(std::move(expected)) {}
  SourcePos pos;
  std::vector<std::string> expected;
};

class SemError : public std::runtime_error {
 public:
  explicit SemError(std::vector<Diagnostic> diags);
  std::vector<Diagnostic> diagnostics;
};

}  // namespace smrlmt::dsl
