#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "campl/ast.hpp"
#include "campl/diagnostics.hpp"
#include "campl/lexer.hpp"

namespace campl {

struct ParseResult {
  SourceProgram program;
  std::vector<Diagnostic> errors;

  bool ok() const { return errors.empty(); }
};

/// Errors inside a declaration skip to the next top-level declaration, so
/// one call can report several.
ParseResult parse_program(const std::vector<Token>& tokens);

/// tokenize + parse_program; a lexical error becomes a single LexError
/// diagnostic.
ParseResult parse_source(std::string_view source);

/// Canonical text that re-parses to an equal program.
std::string roundtrip_print(const SourceProgram& program);

/// Style warnings, e.g. `run` not being the last process defined.
std::vector<Diagnostic> lint_program(const SourceProgram& program);

}  // namespace campl
