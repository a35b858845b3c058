#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "campl/types.hpp"

namespace campl {

enum class DiagKind {
  LexError,
  ParseError,
  PolarityViolation,
  IllegalCommand,
  LinearityDrop,
  LinearityReuse,
  PlugCycle,
  PlugPolarityMismatch,
  HandleUnknown,
  HandleDuplicate,
  RaceArmNotReceiving,
  HaltNotLast,
  SeqMismatch,
  UnificationFailure,
  ArityMismatch,
  UnknownName,
  DuplicateDefinition,
  Warning,
};

std::string_view to_string(DiagKind k);

struct Diagnostic {
  DiagKind kind = DiagKind::ParseError;
  SourcePos pos;
  std::string message;
  /// Offending channel and its rendered type, when there is one.
  std::string channel;
  std::string type;
};

/// `file:line:col: KIND: message`
std::string format_text(const Diagnostic& d, std::string_view file);
/// One JSON object, no trailing newline.
std::string format_json(const Diagnostic& d, std::string_view file);

/// Stable sort by line, then column.
void sort_by_position(std::vector<Diagnostic>& diags);

}  // namespace campl
