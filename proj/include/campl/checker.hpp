#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "campl/ast.hpp"
#include "campl/diagnostics.hpp"
#include "campl/types.hpp"

namespace campl {

/// One command's use of one channel end.
struct ChannelAnnotation {
  SourcePos pos;
  std::string proc;
  std::string channel;
  /// The channel's type just before the command.
  ChanType type;
  Polarity polarity;
  CommandKind command;
};

/// A channel created by `plug`.
struct PlugAnnotation {
  SourcePos pos;
  std::string proc;
  std::string channel;
  ChanType type;
};

/// How an hcase, race or fork divided the live channels among its arms.
/// `consumed[i]` is the subset of `available` that arm i used up.
struct PartitionAnnotation {
  SourcePos pos;
  std::string proc;
  CommandKind command;
  std::set<std::string> available;
  std::vector<std::set<std::string>> consumed;
};

struct TypedProgram {
  /// On-blocks expanded and implicit channels filled in.
  Program program;
  std::map<std::string, ProcSignature> signatures;
  /// User declarations plus Console, with protocol names resolved.
  std::map<std::string, ProtocolDecl> protocols;
  std::vector<ChannelAnnotation> channels;
  std::vector<PlugAnnotation> plugs;
  std::vector<PartitionAnnotation> partitions;

  const ProcSignature* signature(const std::string& proc) const;
  /// Type of a channel plugged inside `proc`, if there is exactly one such.
  std::optional<ChanType> plugged_type(const std::string& proc, const std::string& channel) const;
};

struct CheckResult {
  std::optional<TypedProgram> program;
  /// Sorted by position.
  std::vector<Diagnostic> errors;

  bool ok() const { return errors.empty(); }
};

/// Whole-program check with inference for procs lacking a signature.
/// Errors accumulate across procs; a command that fails stops checking
/// of the rest of its body.
CheckResult check_program(const SourceProgram& program);

}  // namespace campl
