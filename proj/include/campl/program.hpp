#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "campl/ast.hpp"

namespace campl {

CommandKind command_kind(const Command& cmd);

/// Removes `on ch do` sugar: nested commands are spliced into the enclosing
/// sequence with their channel filled in.
Program elaborate(const Program& program);
Body elaborate(const Body& body);

/// Channel names a body mentions without binding them first.
std::set<std::string> free_channels(const Body& body);

/// How a plug branch holds a channel, judged from the call/use arguments
/// the branch passes it to.
enum class BranchEnd { Unfixed, Output, Input, Unpolarized };

BranchEnd branch_end(const Body& branch, const std::string& chan);

struct PluggedChannel {
  std::string name;
  /// Branch indices mentioning the channel, ascending.
  std::vector<std::size_t> branches;
  std::vector<BranchEnd> ends;
  /// Chosen holders of each end; unset when fewer than two branches use it.
  std::optional<std::size_t> output_branch;
  std::optional<std::size_t> input_branch;
  /// Both branches fixed the same end.
  bool conflict = false;
};

/// The partition a `plug` performs over the enclosing live channels, plus
/// the fresh channels it creates.
struct PlugLayout {
  /// Enclosing channels handed to each branch.
  std::vector<std::vector<std::string>> slices;
  std::vector<PluggedChannel> plugged;
  /// Enclosing channels no branch mentions.
  std::vector<std::string> dropped;
  /// Enclosing channels mentioned by more than one branch (given to the first).
  std::vector<std::string> shared;
};

PlugLayout layout_plug(const PlugCmd& plug, const std::set<std::string>& live);

/// Splits the enclosing live channels (minus the forked one) between the
/// two branches of a fork by the names each branch mentions.
struct ForkLayout {
  std::vector<std::string> first;
  std::vector<std::string> second;
  std::vector<std::string> dropped;
  std::vector<std::string> shared;
};

ForkLayout layout_fork(const ForkCmd& fork, const std::set<std::string>& live);

}  // namespace campl
