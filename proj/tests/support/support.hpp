#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "campl/ast.hpp"
#include "campl/checker.hpp"
#include "campl/machine.hpp"
#include "campl/topology.hpp"

namespace campl::testing {

std::string corpus_file(const std::string& stem);
std::string read_file(const std::string& path);
std::vector<std::string> corpus_stems();

/// Parses or throws with the first diagnostic.
SourceProgram parse_ok(const std::string& source);

struct RunSummary {
  Outcome outcome;
  /// Formatted trace lines.
  std::vector<std::string> trace;
  std::vector<std::string> winners;
};

RunSummary run_source(const std::string& source, std::uint64_t seed = 0,
                      std::vector<std::string> script = {});

/// Union-find oracle: true when the edge set has no cycle (parallel edges
/// and self-loops count as cycles).
bool is_forest(const Topology& t);

/// Every live channel end is owned or closed, and every channel a process
/// holds exists with that process as its owner. Returns a complaint.
std::optional<std::string> ends_conserved(const Machine& m);

/// A randomly generated program that should check and run to Done: a tree
/// of processes plugged by `run`, each talking over its channels in a
/// random interleaving, with occasional fork/split.
struct RandomProgram {
  std::string source;
  int processes = 0;
  int channels = 0;
  int max_depth = 0;
};

RandomProgram random_program(std::mt19937_64& rng);

/// Hand unification of one channel from its two endpoints' command lists:
/// step i pairs the output holder's i-th command on the channel with the
/// input holder's. Understands put/get of literals and received variables
/// and a final close/halt; anything else yields nothing.
std::optional<ChanType> hand_unify(const Body& output_side, const std::string& output_chan,
                                   const Body& input_side, const std::string& input_chan);

}  // namespace campl::testing
