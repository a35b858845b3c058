#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "campl/types.hpp"

namespace campl {

struct ProcDef;

/// The sequential fragment: literals, variables and `store`.
struct Expr {
  enum class Kind { Int, Char, String, Bool, Var, StoreName, StoreAnon };

  Kind kind = Kind::Int;
  std::int64_t int_value = 0;
  bool bool_value = false;
  /// Char/String payload, variable name or stored process name.
  std::string text;
  /// Inline process definition for `store(proc :: ... )`.
  std::shared_ptr<const ProcDef> anonymous;
  SourcePos pos;

  static Expr integer(std::int64_t v, SourcePos pos = {});
  static Expr character(char c, SourcePos pos = {});
  static Expr string(std::string s, SourcePos pos = {});
  static Expr boolean(bool b, SourcePos pos = {});
  static Expr variable(std::string name, SourcePos pos = {});
  static Expr store_name(std::string proc, SourcePos pos = {});
  static Expr store_anonymous(std::shared_ptr<const ProcDef> def, SourcePos pos = {});

  friend bool operator==(const Expr& a, const Expr& b);
};

struct Command;
using Body = std::vector<Command>;

// An empty channel name in any command means "the channel of the enclosing
// `on ch do` block"; elaboration fills it in.

/// `| ins => outs`, or `| chans` when no polarity was written.
struct ChannelLists {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<std::string> unpolarized;
  bool polarized = true;

  friend bool operator==(const ChannelLists&, const ChannelLists&) = default;
};

struct PutCmd {
  Expr value;
  std::string chan;
  friend bool operator==(const PutCmd&, const PutCmd&) = default;
};
struct GetCmd {
  std::string binder;
  std::string chan;
  friend bool operator==(const GetCmd&, const GetCmd&) = default;
};
struct HPutCmd {
  std::string handle;
  std::string chan;
  friend bool operator==(const HPutCmd&, const HPutCmd&) = default;
};
struct HCaseArm {
  std::string handle;
  Body body;
  SourcePos pos;
  friend bool operator==(const HCaseArm&, const HCaseArm&) = default;
};
struct HCaseCmd {
  std::string chan;
  std::vector<HCaseArm> arms;
  friend bool operator==(const HCaseCmd&, const HCaseCmd&) = default;
};
struct CloseCmd {
  std::string chan;
  friend bool operator==(const CloseCmd&, const CloseCmd&) = default;
};
struct HaltCmd {
  std::string chan;
  friend bool operator==(const HaltCmd&, const HaltCmd&) = default;
};
struct ForkBranch {
  std::string chan;
  Body body;
  SourcePos pos;
  friend bool operator==(const ForkBranch&, const ForkBranch&) = default;
};
struct ForkCmd {
  std::string chan;
  ForkBranch first;
  ForkBranch second;
  friend bool operator==(const ForkCmd&, const ForkCmd&) = default;
};
struct SplitCmd {
  std::string chan;
  std::string first;
  std::string second;
  friend bool operator==(const SplitCmd&, const SplitCmd&) = default;
};
struct PlugCmd {
  std::vector<Body> branches;
  friend bool operator==(const PlugCmd&, const PlugCmd&) = default;
};
struct RaceArm {
  std::string chan;
  Body body;
  SourcePos pos;
  friend bool operator==(const RaceArm&, const RaceArm&) = default;
};
struct RaceCmd {
  std::vector<RaceArm> arms;
  friend bool operator==(const RaceCmd&, const RaceCmd&) = default;
};
struct CallCmd {
  std::string proc;
  std::vector<Expr> seq_args;
  ChannelLists chans;
  friend bool operator==(const CallCmd&, const CallCmd&) = default;
};
struct UseCmd {
  Expr stored;
  std::vector<Expr> seq_args;
  ChannelLists chans;
  friend bool operator==(const UseCmd&, const UseCmd&) = default;
};
/// `left |=| right`
struct LinkCmd {
  std::string left;
  std::string right;
  friend bool operator==(const LinkCmd&, const LinkCmd&) = default;
};
/// `neg chan as rebound`
struct NegCmd {
  std::string chan;
  std::string rebound;
  friend bool operator==(const NegCmd&, const NegCmd&) = default;
};
/// `on chan do` block; sugar removed by elaborate().
struct OnDoCmd {
  std::string chan;
  Body body;
  friend bool operator==(const OnDoCmd&, const OnDoCmd&) = default;
};

using CommandNode =
    std::variant<PutCmd, GetCmd, HPutCmd, HCaseCmd, CloseCmd, HaltCmd, ForkCmd, SplitCmd, PlugCmd,
                 RaceCmd, CallCmd, UseCmd, LinkCmd, NegCmd, OnDoCmd>;

struct Command {
  CommandNode node;
  SourcePos pos;
  friend bool operator==(const Command&, const Command&) = default;
};

struct ProcDef {
  std::string name;  // empty for anonymous stored processes
  std::optional<ProcSignature> signature;
  std::vector<std::string> vars;
  ChannelLists chans;
  Body body;
  SourcePos pos;
  SourcePos end;

  friend bool operator==(const ProcDef&, const ProcDef&) = default;
};

using Declaration = std::variant<ProtocolDecl, ProcDef>;

/// Declarations in file order.
struct Program {
  std::vector<Declaration> declarations;

  const ProcDef* find_proc(std::string_view name) const;
  const ProtocolDecl* find_protocol(std::string_view name) const;

  friend bool operator==(const Program&, const Program&) = default;
};

using SourceProgram = Program;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace campl
