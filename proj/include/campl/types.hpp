#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace campl {

/// Which end of a channel a process holds. Output is the left (`+`) end,
/// Input the right (`-`) end.
enum class Polarity { Output, Input };

constexpr Polarity opposite(Polarity p) {
  return p == Polarity::Output ? Polarity::Input : Polarity::Output;
}

std::string_view to_string(Polarity p);

class ChanType;
struct ProcSignature;

/// Sequential (message-logic) type. Immutable; copies share structure.
class SeqType {
 public:
  enum class Kind { Int, Char, Bool, String, Store, TypeVar, Var };

  static SeqType int_type();
  static SeqType char_type();
  static SeqType bool_type();
  static SeqType string_type();
  static SeqType store(ProcSignature signature);
  static SeqType type_var(std::string name);
  /// Inference variable; never present in a checked program.
  static SeqType var(int id);

  Kind kind() const;
  const std::string& name() const;
  int var_id() const;
  const ProcSignature& signature() const;

  friend bool operator==(const SeqType& a, const SeqType& b);

 private:
  struct Node;
  explicit SeqType(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Concurrent channel type.
class ChanType {
 public:
  enum class Kind { TopBot, Put, Get, Tensor, Par, Neg, Proto, Coproto, StateVar, Var };

  static ChanType top_bot();
  static ChanType put(SeqType message, ChanType rest);
  static ChanType get(SeqType message, ChanType rest);
  static ChanType tensor(ChanType left, ChanType right);
  static ChanType par(ChanType left, ChanType right);
  static ChanType neg(ChanType inner);
  static ChanType proto(std::string name, std::vector<SeqType> args);
  static ChanType coproto(std::string name, std::vector<SeqType> args);
  static ChanType state_var(std::string name);
  static ChanType var(int id);

  Kind kind() const;
  /// Put/Get payload type.
  const SeqType& message() const;
  /// Put/Get continuation.
  const ChanType& rest() const;
  /// Tensor/Par components; `left()` is also the Neg operand.
  const ChanType& left() const;
  const ChanType& right() const;
  const ChanType& inner() const { return left(); }
  /// Protocol/coprotocol/state-variable name.
  const std::string& name() const;
  const std::vector<SeqType>& args() const;
  int var_id() const;

  friend bool operator==(const ChanType& a, const ChanType& b);

 private:
  struct Node;
  explicit ChanType(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// `:: Seq,... | In,... => Out,...`; order is significant.
struct ProcSignature {
  std::vector<SeqType> seq_params;
  std::vector<ChanType> input_chans;
  std::vector<ChanType> output_chans;

  friend bool operator==(const ProcSignature&, const ProcSignature&) = default;
};

/// Structural equality. Protocol applications compare by name and
/// arguments; they are never unfolded.
bool type_equal(const ChanType& a, const ChanType& b);
bool type_equal(const SeqType& a, const SeqType& b);

/// True when the type mentions an inference variable anywhere.
bool has_vars(const ChanType& t);
bool has_vars(const SeqType& t);
bool has_vars(const ProcSignature& sig);

/// True when the type mentions a state or type variable anywhere.
bool has_decl_vars(const ChanType& t);

/// Renders in surface syntax, e.g. `Put([Char]|Get(Int|TopBot))`.
std::string render(const ChanType& t);
std::string render(const SeqType& t);
std::string render(const ProcSignature& sig);

enum class ProtocolKind { Protocol, Coprotocol };

struct SourcePos {
  int line = 0;
  int column = 0;

  // Positions never take part in AST equality.
  friend constexpr bool operator==(const SourcePos&, const SourcePos&) { return true; }
};

inline bool same_position(SourcePos a, SourcePos b) {
  return a.line == b.line && a.column == b.column;
}

struct HandleClause {
  std::string name;
  ChanType body;
  SourcePos pos;

  friend bool operator==(const HandleClause&, const HandleClause&) = default;
};

/// protocol `Name(A| ) => S = H :: body => S ...`
/// coprotocol `S => Name(A| ) = H :: S => body ...`
struct ProtocolDecl {
  std::string name;
  ProtocolKind kind = ProtocolKind::Protocol;
  std::vector<std::string> seq_params;
  std::string state_var;
  std::vector<HandleClause> handles;
  SourcePos pos;
  SourcePos end;

  const HandleClause* find_handle(std::string_view handle) const;
  /// `Name(args)` as a channel type of the matching kind.
  ChanType apply(std::vector<SeqType> args) const;

  friend bool operator==(const ProtocolDecl&, const ProtocolDecl&) = default;
};

/// The built-in `Console` service coprotocol.
const ProtocolDecl& console_protocol();

enum class CommandKind {
  Put,
  Get,
  HPut,
  HCase,
  Close,
  Halt,
  Fork,
  Split,
  Plug,
  Race,
  Call,
  Use,
  Link,
  Neg
};

std::string_view to_string(CommandKind k);

using CommandSet = std::set<CommandKind>;

/// Commands permitted on a channel of type `t` held at polarity `p`.
/// Only the type's head constructor matters.
CommandSet allowed_commands(const ChanType& t, Polarity p);

/// A race arm may wait on a channel whose next legal command is a value `get`.
bool can_race(const ChanType& t, Polarity p);

/// Replaces the declaration's parameters and state variable inside the
/// handle's body. `app` must be an application of `decl`.
/// Throws UnknownHandle when `handle` is not a clause of `decl`.
ChanType unfold_handle(const ProtocolDecl& decl, std::string_view handle, const ChanType& app);

class UnknownHandle : public std::exception {
 public:
  UnknownHandle(std::string decl, std::string handle);
  const char* what() const noexcept override { return message_.c_str(); }

 private:
  std::string message_;
};

}  // namespace campl
