#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <variant>

#include "campl/ast.hpp"

namespace campl {

struct Value;
using Env = std::map<std::string, Value>;

/// A process encoded as data. Captures sequential variables only.
struct StoredProc {
  std::shared_ptr<const ProcDef> def;
  std::shared_ptr<const Env> captured;
  /// Empty for anonymous definitions.
  std::string name;
};

struct Value {
  std::variant<std::int64_t, char, std::string, bool, StoredProc> data;

  bool is_string() const { return std::holds_alternative<std::string>(data); }
};

/// Literal-like rendering: strings and chars quoted.
std::string render(const Value& v);
/// Strings unquoted, everything else as render().
std::string display(const Value& v);

struct Message {
  enum class Kind { Val, Handle, Close, Rewire };

  Kind kind = Kind::Val;
  Value value;
  std::string handle;
  /// Rewire: the two channels whose far ends travel with the message.
  int first = -1;
  int second = -1;

  static Message val(Value v);
  static Message handle_of(std::string h);
  static Message close();
  static Message rewire(int a, int b);
};

std::string render(const Message& m);

}  // namespace campl
