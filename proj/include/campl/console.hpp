#pragma once

#include <deque>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "campl/value.hpp"

namespace campl {

struct ServiceConfig {
  enum class Mode { Live, Scripted };

  Mode mode = Mode::Scripted;
  /// Lines handed out by ConsoleGet in Scripted mode.
  std::vector<std::string> script;
  /// Live mode terminal; default to std::cout / std::cin when null.
  std::ostream* out = nullptr;
  std::istream* in = nullptr;
  /// Printed lines are also written here in either mode, when set.
  std::ostream* echo = nullptr;
};

class ScriptExhausted : public std::runtime_error {
 public:
  ScriptExhausted() : std::runtime_error("console input requested but the script is exhausted") {}
};

class ConsoleProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The terminal side of a Console channel.
class ConsoleEndpoint {
 public:
  enum class State { Idle, AwaitValue, AwaitClose, Closed };

  explicit ConsoleEndpoint(ServiceConfig config);

  /// Consumes one message from the process side and returns the reply to
  /// send back, if any. Throws ScriptExhausted or ConsoleProtocolError.
  std::optional<Message> dispatch(const Message& incoming);

  State state() const { return state_; }
  /// Every printed line in order; does not clear.
  const std::vector<std::string>& output() const { return output_; }

 private:
  std::string read_line();

  ServiceConfig config_;
  std::deque<std::string> script_;
  State state_ = State::Idle;
  std::vector<std::string> output_;
};

/// Printed lines of a finished run; idempotent.
std::vector<std::string> drain_output(const ConsoleEndpoint& console);

}  // namespace campl
