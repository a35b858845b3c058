#include "campl/console.hpp"

#include <iostream>

namespace campl {

ConsoleEndpoint::ConsoleEndpoint(ServiceConfig config)
    : config_(std::move(config)), script_(config_.script.begin(), config_.script.end()) {}

std::string ConsoleEndpoint::read_line() {
  if (config_.mode == ServiceConfig::Mode::Scripted) {
    if (script_.empty()) throw ScriptExhausted();
    std::string line = std::move(script_.front());
    script_.pop_front();
    return line;
  }
  std::istream& in = config_.in ? *config_.in : std::cin;
  std::string line;
  if (!std::getline(in, line)) throw ScriptExhausted();
  return line;
}

std::optional<Message> ConsoleEndpoint::dispatch(const Message& m) {
  switch (state_) {
    case State::Idle:
      if (m.kind == Message::Kind::Handle) {
        if (m.handle == "ConsolePut") {
          state_ = State::AwaitValue;
          return std::nullopt;
        }
        if (m.handle == "ConsoleGet") return Message::val(Value{read_line()});
        if (m.handle == "ConsoleClose") {
          state_ = State::AwaitClose;
          return std::nullopt;
        }
      }
      throw ConsoleProtocolError("console expected a handle, got " + render(m));
    case State::AwaitValue: {
      if (m.kind != Message::Kind::Val)
        throw ConsoleProtocolError("console expected a value to print, got " + render(m));
      std::string line = display(m.value);
      if (config_.mode == ServiceConfig::Mode::Live) {
        std::ostream& out = config_.out ? *config_.out : std::cout;
        out << line << '\n';
        out.flush();
      }
      if (config_.echo) *config_.echo << line << '\n';
      output_.push_back(std::move(line));
      state_ = State::Idle;
      return std::nullopt;
    }
    case State::AwaitClose:
      if (m.kind != Message::Kind::Close)
        throw ConsoleProtocolError("console expected the channel to close, got " + render(m));
      state_ = State::Closed;
      return std::nullopt;
    case State::Closed: break;
  }
  throw ConsoleProtocolError("console channel is closed, got " + render(m));
}

std::vector<std::string> drain_output(const ConsoleEndpoint& console) { return console.output(); }

}  // namespace campl
