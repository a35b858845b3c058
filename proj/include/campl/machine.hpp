#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "campl/ast.hpp"
#include "campl/console.hpp"
#include "campl/topology.hpp"
#include "campl/value.hpp"

namespace campl {

class MissingRun : public std::runtime_error {
 public:
  MissingRun() : std::runtime_error("the program has no process named 'run'") {}
};

class BootError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TraceEvent {
  std::size_t step = 0;
  int pid = 0;
  CommandKind command = CommandKind::Put;
  /// Empty for commands that act on no single channel.
  std::string channel;
  int channel_id = -1;
  std::string payload;

  /// `#<step> pid=<n> <COMMAND> ch=<name>#<id> [payload=<rendered>]`
  std::string format() const;
};

/// An end of a channel: a process, a service, nobody, or a far end that is
/// travelling inside another channel's Rewire message.
struct EndOwner {
  enum class Kind { None, Process, Service, InTransit };
  Kind kind = Kind::None;
  int id = -1;
};

struct ChannelView {
  int id;
  std::string name;
  EndOwner output;
  EndOwner input;
  bool output_closed;
  bool input_closed;
  std::size_t to_input;
  std::size_t to_output;
};

struct ProcessView {
  int pid;
  std::string proc;
  enum class Status { Ready, Blocked, Finished } status;
  /// Channel names and ids the process is waiting on, when blocked.
  std::vector<std::pair<std::string, int>> waiting;
  /// Held channel ends by local name.
  std::map<std::string, int> channels;
};

struct Outcome {
  enum class Kind { Done, Stuck, StepLimit, Fault };
  Kind kind = Kind::Done;
  std::size_t steps = 0;
  /// Fault classification (IllegalCommand, ScriptExhausted, CycleFound)
  /// and a readable explanation.
  std::string fault;
  std::string message;
  /// The wait-for relation when stuck.
  std::vector<ProcessView> blocked;
  /// Offending channels when a cycle was found.
  std::vector<Topology::Edge> cycle;
  std::vector<TraceEvent> trace;
  std::vector<std::string> output;
};

std::string_view to_string(Outcome::Kind k);

/// Single-threaded interpreter over an elaborated program. Scheduling runs
/// the smallest Ready pid; blocked processes are retried only when nothing
/// is Ready. Races are the only consumers of the seeded generator.
class Machine {
 public:
  /// Boots `run`. Throws MissingRun or BootError.
  Machine(const Program& program, std::uint64_t seed, ServiceConfig services = {});

  enum class StepKind { Stepped, Done, Stuck, Fault };
  struct StepResult {
    StepKind kind;
    std::optional<TraceEvent> event;
  };

  StepResult step();
  Outcome run_to_completion(std::size_t max_steps = 100000);

  /// When set, each trace line is written here as it happens.
  void set_trace_sink(std::ostream* sink) { trace_sink_ = sink; }

  std::size_t steps() const { return steps_; }
  std::vector<ProcessView> processes() const;
  std::vector<ChannelView> channels() const;
  Topology topology() const;
  const std::vector<TraceEvent>& trace() const { return trace_; }
  /// Console lines printed so far.
  std::vector<std::string> output() const;
  /// Winner channel name of each race, in order.
  const std::vector<std::string>& race_winners() const { return winners_; }
  /// The fault of the last Fault step.
  const std::string& fault_kind() const { return fault_kind_; }
  const std::string& fault_message() const { return fault_message_; }
  const std::vector<Topology::Edge>& fault_cycle() const { return fault_cycle_; }

 private:
  struct ChanRef {
    int id;
    Polarity end;
  };

  struct Frame {
    const Body* body;
    std::size_t next;
    /// Sequential environment to restore when the frame is left.
    std::optional<Env> saved;
  };

  struct Process {
    int pid;
    std::string proc;
    Env env;
    std::map<std::string, ChanRef> chans;
    std::vector<Frame> stack;
    ProcessView::Status status = ProcessView::Status::Ready;
  };

  struct Channel {
    int id;
    std::string name;
    std::deque<Message> to_input;
    std::deque<Message> to_output;
    EndOwner owner[2];
    bool closed[2] = {false, false};
  };

  struct Service {
    int channel;
    ConsoleEndpoint console;
  };

  struct Fault {
    std::string kind;
    std::string message;
  };

  enum class Exec { Done, Blocked };

  static int slot(Polarity p) { return p == Polarity::Output ? 0 : 1; }

  int spawn(std::string proc, Env env, std::map<std::string, ChanRef> chans, const Body* body);
  int new_channel(std::string name);
  void own(const ChanRef& ref, int pid);

  const Command* next_command(Process& p);
  bool can_proceed(Process& p);
  Exec execute(Process& p, const Command& cmd, TraceEvent& ev);

  ChanRef ref(Process& p, const std::string& name);
  std::deque<Message>& outgoing(const ChanRef& r);
  std::deque<Message>& incoming(const ChanRef& r);
  Channel& channel(int id);
  Message take(Process& p, const std::string& name, Message::Kind kind, const char* what);
  void send(const ChanRef& r, Message m);
  void close_end(Process& p, const std::string& name);
  Value eval(const Process& p, const Expr& e) const;
  void enter(Process& p, const ProcDef& def, Env base, const std::vector<Value>& args,
             const ChannelLists& chans);
  void push_arm(Process& p, const Body& body);
  void rebind_owner(int from, int to);

  void pump_services();
  std::optional<std::vector<Topology::Edge>> check_topology() const;
  std::optional<long> resolve_owner(const EndOwner& o, int depth = 0) const;

  std::shared_ptr<const Program> program_;
  std::map<int, Process> procs_;
  std::map<int, Channel> chans_;
  std::vector<Service> services_;
  std::mt19937_64 rng_;
  int next_pid_ = 0;
  int next_channel_ = 0;
  std::size_t steps_ = 0;
  std::vector<TraceEvent> trace_;
  std::vector<std::string> winners_;
  std::ostream* trace_sink_ = nullptr;
  std::string fault_kind_;
  std::string fault_message_;
  std::vector<Topology::Edge> fault_cycle_;
};

}  // namespace campl
