#include "campl/machine.hpp"

#include <algorithm>
#include <cctype>
#include <ostream>
#include <sstream>

#include "campl/program.hpp"

namespace campl {

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string tag(const std::string& name, int id) { return name + "#" + std::to_string(id); }

}  // namespace

std::string TraceEvent::format() const {
  std::ostringstream os;
  os << '#' << step << " pid=" << pid << ' '
     << (command == CommandKind::Link ? std::string("LINK") : upper(to_string(command)));
  if (!channel.empty()) os << " ch=" << tag(channel, channel_id);
  if (!payload.empty()) os << " payload=" << payload;
  return os.str();
}

std::string_view to_string(Outcome::Kind k) {
  switch (k) {
    case Outcome::Kind::Done: return "Done";
    case Outcome::Kind::Stuck: return "Stuck";
    case Outcome::Kind::StepLimit: return "StepLimit";
    case Outcome::Kind::Fault: return "Fault";
  }
  return "?";
}

// --- boot ----------------------------------------------------------------

Machine::Machine(const Program& program, std::uint64_t seed, ServiceConfig services)
    : program_(std::make_shared<const Program>(elaborate(program))), rng_(seed) {
  const ProcDef* run = program_->find_proc("run");
  if (!run) throw MissingRun();
  if (!run->vars.empty()) throw BootError("run cannot take sequential variables");
  if (!run->chans.polarized || !run->chans.outputs.empty())
    throw BootError("run may only hold Console channels at input polarity");
  std::map<std::string, ChanRef> chans;
  for (const auto& name : run->chans.inputs) {
    int id = new_channel(name);
    auto index = static_cast<int>(services_.size());
    services_.push_back({id, ConsoleEndpoint(services)});
    chans_.at(id).owner[slot(Polarity::Output)] = {EndOwner::Kind::Service, index};
    chans.emplace(name, ChanRef{id, Polarity::Input});
  }
  spawn("run", {}, std::move(chans), &run->body);
}

int Machine::spawn(std::string proc, Env env, std::map<std::string, ChanRef> chans,
                   const Body* body) {
  int pid = next_pid_++;
  Process p{pid, std::move(proc), std::move(env), std::move(chans), {}, ProcessView::Status::Ready};
  p.stack.push_back({body, 0, std::nullopt});
  for (const auto& [name, r] : p.chans) own(r, pid);
  procs_.emplace(pid, std::move(p));
  return pid;
}

int Machine::new_channel(std::string name) {
  int id = next_channel_++;
  Channel c;
  c.id = id;
  c.name = std::move(name);
  chans_.emplace(id, std::move(c));
  return id;
}

void Machine::own(const ChanRef& r, int pid) {
  channel(r.id).owner[slot(r.end)] = {EndOwner::Kind::Process, pid};
}

// --- helpers -------------------------------------------------------------

Machine::Channel& Machine::channel(int id) {
  auto it = chans_.find(id);
  if (it == chans_.end())
    throw Fault{"IllegalCommand", "channel #" + std::to_string(id) + " no longer exists"};
  return it->second;
}

Machine::ChanRef Machine::ref(Process& p, const std::string& name) {
  auto it = p.chans.find(name);
  if (it == p.chans.end())
    throw Fault{"IllegalCommand",
                "process " + std::to_string(p.pid) + " holds no channel '" + name + "'"};
  return it->second;
}

std::deque<Message>& Machine::outgoing(const ChanRef& r) {
  Channel& c = channel(r.id);
  return r.end == Polarity::Output ? c.to_input : c.to_output;
}

std::deque<Message>& Machine::incoming(const ChanRef& r) {
  Channel& c = channel(r.id);
  return r.end == Polarity::Output ? c.to_output : c.to_input;
}

void Machine::send(const ChanRef& r, Message m) {
  Channel& c = channel(r.id);
  if (c.closed[slot(r.end)])
    throw Fault{"IllegalCommand", "send on closed channel " + tag(c.name, c.id)};
  outgoing(r).push_back(std::move(m));
}

Message Machine::take(Process& p, const std::string& name, Message::Kind kind, const char* what) {
  auto& q = incoming(ref(p, name));
  Message m = std::move(q.front());
  q.pop_front();
  if (m.kind != kind)
    throw Fault{"IllegalCommand", std::string(what) + " on '" + name + "' found " + render(m)};
  return m;
}

void Machine::close_end(Process& p, const std::string& name) {
  ChanRef r = ref(p, name);
  Channel& c = channel(r.id);
  send(r, Message::close());
  c.closed[slot(r.end)] = true;
  c.owner[slot(r.end)] = {};
  p.chans.erase(name);
  if (c.closed[0] && c.closed[1]) chans_.erase(r.id);
}

Value Machine::eval(const Process& p, const Expr& e) const {
  switch (e.kind) {
    case Expr::Kind::Int: return Value{e.int_value};
    case Expr::Kind::Char: return Value{e.text.empty() ? '\0' : e.text.front()};
    case Expr::Kind::String: return Value{e.text};
    case Expr::Kind::Bool: return Value{e.bool_value};
    case Expr::Kind::Var: {
      auto it = p.env.find(e.text);
      if (it == p.env.end()) throw Fault{"IllegalCommand", "unbound variable '" + e.text + "'"};
      return it->second;
    }
    case Expr::Kind::StoreName: {
      const ProcDef* def = program_->find_proc(e.text);
      if (!def) throw Fault{"IllegalCommand", "unknown process '" + e.text + "'"};
      return Value{StoredProc{std::shared_ptr<const ProcDef>(program_, def),
                              std::make_shared<const Env>(), e.text}};
    }
    case Expr::Kind::StoreAnon:
      return Value{StoredProc{e.anonymous, std::make_shared<const Env>(p.env), ""}};
  }
  return {};
}

void Machine::enter(Process& p, const ProcDef& def, Env base, const std::vector<Value>& args,
                    const ChannelLists& chans) {
  if (args.size() != def.vars.size())
    throw Fault{"IllegalCommand", "wrong number of values for '" + def.name + "'"};
  std::vector<std::string> params = def.chans.polarized ? def.chans.inputs : def.chans.unpolarized;
  params.insert(params.end(), def.chans.outputs.begin(), def.chans.outputs.end());
  std::vector<std::string> given = chans.polarized ? chans.inputs : chans.unpolarized;
  given.insert(given.end(), chans.outputs.begin(), chans.outputs.end());
  if (params.size() != given.size())
    throw Fault{"IllegalCommand", "wrong number of channels for '" + def.name + "'"};

  std::map<std::string, ChanRef> bound;
  for (std::size_t i = 0; i < params.size(); ++i)
    bound.insert_or_assign(params[i], ref(p, given[i]));
  for (std::size_t i = 0; i < args.size(); ++i) base.insert_or_assign(def.vars[i], args[i]);
  p.env = std::move(base);
  p.chans = std::move(bound);
  p.stack.clear();
  p.stack.push_back({&def.body, 0, std::nullopt});
  if (!def.name.empty()) p.proc = def.name;
}

void Machine::push_arm(Process& p, const Body& body) { p.stack.push_back({&body, 0, p.env}); }

void Machine::rebind_owner(int from, int to) {
  for (auto& [pid, p] : procs_)
    for (auto& [name, r] : p.chans)
      if (r.id == from) r.id = to;
  for (auto& s : services_)
    if (s.channel == from) s.channel = to;
  for (auto& [id, c] : chans_) {
    for (auto& o : c.owner)
      if (o.kind == EndOwner::Kind::InTransit && o.id == from) o.id = to;
    for (auto* q : {&c.to_input, &c.to_output})
      for (auto& m : *q) {
        if (m.kind != Message::Kind::Rewire) continue;
        if (m.first == from) m.first = to;
        if (m.second == from) m.second = to;
      }
  }
}

// --- scheduling ----------------------------------------------------------

const Command* Machine::next_command(Process& p) {
  while (!p.stack.empty()) {
    Frame& f = p.stack.back();
    if (f.next < f.body->size()) return &(*f.body)[f.next];
    if (f.saved) p.env = std::move(*f.saved);
    p.stack.pop_back();
  }
  return nullptr;
}

bool Machine::can_proceed(Process& p) {
  const Command* cmd = next_command(p);
  if (!cmd) return true;
  auto has = [&](const std::string& name, bool want_val) {
    auto it = p.chans.find(name);
    if (it == p.chans.end() || !chans_.count(it->second.id)) return true;
    auto& q = incoming(it->second);
    return !q.empty() && (!want_val || q.front().kind == Message::Kind::Val);
  };
  return std::visit(overloaded{
                        [&](const GetCmd& x) { return has(x.chan, false); },
                        [&](const HCaseCmd& x) { return has(x.chan, false); },
                        [&](const SplitCmd& x) { return has(x.chan, false); },
                        [&](const RaceCmd& x) {
                          for (const auto& arm : x.arms)
                            if (has(arm.chan, true)) return true;
                          return false;
                        },
                        [](const auto&) { return true; },
                    },
                    cmd->node);
}

Machine::StepResult Machine::step() {
  if (!fault_kind_.empty()) return {StepKind::Fault, std::nullopt};
  while (true) {
    Process* p = nullptr;
    for (auto& [pid, q] : procs_)
      if (q.status == ProcessView::Status::Ready) {
        p = &q;
        break;
      }
    if (!p) {
      bool woke = false;
      for (auto& [pid, q] : procs_)
        if (q.status == ProcessView::Status::Blocked && can_proceed(q)) {
          q.status = ProcessView::Status::Ready;
          woke = true;
        }
      if (woke) continue;
      bool all_done = chans_.empty();
      for (const auto& [pid, q] : procs_) all_done &= q.status == ProcessView::Status::Finished;
      return {all_done ? StepKind::Done : StepKind::Stuck, std::nullopt};
    }

    TraceEvent ev;
    ev.step = steps_ + 1;
    ev.pid = p->pid;
    try {
      const Command* cmd = next_command(*p);
      if (!cmd)
        throw Fault{"IllegalCommand",
                    "process " + std::to_string(p->pid) + " ran out of commands without ending"};
      ev.command = command_kind(*cmd);
      if (execute(*p, *cmd, ev) == Exec::Blocked) {
        p->status = ProcessView::Status::Blocked;
        continue;
      }
      ++steps_;
      trace_.push_back(ev);
      if (trace_sink_) *trace_sink_ << ev.format() << '\n';
      pump_services();
      if (auto cycle = check_topology()) {
        fault_cycle_ = *cycle;
        throw Fault{"CycleFound", "the process network contains a cycle"};
      }
    } catch (const Fault& f) {
      fault_kind_ = f.kind;
      fault_message_ = f.message;
      return {StepKind::Fault, std::nullopt};
    } catch (const ScriptExhausted& e) {
      fault_kind_ = "ScriptExhausted";
      fault_message_ = e.what();
      return {StepKind::Fault, std::nullopt};
    } catch (const ConsoleProtocolError& e) {
      fault_kind_ = "IllegalCommand";
      fault_message_ = e.what();
      return {StepKind::Fault, std::nullopt};
    }
    return {StepKind::Stepped, ev};
  }
}

Outcome Machine::run_to_completion(std::size_t max_steps) {
  Outcome o;
  while (true) {
    if (steps_ >= max_steps) {
      bool all_done = chans_.empty();
      for (const auto& [pid, q] : procs_) all_done &= q.status == ProcessView::Status::Finished;
      o.kind = all_done ? Outcome::Kind::Done : Outcome::Kind::StepLimit;
      break;
    }
    StepResult r = step();
    if (r.kind == StepKind::Stepped) continue;
    if (r.kind == StepKind::Done) {
      o.kind = Outcome::Kind::Done;
    } else if (r.kind == StepKind::Stuck) {
      o.kind = Outcome::Kind::Stuck;
      for (auto& v : processes())
        if (v.status == ProcessView::Status::Blocked) o.blocked.push_back(std::move(v));
    } else {
      o.kind = Outcome::Kind::Fault;
      o.fault = fault_kind_;
      o.message = fault_message_;
      o.cycle = fault_cycle_;
    }
    break;
  }
  o.steps = steps_;
  o.trace = trace_;
  o.output = output();
  return o;
}

// --- commands ------------------------------------------------------------

Machine::Exec Machine::execute(Process& p, const Command& cmd, TraceEvent& ev) {
  auto advance = [&] { ++p.stack.back().next; };
  auto mark = [&](const std::string& name) {
    ChanRef r = ref(p, name);
    ev.channel = name;
    ev.channel_id = r.id;
    return r;
  };
  auto empty = [&](const std::string& name) { return incoming(ref(p, name)).empty(); };
  auto retire = [&] {
    p.chans.clear();
    p.stack.clear();
    p.status = ProcessView::Status::Finished;
  };

  return std::visit(
      overloaded{
          [&](const PutCmd& x) {
            ChanRef r = mark(x.chan);
            Value v = eval(p, x.value);
            ev.payload = render(v);
            advance();
            send(r, Message::val(std::move(v)));
            return Exec::Done;
          },
          [&](const GetCmd& x) {
            mark(x.chan);
            if (empty(x.chan)) return Exec::Blocked;
            Message m = take(p, x.chan, Message::Kind::Val, "get");
            ev.payload = render(m.value);
            advance();
            p.env.insert_or_assign(x.binder, std::move(m.value));
            return Exec::Done;
          },
          [&](const HPutCmd& x) {
            ChanRef r = mark(x.chan);
            ev.payload = x.handle;
            advance();
            send(r, Message::handle_of(x.handle));
            return Exec::Done;
          },
          [&](const HCaseCmd& x) {
            mark(x.chan);
            if (empty(x.chan)) return Exec::Blocked;
            Message m = take(p, x.chan, Message::Kind::Handle, "hcase");
            auto arm = std::find_if(x.arms.begin(), x.arms.end(),
                                    [&](const HCaseArm& a) { return a.handle == m.handle; });
            if (arm == x.arms.end())
              throw Fault{"IllegalCommand", "hcase on '" + x.chan + "' has no arm for " + m.handle};
            ev.payload = m.handle;
            advance();
            push_arm(p, arm->body);
            return Exec::Done;
          },
          [&](const CloseCmd& x) {
            mark(x.chan);
            advance();
            close_end(p, x.chan);
            return Exec::Done;
          },
          [&](const HaltCmd& x) {
            mark(x.chan);
            close_end(p, x.chan);
            retire();
            return Exec::Done;
          },
          [&](const ForkCmd& x) {
            ChanRef r = mark(x.chan);
            std::set<std::string> held;
            for (const auto& [name, ignored] : p.chans)
              if (name != x.chan) held.insert(name);
            ForkLayout layout = layout_fork(x, held);
            int c1 = new_channel(x.first.chan), c2 = new_channel(x.second.chan);
            Polarity far = opposite(r.end);
            chans_.at(c1).owner[slot(far)] = {EndOwner::Kind::InTransit, r.id};
            chans_.at(c2).owner[slot(far)] = {EndOwner::Kind::InTransit, r.id};
            send(r, Message::rewire(c1, c2));
            Channel& carrier = channel(r.id);
            carrier.closed[slot(r.end)] = true;
            carrier.owner[slot(r.end)] = {};

            std::map<std::string, ChanRef> first, second;
            for (const auto& n : layout.first) first.emplace(n, p.chans.at(n));
            for (const auto& n : layout.second) second.emplace(n, p.chans.at(n));
            first.insert_or_assign(x.first.chan, ChanRef{c1, r.end});
            second.insert_or_assign(x.second.chan, ChanRef{c2, r.end});
            Env env = p.env;
            std::string proc = p.proc;
            retire();
            int a = spawn(proc, env, std::move(first), &x.first.body);
            int b = spawn(proc, env, std::move(second), &x.second.body);
            ev.payload = tag(x.first.chan, c1) + "," + tag(x.second.chan, c2) +
                         " pids=" + std::to_string(a) + "," + std::to_string(b);
            return Exec::Done;
          },
          [&](const SplitCmd& x) {
            ChanRef r = mark(x.chan);
            if (empty(x.chan)) return Exec::Blocked;
            Message m = take(p, x.chan, Message::Kind::Rewire, "split");
            advance();
            for (int id : {m.first, m.second})
              channel(id).owner[slot(r.end)] = {EndOwner::Kind::Process, p.pid};
            p.chans.erase(x.chan);
            chans_.erase(r.id);
            p.chans.insert_or_assign(x.first, ChanRef{m.first, r.end});
            p.chans.insert_or_assign(x.second, ChanRef{m.second, r.end});
            ev.payload = tag(x.first, m.first) + "," + tag(x.second, m.second);
            return Exec::Done;
          },
          [&](const PlugCmd& x) {
            std::set<std::string> held;
            for (const auto& [name, ignored] : p.chans) held.insert(name);
            PlugLayout layout = layout_plug(x, held);
            std::vector<std::map<std::string, ChanRef>> slices(x.branches.size());
            for (std::size_t i = 0; i < x.branches.size(); ++i)
              for (const auto& n : layout.slices[i]) slices[i].emplace(n, p.chans.at(n));
            std::string created;
            for (const auto& pc : layout.plugged) {
              if (pc.branches.size() != 2)
                throw Fault{"IllegalCommand",
                            "plugged channel '" + pc.name + "' does not join exactly two branches"};
              int id = new_channel(pc.name);
              slices[*pc.output_branch].insert_or_assign(pc.name, ChanRef{id, Polarity::Output});
              slices[*pc.input_branch].insert_or_assign(pc.name, ChanRef{id, Polarity::Input});
              created += (created.empty() ? "" : ",") + tag(pc.name, id);
            }
            Env env = p.env;
            std::string proc = p.proc;
            retire();
            std::string pids;
            for (std::size_t i = 0; i < x.branches.size(); ++i) {
              int pid = spawn(proc, env, std::move(slices[i]), &x.branches[i]);
              pids += (pids.empty() ? "" : ",") + std::to_string(pid);
            }
            ev.payload = created + " pids=" + pids;
            return Exec::Done;
          },
          [&](const RaceCmd& x) {
            std::vector<const RaceArm*> ready;
            for (const auto& arm : x.arms) {
              auto& q = incoming(ref(p, arm.chan));
              if (!q.empty() && q.front().kind == Message::Kind::Val) ready.push_back(&arm);
            }
            if (ready.empty()) return Exec::Blocked;
            std::uint64_t draw = rng_();
            const RaceArm* win = ready[draw % ready.size()];
            mark(win->chan);
            std::string names;
            for (const auto* a : ready) names += (names.empty() ? "" : ",") + a->chan;
            ev.payload = "winner=" + win->chan + " ready=" + names;
            winners_.push_back(win->chan);
            advance();
            push_arm(p, win->body);
            return Exec::Done;
          },
          [&](const CallCmd& x) {
            const ProcDef* def = program_->find_proc(x.proc);
            if (!def) throw Fault{"IllegalCommand", "unknown process '" + x.proc + "'"};
            std::vector<Value> args;
            for (const auto& a : x.seq_args) args.push_back(eval(p, a));
            ev.payload = x.proc;
            enter(p, *def, {}, args, x.chans);
            return Exec::Done;
          },
          [&](const UseCmd& x) {
            Value v = eval(p, x.stored);
            const auto* stored = std::get_if<StoredProc>(&v.data);
            if (!stored)
              throw Fault{"IllegalCommand", "use of a value that is not a stored process"};
            std::vector<Value> args;
            for (const auto& a : x.seq_args) args.push_back(eval(p, a));
            ev.payload = render(v);
            enter(p, *stored->def, *stored->captured, args, x.chans);
            return Exec::Done;
          },
          [&](const LinkCmd& x) {
            ChanRef a = mark(x.left), b = ref(p, x.right);
            ev.payload = tag(x.right, b.id);
            if (a.end == b.end || a.id == b.id)
              throw Fault{"IllegalCommand", "'|=|' needs one input end and one output end"};
            ChanRef in = a.end == Polarity::Input ? a : b;
            ChanRef out = a.end == Polarity::Input ? b : a;
            Channel& keep = channel(in.id);
            Channel& gone = channel(out.id);
            std::deque<Message> to_input = std::move(gone.to_input);
            to_input.insert(to_input.end(), keep.to_input.begin(), keep.to_input.end());
            keep.to_input = std::move(to_input);
            keep.to_output.insert(keep.to_output.end(), gone.to_output.begin(),
                                  gone.to_output.end());
            keep.owner[slot(Polarity::Input)] = gone.owner[slot(Polarity::Input)];
            keep.closed[slot(Polarity::Input)] = gone.closed[slot(Polarity::Input)];
            int keep_id = keep.id, gone_id = gone.id;
            retire();
            chans_.erase(gone_id);
            rebind_owner(gone_id, keep_id);
            Channel& merged = channel(keep_id);
            if (merged.closed[0] && merged.closed[1]) chans_.erase(keep_id);
            return Exec::Done;
          },
          [&](const NegCmd& x) {
            ChanRef r = mark(x.chan);
            ev.payload = x.rebound;
            advance();
            p.chans.erase(x.chan);
            p.chans.insert_or_assign(x.rebound, r);
            return Exec::Done;
          },
          [&](const OnDoCmd&) -> Exec { throw Fault{"IllegalCommand", "unelaborated on-block"}; },
      },
      cmd.node);
}

// --- services and topology -----------------------------------------------

void Machine::pump_services() {
  for (auto& s : services_) {
    auto it = chans_.find(s.channel);
    if (it == chans_.end()) continue;
    Channel& c = it->second;
    while (!c.to_output.empty()) {
      Message m = std::move(c.to_output.front());
      c.to_output.pop_front();
      if (auto reply = s.console.dispatch(m)) c.to_input.push_back(std::move(*reply));
      if (m.kind == Message::Kind::Close) {
        c.closed[slot(Polarity::Output)] = true;
        c.owner[slot(Polarity::Output)] = {};
        if (c.closed[slot(Polarity::Input)]) chans_.erase(it);
        break;
      }
    }
  }
}

std::optional<long> Machine::resolve_owner(const EndOwner& o, int depth) const {
  switch (o.kind) {
    case EndOwner::Kind::Process: return o.id;
    case EndOwner::Kind::Service: return Topology::service_node(o.id);
    case EndOwner::Kind::InTransit: {
      auto it = chans_.find(o.id);
      if (it == chans_.end() || depth > 64) return std::nullopt;
      const Channel& carrier = it->second;
      // The Rewire travels toward whichever end is still open.
      for (int s = 0; s < 2; ++s)
        if (!carrier.closed[s] && carrier.owner[s].kind != EndOwner::Kind::None)
          return resolve_owner(carrier.owner[s], depth + 1);
      return std::nullopt;
    }
    case EndOwner::Kind::None: break;
  }
  return std::nullopt;
}

Topology Machine::topology() const {
  Topology t;
  for (const auto& [pid, p] : procs_)
    if (p.status != ProcessView::Status::Finished) t.add_node(pid);
  for (std::size_t i = 0; i < services_.size(); ++i)
    if (chans_.count(services_[i].channel)) t.add_node(Topology::service_node(static_cast<int>(i)));
  for (const auto& [id, c] : chans_) {
    if (c.closed[0] || c.closed[1]) continue;
    auto a = resolve_owner(c.owner[0]);
    auto b = resolve_owner(c.owner[1]);
    if (a && b) t.add_edge(id, *a, *b);
  }
  return t;
}

std::optional<std::vector<Topology::Edge>> Machine::check_topology() const {
  return topology().find_cycle();
}

// --- views ---------------------------------------------------------------

std::vector<ProcessView> Machine::processes() const {
  std::vector<ProcessView> out;
  for (const auto& [pid, p] : procs_) {
    ProcessView v{pid, p.proc, p.status, {}, {}};
    for (const auto& [name, r] : p.chans) v.channels.emplace(name, r.id);
    if (p.status == ProcessView::Status::Blocked && !p.stack.empty()) {
      const Frame& f = p.stack.back();
      if (f.next < f.body->size()) {
        auto wait = [&](const std::string& name) {
          auto it = p.chans.find(name);
          v.waiting.emplace_back(name, it == p.chans.end() ? -1 : it->second.id);
        };
        std::visit(overloaded{
                       [&](const GetCmd& x) { wait(x.chan); },
                       [&](const HCaseCmd& x) { wait(x.chan); },
                       [&](const SplitCmd& x) { wait(x.chan); },
                       [&](const RaceCmd& x) {
                         for (const auto& arm : x.arms) wait(arm.chan);
                       },
                       [](const auto&) {},
                   },
                   (*f.body)[f.next].node);
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<ChannelView> Machine::channels() const {
  std::vector<ChannelView> out;
  for (const auto& [id, c] : chans_)
    out.push_back({id, c.name, c.owner[0], c.owner[1], c.closed[0], c.closed[1], c.to_input.size(),
                   c.to_output.size()});
  return out;
}

std::vector<std::string> Machine::output() const {
  std::vector<std::string> out;
  for (const auto& s : services_) {
    auto lines = drain_output(s.console);
    out.insert(out.end(), lines.begin(), lines.end());
  }
  return out;
}

}  // namespace campl
