#include "campl/program.hpp"

#include <algorithm>
#include <map>

namespace campl {

Expr Expr::integer(std::int64_t v, SourcePos pos) {
  Expr e;
  e.kind = Kind::Int;
  e.int_value = v;
  e.pos = pos;
  return e;
}
Expr Expr::character(char c, SourcePos pos) {
  Expr e;
  e.kind = Kind::Char;
  e.text = std::string(1, c);
  e.pos = pos;
  return e;
}
Expr Expr::string(std::string s, SourcePos pos) {
  Expr e;
  e.kind = Kind::String;
  e.text = std::move(s);
  e.pos = pos;
  return e;
}
Expr Expr::boolean(bool b, SourcePos pos) {
  Expr e;
  e.kind = Kind::Bool;
  e.bool_value = b;
  e.pos = pos;
  return e;
}
Expr Expr::variable(std::string name, SourcePos pos) {
  Expr e;
  e.kind = Kind::Var;
  e.text = std::move(name);
  e.pos = pos;
  return e;
}
Expr Expr::store_name(std::string proc, SourcePos pos) {
  Expr e;
  e.kind = Kind::StoreName;
  e.text = std::move(proc);
  e.pos = pos;
  return e;
}
Expr Expr::store_anonymous(std::shared_ptr<const ProcDef> def, SourcePos pos) {
  Expr e;
  e.kind = Kind::StoreAnon;
  e.anonymous = std::move(def);
  e.pos = pos;
  return e;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::Int: return a.int_value == b.int_value;
    case Expr::Kind::Bool: return a.bool_value == b.bool_value;
    case Expr::Kind::StoreAnon:
      if (!a.anonymous || !b.anonymous) return a.anonymous == b.anonymous;
      return *a.anonymous == *b.anonymous;
    default: return a.text == b.text;
  }
}

const ProcDef* Program::find_proc(std::string_view name) const {
  for (const auto& d : declarations)
    if (const auto* p = std::get_if<ProcDef>(&d); p && p->name == name) return p;
  return nullptr;
}

const ProtocolDecl* Program::find_protocol(std::string_view name) const {
  for (const auto& d : declarations)
    if (const auto* p = std::get_if<ProtocolDecl>(&d); p && p->name == name) return p;
  return nullptr;
}

CommandKind command_kind(const Command& cmd) {
  return std::visit(overloaded{
                        [](const PutCmd&) { return CommandKind::Put; },
                        [](const GetCmd&) { return CommandKind::Get; },
                        [](const HPutCmd&) { return CommandKind::HPut; },
                        [](const HCaseCmd&) { return CommandKind::HCase; },
                        [](const CloseCmd&) { return CommandKind::Close; },
                        [](const HaltCmd&) { return CommandKind::Halt; },
                        [](const ForkCmd&) { return CommandKind::Fork; },
                        [](const SplitCmd&) { return CommandKind::Split; },
                        [](const PlugCmd&) { return CommandKind::Plug; },
                        [](const RaceCmd&) { return CommandKind::Race; },
                        [](const CallCmd&) { return CommandKind::Call; },
                        [](const UseCmd&) { return CommandKind::Use; },
                        [](const LinkCmd&) { return CommandKind::Link; },
                        [](const NegCmd&) { return CommandKind::Neg; },
                        // Never survives elaboration; report the first inner command's kind.
                        [](const OnDoCmd& on) {
                          return on.body.empty() ? CommandKind::Put : command_kind(on.body.front());
                        },
                    },
                    cmd.node);
}

// --- elaboration -------------------------------------------------------------

namespace {

Expr elaborate_expr(const Expr& e);

void elaborate_into(const Body& in, const std::string& implicit, Body& out);

Body elaborate_nested(const Body& in, const std::string& implicit) {
  Body out;
  elaborate_into(in, implicit, out);
  return out;
}

void fill(std::string& chan, const std::string& implicit) {
  if (chan.empty()) chan = implicit;
}

void elaborate_into(const Body& in, const std::string& implicit, Body& out) {
  for (const Command& cmd : in) {
    if (const auto* on = std::get_if<OnDoCmd>(&cmd.node)) {
      elaborate_into(on->body, on->chan.empty() ? implicit : on->chan, out);
      continue;
    }
    Command c = cmd;
    std::visit(overloaded{
                   [&](PutCmd& x) {
                     fill(x.chan, implicit);
                     x.value = elaborate_expr(x.value);
                   },
                   [&](GetCmd& x) { fill(x.chan, implicit); },
                   [&](HPutCmd& x) { fill(x.chan, implicit); },
                   [&](HCaseCmd& x) {
                     fill(x.chan, implicit);
                     for (auto& arm : x.arms) arm.body = elaborate_nested(arm.body, implicit);
                   },
                   [&](CloseCmd& x) { fill(x.chan, implicit); },
                   [&](HaltCmd& x) { fill(x.chan, implicit); },
                   [&](ForkCmd& x) {
                     fill(x.chan, implicit);
                     x.first.body = elaborate_nested(x.first.body, implicit);
                     x.second.body = elaborate_nested(x.second.body, implicit);
                   },
                   [&](SplitCmd& x) { fill(x.chan, implicit); },
                   [&](PlugCmd& x) {
                     for (auto& b : x.branches) b = elaborate_nested(b, implicit);
                   },
                   [&](RaceCmd& x) {
                     for (auto& arm : x.arms) arm.body = elaborate_nested(arm.body, implicit);
                   },
                   [&](CallCmd& x) {
                     for (auto& a : x.seq_args) a = elaborate_expr(a);
                   },
                   [&](UseCmd& x) {
                     x.stored = elaborate_expr(x.stored);
                     for (auto& a : x.seq_args) a = elaborate_expr(a);
                   },
                   [&](LinkCmd&) {},
                   [&](NegCmd& x) { fill(x.chan, implicit); },
                   [&](OnDoCmd&) {},
               },
               c.node);
    out.push_back(std::move(c));
  }
}

ProcDef elaborate_proc(const ProcDef& def) {
  ProcDef out = def;
  out.body = elaborate_nested(def.body, "");
  return out;
}

Expr elaborate_expr(const Expr& e) {
  if (e.kind != Expr::Kind::StoreAnon || !e.anonymous) return e;
  Expr out = e;
  out.anonymous = std::make_shared<const ProcDef>(elaborate_proc(*e.anonymous));
  return out;
}

}  // namespace

Body elaborate(const Body& body) { return elaborate_nested(body, ""); }

Program elaborate(const Program& program) {
  Program out;
  for (const auto& decl : program.declarations) {
    if (const auto* p = std::get_if<ProcDef>(&decl))
      out.declarations.emplace_back(elaborate_proc(*p));
    else
      out.declarations.push_back(decl);
  }
  return out;
}

// --- free names --------------------------------------------------------------

namespace {

void use(const std::string& name, const std::set<std::string>& bound, std::set<std::string>& out) {
  if (!name.empty() && !bound.count(name)) out.insert(name);
}

void use_lists(const ChannelLists& l, const std::set<std::string>& bound,
               std::set<std::string>& out) {
  for (const auto& n : l.inputs) use(n, bound, out);
  for (const auto& n : l.outputs) use(n, bound, out);
  for (const auto& n : l.unpolarized) use(n, bound, out);
}

void collect(const Body& body, std::set<std::string>& bound, std::set<std::string>& out) {
  for (const Command& cmd : body) {
    std::visit(overloaded{
                   [&](const PutCmd& x) { use(x.chan, bound, out); },
                   [&](const GetCmd& x) { use(x.chan, bound, out); },
                   [&](const HPutCmd& x) { use(x.chan, bound, out); },
                   [&](const HCaseCmd& x) {
                     use(x.chan, bound, out);
                     for (const auto& arm : x.arms) {
                       auto inner = bound;
                       collect(arm.body, inner, out);
                     }
                   },
                   [&](const CloseCmd& x) { use(x.chan, bound, out); },
                   [&](const HaltCmd& x) { use(x.chan, bound, out); },
                   [&](const ForkCmd& x) {
                     use(x.chan, bound, out);
                     for (const ForkBranch* b : {&x.first, &x.second}) {
                       auto inner = bound;
                       inner.insert(b->chan);
                       collect(b->body, inner, out);
                     }
                   },
                   [&](const SplitCmd& x) {
                     use(x.chan, bound, out);
                     bound.insert(x.first);
                     bound.insert(x.second);
                   },
                   [&](const PlugCmd& x) {
                     // A name free in two or more branches is plugged here.
                     std::map<std::string, int> uses;
                     for (const auto& b : x.branches) {
                       auto inner = bound;
                       std::set<std::string> free;
                       collect(b, inner, free);
                       for (const auto& n : free) ++uses[n];
                     }
                     for (const auto& [n, count] : uses)
                       if (count == 1) out.insert(n);
                   },
                   [&](const RaceCmd& x) {
                     for (const auto& arm : x.arms) {
                       use(arm.chan, bound, out);
                       auto inner = bound;
                       collect(arm.body, inner, out);
                     }
                   },
                   [&](const CallCmd& x) { use_lists(x.chans, bound, out); },
                   [&](const UseCmd& x) { use_lists(x.chans, bound, out); },
                   [&](const LinkCmd& x) {
                     use(x.left, bound, out);
                     use(x.right, bound, out);
                   },
                   [&](const NegCmd& x) {
                     use(x.chan, bound, out);
                     bound.insert(x.rebound);
                   },
                   [&](const OnDoCmd& x) {
                     use(x.chan, bound, out);
                     collect(x.body, bound, out);
                   },
               },
               cmd.node);
  }
}

BranchEnd end_in_lists(const ChannelLists& l, const std::string& chan) {
  auto has = [&](const std::vector<std::string>& v) {
    return std::find(v.begin(), v.end(), chan) != v.end();
  };
  if (has(l.inputs)) return BranchEnd::Input;
  if (has(l.outputs)) return BranchEnd::Output;
  if (has(l.unpolarized)) return BranchEnd::Unpolarized;
  return BranchEnd::Unfixed;
}

// Walks in program order; stops descending once the name is rebound.
BranchEnd find_end(const Body& body, const std::string& chan) {
  for (const Command& cmd : body) {
    BranchEnd found = BranchEnd::Unfixed;
    bool shadowed = false;
    std::visit(overloaded{
                   [&](const CallCmd& x) { found = end_in_lists(x.chans, chan); },
                   [&](const UseCmd& x) { found = end_in_lists(x.chans, chan); },
                   [&](const HCaseCmd& x) {
                     for (const auto& arm : x.arms)
                       if (found == BranchEnd::Unfixed) found = find_end(arm.body, chan);
                   },
                   [&](const RaceCmd& x) {
                     for (const auto& arm : x.arms)
                       if (found == BranchEnd::Unfixed) found = find_end(arm.body, chan);
                   },
                   [&](const ForkCmd& x) {
                     for (const ForkBranch* b : {&x.first, &x.second})
                       if (found == BranchEnd::Unfixed && b->chan != chan)
                         found = find_end(b->body, chan);
                   },
                   [&](const PlugCmd& x) {
                     for (const auto& b : x.branches)
                       if (found == BranchEnd::Unfixed) found = find_end(b, chan);
                   },
                   [&](const OnDoCmd& x) { found = find_end(x.body, chan); },
                   [&](const SplitCmd& x) { shadowed = x.first == chan || x.second == chan; },
                   [&](const NegCmd& x) { shadowed = x.rebound == chan; },
                   [](const auto&) {},
               },
               cmd.node);
    if (found != BranchEnd::Unfixed) return found;
    if (shadowed) break;
  }
  return BranchEnd::Unfixed;
}

}  // namespace

std::set<std::string> free_channels(const Body& body) {
  std::set<std::string> bound;
  std::set<std::string> out;
  collect(body, bound, out);
  return out;
}

BranchEnd branch_end(const Body& branch, const std::string& chan) { return find_end(branch, chan); }

PlugLayout layout_plug(const PlugCmd& plug, const std::set<std::string>& live) {
  PlugLayout layout;
  layout.slices.resize(plug.branches.size());
  std::vector<std::set<std::string>> free;
  for (const auto& b : plug.branches) free.push_back(free_channels(b));

  for (const auto& name : live) {
    std::vector<std::size_t> users;
    for (std::size_t i = 0; i < free.size(); ++i)
      if (free[i].count(name)) users.push_back(i);
    if (users.empty()) {
      layout.dropped.push_back(name);
      continue;
    }
    if (users.size() > 1) layout.shared.push_back(name);
    layout.slices[users.front()].push_back(name);
  }

  // Plugged names in order of first mention, branch by branch.
  std::vector<std::string> order;
  for (const auto& f : free)
    for (const auto& name : f)
      if (!live.count(name) && std::find(order.begin(), order.end(), name) == order.end())
        order.push_back(name);

  for (const auto& name : order) {
    PluggedChannel pc;
    pc.name = name;
    for (std::size_t i = 0; i < free.size(); ++i) {
      if (!free[i].count(name)) continue;
      pc.branches.push_back(i);
      pc.ends.push_back(branch_end(plug.branches[i], name));
    }
    if (pc.branches.size() >= 2) {
      auto fixed = [](BranchEnd e) { return e == BranchEnd::Output || e == BranchEnd::Input; };
      std::size_t a = pc.branches[0], b = pc.branches[1];
      BranchEnd ea = pc.ends[0], eb = pc.ends[1];
      bool a_out;
      if (fixed(ea) && fixed(eb)) {
        pc.conflict = ea == eb;
        a_out = ea == BranchEnd::Output;
        if (pc.conflict) a_out = true;
      } else if (fixed(ea)) {
        a_out = ea == BranchEnd::Output;
      } else if (fixed(eb)) {
        a_out = eb == BranchEnd::Input;
      } else {
        a_out = true;
      }
      pc.output_branch = a_out ? a : b;
      pc.input_branch = a_out ? b : a;
    }
    layout.plugged.push_back(std::move(pc));
  }
  return layout;
}

ForkLayout layout_fork(const ForkCmd& fork, const std::set<std::string>& live) {
  ForkLayout layout;
  auto first = free_channels(fork.first.body);
  auto second = free_channels(fork.second.body);
  first.erase(fork.first.chan);
  second.erase(fork.second.chan);
  for (const auto& name : live) {
    if (name == fork.chan) continue;
    bool in1 = first.count(name) > 0, in2 = second.count(name) > 0;
    if (in1 && in2) layout.shared.push_back(name);
    if (in1)
      layout.first.push_back(name);
    else if (in2)
      layout.second.push_back(name);
    else
      layout.dropped.push_back(name);
  }
  return layout;
}

}  // namespace campl
