#include "campl/checker.hpp"

#include <algorithm>
#include <numeric>

#include "campl/program.hpp"
#include "campl/unify.hpp"

namespace campl {

const ProcSignature* TypedProgram::signature(const std::string& proc) const {
  auto it = signatures.find(proc);
  return it == signatures.end() ? nullptr : &it->second;
}

std::optional<ChanType> TypedProgram::plugged_type(const std::string& proc,
                                                   const std::string& channel) const {
  std::optional<ChanType> found;
  for (const auto& p : plugs) {
    if (p.proc != proc || p.channel != channel) continue;
    if (found) return std::nullopt;
    found = p.type;
  }
  return found;
}

namespace {

enum class Flow { Continues, Ends, Aborted };

struct ChanEntry {
  ChanType type;
  Polarity pol;
  bool alive = true;
};

using ChanCtx = std::map<std::string, ChanEntry>;
using SeqCtx = std::map<std::string, SeqType>;

struct ProcInfo {
  const ProcDef* def = nullptr;
  ProcSignature sig;
  bool skip = false;
};

struct BadType {
  DiagKind kind;
  std::string message;
};

std::string polarity_word(Polarity p) { return p == Polarity::Output ? "output" : "input"; }

std::set<std::string> alive_names(const ChanCtx& ch) {
  std::set<std::string> out;
  for (const auto& [name, e] : ch)
    if (e.alive) out.insert(name);
  return out;
}

std::string list_names(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? ", " : "") + names[i];
  return out;
}

class Checker {
 public:
  CheckResult run(const SourceProgram& source) {
    out_.program = elaborate(source);
    register_protocols();
    register_procs();
    for (const auto& d : out_.program.declarations)
      if (const auto* p = std::get_if<ProcDef>(&d)) check_proc(*p);
    finish_program();

    CheckResult result;
    sort_by_position(errors_);
    result.errors = std::move(errors_);
    if (result.errors.empty()) result.program = std::move(out_);
    return result;
  }

 private:
  // --- diagnostics -------------------------------------------------------

  void error(DiagKind kind, SourcePos pos, std::string message, std::string channel = {},
             std::optional<ChanType> type = std::nullopt) {
    Diagnostic d;
    d.kind = kind;
    d.pos = pos;
    d.message = std::move(message);
    d.channel = std::move(channel);
    if (type) d.type = render(u_.zonk(*type));
    errors_.push_back(std::move(d));
  }

  std::string show(const ChanType& t) const { return render(u_.zonk(t)); }
  std::string show(const SeqType& t) const { return render(u_.zonk(t)); }

  // --- declarations ------------------------------------------------------

  void register_protocols() {
    const ProtocolDecl& console = console_protocol();
    std::vector<ProtocolDecl> decls{console};
    for (const auto& d : out_.program.declarations)
      if (const auto* p = std::get_if<ProtocolDecl>(&d)) decls.push_back(*p);

    std::vector<std::string> order;
    for (const auto& decl : decls) {
      if (out_.protocols.count(decl.name)) {
        error(DiagKind::DuplicateDefinition, decl.pos,
              "protocol '" + decl.name + "' is already defined");
        continue;
      }
      for (const auto& h : decl.handles) {
        auto [it, fresh] = handle_owner_.emplace(h.name, decl.name);
        if (!fresh)
          error(DiagKind::HandleDuplicate, h.pos,
                "handle '" + h.name + "' is already declared by '" + it->second +
                    "'; handle names must be globally unique");
      }
      out_.protocols.emplace(decl.name, decl);
      order.push_back(decl.name);
    }
    for (const auto& name : order) {
      ProtocolDecl& decl = out_.protocols.at(name);
      for (auto& h : decl.handles) {
        try {
          h.body = resolve_names(h.body);
        } catch (const BadType& bad) {
          error(bad.kind, h.pos, bad.message);
        }
      }
    }
  }

  ChanType resolve_names(const ChanType& t) const {
    switch (t.kind()) {
      case ChanType::Kind::Put:
        return ChanType::put(resolve_names(t.message()), resolve_names(t.rest()));
      case ChanType::Kind::Get:
        return ChanType::get(resolve_names(t.message()), resolve_names(t.rest()));
      case ChanType::Kind::Tensor:
        return ChanType::tensor(resolve_names(t.left()), resolve_names(t.right()));
      case ChanType::Kind::Par:
        return ChanType::par(resolve_names(t.left()), resolve_names(t.right()));
      case ChanType::Kind::Neg: return ChanType::neg(resolve_names(t.inner()));
      case ChanType::Kind::Proto:
      case ChanType::Kind::Coproto: {
        auto it = out_.protocols.find(t.name());
        if (it == out_.protocols.end())
          throw BadType{DiagKind::UnknownName, "unknown protocol '" + t.name() + "'"};
        const ProtocolDecl& decl = it->second;
        if (decl.seq_params.size() != t.args().size())
          throw BadType{DiagKind::ArityMismatch,
                        "'" + decl.name + "' takes " + std::to_string(decl.seq_params.size()) +
                            " type argument(s) but is given " + std::to_string(t.args().size())};
        std::vector<SeqType> args;
        for (const auto& a : t.args()) args.push_back(resolve_names(a));
        return decl.apply(std::move(args));
      }
      default: return t;
    }
  }

  SeqType resolve_names(const SeqType& t) const {
    if (t.kind() != SeqType::Kind::Store) return t;
    return SeqType::store(resolve_names(t.signature()));
  }

  ProcSignature resolve_names(const ProcSignature& sig) const {
    ProcSignature out;
    for (const auto& s : sig.seq_params) out.seq_params.push_back(resolve_names(s));
    for (const auto& c : sig.input_chans) out.input_chans.push_back(resolve_names(c));
    for (const auto& c : sig.output_chans) out.output_chans.push_back(resolve_names(c));
    return out;
  }

  /// Resolved declared signature, or fresh variables shaped by the context.
  std::optional<ProcSignature> signature_for(const ProcDef& def) {
    if (def.signature) {
      try {
        return resolve_names(*def.signature);
      } catch (const BadType& bad) {
        error(bad.kind, def.pos, bad.message);
        return std::nullopt;
      }
    }
    ProcSignature sig;
    for (std::size_t i = 0; i < def.vars.size(); ++i) sig.seq_params.push_back(u_.fresh_seq());
    const auto& ins = def.chans.polarized ? def.chans.inputs : def.chans.unpolarized;
    for (std::size_t i = 0; i < ins.size(); ++i) sig.input_chans.push_back(u_.fresh_chan());
    for (std::size_t i = 0; i < def.chans.outputs.size(); ++i)
      sig.output_chans.push_back(u_.fresh_chan());
    return sig;
  }

  void register_procs() {
    for (const auto& d : out_.program.declarations) {
      const auto* def = std::get_if<ProcDef>(&d);
      if (!def) continue;
      if (procs_.count(def->name)) {
        error(DiagKind::DuplicateDefinition, def->pos,
              "process '" + def->name + "' is already defined");
        continue;
      }
      ProcInfo info;
      info.def = def;
      auto sig = signature_for(*def);
      info.skip = !sig;
      if (sig) info.sig = *sig;
      if (!def->chans.polarized) {
        info.skip = true;
        for (const auto& name : def->chans.unpolarized)
          error(DiagKind::PolarityViolation, def->pos,
                "channel '" + name + "' of '" + def->name +
                    "' has no polarity; list it as '| inputs => outputs'",
                name);
      } else if (sig && !context_matches(*def, *sig)) {
        info.skip = true;
      }
      procs_.emplace(def->name, std::move(info));
    }
  }

  bool context_matches(const ProcDef& def, const ProcSignature& sig) {
    bool ok = true;
    auto compare = [&](std::size_t have, std::size_t want, const char* what) {
      if (have == want) return;
      ok = false;
      error(DiagKind::ArityMismatch, def.pos,
            "'" + (def.name.empty() ? std::string("stored process") : def.name) + "' names " +
                std::to_string(have) + " " + what + " but its signature has " +
                std::to_string(want));
    };
    compare(def.vars.size(), sig.seq_params.size(), "variable(s)");
    compare(def.chans.inputs.size(), sig.input_chans.size(), "input channel(s)");
    compare(def.chans.outputs.size(), sig.output_chans.size(), "output channel(s)");
    return ok;
  }

  // --- process bodies ----------------------------------------------------

  void check_proc(const ProcDef& def) {
    auto it = procs_.find(def.name);
    if (it == procs_.end() || it->second.def != &def || it->second.skip) return;
    proc_ = def.name;
    check_definition(def, it->second.sig, {});
  }

  void check_definition(const ProcDef& def, const ProcSignature& sig, SeqCtx seq) {
    for (std::size_t i = 0; i < def.vars.size(); ++i)
      seq.insert_or_assign(def.vars[i], sig.seq_params[i]);
    ChanCtx ch;
    auto bind = [&](const std::string& name, const ChanType& t, Polarity p) {
      if (!ch.emplace(name, ChanEntry{t, p}).second)
        error(DiagKind::LinearityReuse, def.pos, "channel '" + name + "' is listed twice", name);
    };
    for (std::size_t i = 0; i < def.chans.inputs.size(); ++i)
      bind(def.chans.inputs[i], sig.input_chans[i], Polarity::Input);
    for (std::size_t i = 0; i < def.chans.outputs.size(); ++i)
      bind(def.chans.outputs[i], sig.output_chans[i], Polarity::Output);
    process_body(def.body, seq, ch, def.pos);
  }

  /// A body that is a whole process: it must end the process.
  void process_body(const Body& body, const SeqCtx& seq, ChanCtx& ch, SourcePos start) {
    Flow f = check_body(body, seq, ch);
    if (f != Flow::Continues) return;
    SourcePos pos = body.empty() ? start : body.back().pos;
    auto live = alive_names(ch);
    if (live.empty()) {
      error(DiagKind::HaltNotLast, pos,
            "the process runs out of commands without ending; close the last channel with halt");
      return;
    }
    for (const auto& name : live)
      error(DiagKind::LinearityDrop, pos,
            "channel '" + name + "' is never consumed (type " + show(ch.at(name).type) + ", " +
                polarity_word(ch.at(name).pol) + " polarity)",
            name, ch.at(name).type);
  }

  Flow check_body(const Body& body, SeqCtx seq, ChanCtx& ch) {
    for (std::size_t i = 0; i < body.size(); ++i) {
      Flow f = check_command(body[i], seq, ch);
      if (f == Flow::Aborted) return f;
      if (f == Flow::Ends) {
        if (i + 1 < body.size()) {
          error(DiagKind::HaltNotLast, body[i + 1].pos,
                "command follows a command that ends the process");
          return Flow::Aborted;
        }
        return f;
      }
    }
    return Flow::Continues;
  }

  ChanEntry* lookup(ChanCtx& ch, const std::string& name, SourcePos pos) {
    auto it = ch.find(name);
    if (it == ch.end()) {
      error(DiagKind::UnknownName, pos, "unknown channel '" + name + "'", name);
      return nullptr;
    }
    if (!it->second.alive) {
      error(DiagKind::LinearityReuse, pos, "channel '" + name + "' was already consumed", name,
            it->second.type);
      return nullptr;
    }
    return &it->second;
  }

  void annotate(SourcePos pos, const std::string& name, const ChanEntry& e, CommandKind cmd) {
    out_.channels.push_back({pos, proc_, name, e.type, e.pol, cmd});
  }

  ChanType shape_for(CommandKind cmd, Polarity p, const ProtocolDecl* decl) {
    bool out = p == Polarity::Output;
    auto fresh_args = [&] {
      std::vector<SeqType> args;
      for (std::size_t i = 0; i < decl->seq_params.size(); ++i) args.push_back(u_.fresh_seq());
      return args;
    };
    switch (cmd) {
      case CommandKind::Put:
        return out ? ChanType::put(u_.fresh_seq(), u_.fresh_chan())
                   : ChanType::get(u_.fresh_seq(), u_.fresh_chan());
      case CommandKind::Get:
        return out ? ChanType::get(u_.fresh_seq(), u_.fresh_chan())
                   : ChanType::put(u_.fresh_seq(), u_.fresh_chan());
      case CommandKind::Fork:
        return out ? ChanType::tensor(u_.fresh_chan(), u_.fresh_chan())
                   : ChanType::par(u_.fresh_chan(), u_.fresh_chan());
      case CommandKind::Split:
        return out ? ChanType::par(u_.fresh_chan(), u_.fresh_chan())
                   : ChanType::tensor(u_.fresh_chan(), u_.fresh_chan());
      case CommandKind::HPut:
      case CommandKind::HCase: return decl->apply(fresh_args());
      case CommandKind::Neg: return ChanType::neg(u_.fresh_chan());
      default: return ChanType::top_bot();
    }
  }

  /// The entry's type, forced to the head `cmd` needs, or nothing after
  /// reporting why the command is not allowed.
  std::optional<ChanType> require(ChanEntry& e, const std::string& name, CommandKind cmd,
                                  SourcePos pos, const ProtocolDecl* decl = nullptr) {
    ChanType t = u_.resolve(e.type);
    if (t.kind() == ChanType::Kind::Var) {
      ChanType shape = shape_for(cmd, e.pol, decl);
      u_.unify(t, shape);
      t = shape;
    }
    if (allowed_commands(t, e.pol).count(cmd)) return t;
    std::string msg = "'" + std::string(to_string(cmd)) + "' is not allowed on channel '" + name +
                      "' of type " + show(t) + " at " + polarity_word(e.pol) + " polarity";
    if (allowed_commands(t, opposite(e.pol)).count(cmd)) {
      error(DiagKind::PolarityViolation, pos,
            msg + "; it is only legal at the " + polarity_word(opposite(e.pol)) + " end", name, t);
    } else {
      error(DiagKind::IllegalCommand, pos, msg, name, t);
    }
    return std::nullopt;
  }

  const ProtocolDecl* handle_decl(const std::string& handle, SourcePos pos) {
    auto it = handle_owner_.find(handle);
    if (it == handle_owner_.end()) {
      error(DiagKind::HandleUnknown, pos, "unknown handle '" + handle + "'");
      return nullptr;
    }
    return &out_.protocols.at(it->second);
  }

  std::optional<SeqType> infer(const Expr& e, const SeqCtx& seq) {
    switch (e.kind) {
      case Expr::Kind::Int: return SeqType::int_type();
      case Expr::Kind::Char: return SeqType::char_type();
      case Expr::Kind::String: return SeqType::string_type();
      case Expr::Kind::Bool: return SeqType::bool_type();
      case Expr::Kind::Var: {
        auto it = seq.find(e.text);
        if (it == seq.end()) {
          error(DiagKind::UnknownName, e.pos, "unknown variable '" + e.text + "'");
          return std::nullopt;
        }
        return it->second;
      }
      case Expr::Kind::StoreName: {
        auto it = procs_.find(e.text);
        if (it == procs_.end()) {
          error(DiagKind::UnknownName, e.pos, "unknown process '" + e.text + "'");
          return std::nullopt;
        }
        return SeqType::store(it->second.sig);
      }
      case Expr::Kind::StoreAnon: {
        const ProcDef& def = *e.anonymous;
        ProcSignature sig;
        try {
          sig = resolve_names(*def.signature);
        } catch (const BadType& bad) {
          error(bad.kind, def.pos, bad.message);
          return std::nullopt;
        }
        if (!def.chans.polarized) {
          error(DiagKind::PolarityViolation, def.pos,
                "stored process channels need a polarity; list them as '| inputs => outputs'");
          return std::nullopt;
        }
        if (!context_matches(def, sig)) return std::nullopt;
        std::string outer = proc_;
        proc_ = outer + "/store";
        check_definition(def, sig, seq);
        proc_ = outer;
        return SeqType::store(sig);
      }
    }
    return std::nullopt;
  }

  bool expect_seq(const SeqType& actual, const SeqType& expected, SourcePos pos,
                  const std::string& what) {
    if (auto err = u_.unify(actual, expected)) {
      error(DiagKind::SeqMismatch, pos,
            what + " has type " + show(actual) + " but " + show(expected) + " is expected");
      return false;
    }
    return true;
  }

  Flow check_command(const Command& cmd, SeqCtx& seq, ChanCtx& ch) {
    const SourcePos pos = cmd.pos;
    return std::visit(
        overloaded{
            [&](const PutCmd& x) -> Flow {
              ChanEntry* e = lookup(ch, x.chan, pos);
              if (!e) return Flow::Aborted;
              auto t = require(*e, x.chan, CommandKind::Put, pos);
              if (!t) return Flow::Aborted;
              annotate(pos, x.chan, *e, CommandKind::Put);
              auto vt = infer(x.value, seq);
              if (!vt || !expect_seq(*vt, t->message(), x.value.pos, "message"))
                return Flow::Aborted;
              e->type = t->rest();
              return Flow::Continues;
            },
            [&](const GetCmd& x) -> Flow {
              ChanEntry* e = lookup(ch, x.chan, pos);
              if (!e) return Flow::Aborted;
              auto t = require(*e, x.chan, CommandKind::Get, pos);
              if (!t) return Flow::Aborted;
              annotate(pos, x.chan, *e, CommandKind::Get);
              seq.insert_or_assign(x.binder, t->message());
              e->type = t->rest();
              return Flow::Continues;
            },
            [&](const HPutCmd& x) -> Flow {
              ChanEntry* e = lookup(ch, x.chan, pos);
              if (!e) return Flow::Aborted;
              const ProtocolDecl* decl = handle_decl(x.handle, pos);
              if (!decl) return Flow::Aborted;
              auto t = require(*e, x.chan, CommandKind::HPut, pos, decl);
              if (!t) return Flow::Aborted;
              if (t->name() != decl->name) {
                error(DiagKind::HandleUnknown, pos,
                      "handle '" + x.handle + "' belongs to '" + decl->name + "', but channel '" +
                          x.chan + "' has type " + show(*t),
                      x.chan, *t);
                return Flow::Aborted;
              }
              annotate(pos, x.chan, *e, CommandKind::HPut);
              e->type = unfold_handle(*decl, x.handle, *t);
              return Flow::Continues;
            },
            [&](const HCaseCmd& x) -> Flow { return check_hcase(x, pos, seq, ch); },
            [&](const CloseCmd& x) -> Flow {
              ChanEntry* e = lookup(ch, x.chan, pos);
              if (!e) return Flow::Aborted;
              if (!require(*e, x.chan, CommandKind::Close, pos)) return Flow::Aborted;
              annotate(pos, x.chan, *e, CommandKind::Close);
              e->alive = false;
              return Flow::Continues;
            },
            [&](const HaltCmd& x) -> Flow {
              ChanEntry* e = lookup(ch, x.chan, pos);
              if (!e) return Flow::Aborted;
              if (!require(*e, x.chan, CommandKind::Halt, pos)) return Flow::Aborted;
              annotate(pos, x.chan, *e, CommandKind::Halt);
              e->alive = false;
              auto others = alive_names(ch);
              if (!others.empty()) {
                std::vector<std::string> v(others.begin(), others.end());
                error(DiagKind::HaltNotLast, pos,
                      "halt on '" + x.chan + "' while " + list_names(v) +
                          " still open; close them first",
                      v.front());
                return Flow::Aborted;
              }
              return Flow::Ends;
            },
            [&](const ForkCmd& x) -> Flow { return check_fork(x, pos, seq, ch); },
            [&](const SplitCmd& x) -> Flow {
              ChanEntry* e = lookup(ch, x.chan, pos);
              if (!e) return Flow::Aborted;
              auto t = require(*e, x.chan, CommandKind::Split, pos);
              if (!t) return Flow::Aborted;
              annotate(pos, x.chan, *e, CommandKind::Split);
              Polarity p = e->pol;
              e->alive = false;
              for (const auto* n : {&x.first, &x.second}) {
                auto it = ch.find(*n);
                if ((it != ch.end() && it->second.alive) || x.first == x.second) {
                  error(DiagKind::LinearityReuse, pos,
                        "split would rebind '" + *n + "' while it is still in use", *n);
                  return Flow::Aborted;
                }
              }
              ch.insert_or_assign(x.first, ChanEntry{t->left(), p});
              ch.insert_or_assign(x.second, ChanEntry{t->right(), p});
              return Flow::Continues;
            },
            [&](const PlugCmd& x) -> Flow { return check_plug(x, pos, seq, ch); },
            [&](const RaceCmd& x) -> Flow { return check_race(x, pos, seq, ch); },
            [&](const CallCmd& x) -> Flow {
              auto it = procs_.find(x.proc);
              if (it == procs_.end()) {
                error(DiagKind::UnknownName, pos, "unknown process '" + x.proc + "'");
                return Flow::Aborted;
              }
              return check_args(it->second.sig, x.seq_args, x.chans, CommandKind::Call,
                                "'" + x.proc + "'", pos, seq, ch);
            },
            [&](const UseCmd& x) -> Flow {
              auto st = infer(x.stored, seq);
              if (!st) return Flow::Aborted;
              SeqType t = u_.resolve(*st);
              if (t.kind() == SeqType::Kind::Var) {
                ProcSignature shape;
                for (std::size_t i = 0; i < x.seq_args.size(); ++i)
                  shape.seq_params.push_back(u_.fresh_seq());
                for (std::size_t i = 0; i < x.chans.inputs.size(); ++i)
                  shape.input_chans.push_back(u_.fresh_chan());
                for (std::size_t i = 0; i < x.chans.outputs.size(); ++i)
                  shape.output_chans.push_back(u_.fresh_chan());
                SeqType store = SeqType::store(shape);
                u_.unify(t, store);
                t = store;
              }
              if (t.kind() != SeqType::Kind::Store) {
                error(DiagKind::SeqMismatch, x.stored.pos,
                      "use needs a stored process but the value has type " + show(t));
                return Flow::Aborted;
              }
              return check_args(t.signature(), x.seq_args, x.chans, CommandKind::Use,
                                "the stored process", pos, seq, ch);
            },
            [&](const LinkCmd& x) -> Flow {
              ChanEntry* a = lookup(ch, x.left, pos);
              if (!a) return Flow::Aborted;
              ChanEntry* b = lookup(ch, x.right, pos);
              if (!b) return Flow::Aborted;
              if (x.left == x.right || a->pol == b->pol) {
                error(DiagKind::PolarityViolation, pos,
                      "'|=|' links an input end with an output end, but '" + x.left + "' and '" +
                          x.right + "' are both at " + polarity_word(a->pol) + " polarity",
                      x.left, a->type);
                return Flow::Aborted;
              }
              if (u_.unify(a->type, b->type)) {
                error(DiagKind::UnificationFailure, pos,
                      "'|=|' needs equal types, but '" + x.left + "' has type " + show(a->type) +
                          " and '" + x.right + "' has type " + show(b->type),
                      x.left, a->type);
                return Flow::Aborted;
              }
              annotate(pos, x.left, *a, CommandKind::Link);
              annotate(pos, x.right, *b, CommandKind::Link);
              a->alive = b->alive = false;
              return leftovers(ch, pos);
            },
            [&](const NegCmd& x) -> Flow {
              ChanEntry* e = lookup(ch, x.chan, pos);
              if (!e) return Flow::Aborted;
              auto t = require(*e, x.chan, CommandKind::Neg, pos);
              if (!t) return Flow::Aborted;
              annotate(pos, x.chan, *e, CommandKind::Neg);
              Polarity p = opposite(e->pol);
              e->alive = false;
              auto it = ch.find(x.rebound);
              if (it != ch.end() && it->second.alive) {
                error(DiagKind::LinearityReuse, pos,
                      "neg would rebind '" + x.rebound + "' while it is still in use", x.rebound);
                return Flow::Aborted;
              }
              ch.insert_or_assign(x.rebound, ChanEntry{t->inner(), p});
              return Flow::Continues;
            },
            [&](const OnDoCmd&) -> Flow { return check_body(elaborate(Body{cmd}), seq, ch); },
        },
        cmd.node);
  }

  Flow leftovers(ChanCtx& ch, SourcePos pos) {
    auto live = alive_names(ch);
    for (const auto& name : live)
      error(DiagKind::LinearityDrop, pos,
            "channel '" + name + "' is still open when the process ends (type " +
                show(ch.at(name).type) + ")",
            name, ch.at(name).type);
    return live.empty() ? Flow::Ends : Flow::Aborted;
  }

  Flow check_args(const ProcSignature& sig, const std::vector<Expr>& seq_args,
                  const ChannelLists& chans, CommandKind kind, const std::string& callee,
                  SourcePos pos, SeqCtx& seq, ChanCtx& ch) {
    if (!chans.polarized) {
      for (const auto& name : chans.unpolarized)
        error(DiagKind::PolarityViolation, pos,
              "channel '" + name + "' is passed to " + callee +
                  " without a polarity; write '| inputs => outputs'",
              name);
      return Flow::Aborted;
    }
    // Channels bind by position across inputs then outputs; the held
    // polarity of each must match its parameter.
    std::vector<std::string> names = chans.inputs;
    names.insert(names.end(), chans.outputs.begin(), chans.outputs.end());
    std::vector<std::pair<ChanType, Polarity>> params;
    for (const auto& t : sig.input_chans) params.emplace_back(t, Polarity::Input);
    for (const auto& t : sig.output_chans) params.emplace_back(t, Polarity::Output);
    if (seq_args.size() != sig.seq_params.size() || names.size() != params.size()) {
      error(DiagKind::ArityMismatch, pos,
            callee + " expects " + std::to_string(sig.seq_params.size()) + " value(s) and " +
                std::to_string(params.size()) + " channel(s), but is given " +
                std::to_string(seq_args.size()) + " and " + std::to_string(names.size()));
      return Flow::Aborted;
    }
    for (std::size_t i = 0; i < seq_args.size(); ++i) {
      auto t = infer(seq_args[i], seq);
      if (!t ||
          !expect_seq(*t, sig.seq_params[i], seq_args[i].pos, "argument " + std::to_string(i + 1)))
        return Flow::Aborted;
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
      const auto& [type, want] = params[i];
      ChanEntry* e = lookup(ch, names[i], pos);
      if (!e) return Flow::Aborted;
      if (e->pol != want) {
        error(DiagKind::PolarityViolation, pos,
              "channel '" + names[i] + "' is held at " + polarity_word(e->pol) + " polarity but " +
                  callee + " takes it at " + polarity_word(want) + " polarity",
              names[i], e->type);
        return Flow::Aborted;
      }
      if (u_.unify(e->type, type)) {
        error(DiagKind::UnificationFailure, pos,
              "channel '" + names[i] + "' has type " + show(e->type) + " but " + callee +
                  " expects " + show(type),
              names[i], e->type);
        return Flow::Aborted;
      }
      annotate(pos, names[i], *e, kind);
      e->alive = false;
    }
    return leftovers(ch, pos);
  }

  struct ArmResult {
    Flow flow;
    ChanCtx ctx;
    std::string label;
    SourcePos pos;
  };

  /// Merges sibling arms. Arms that continue must leave the same live
  /// channels behind; all arms must agree on whether they continue.
  Flow join(std::vector<ArmResult>& arms, ChanCtx& ch, SourcePos pos, CommandKind kind) {
    PartitionAnnotation part{pos, proc_, kind, alive_names(ch), {}};
    for (const auto& a : arms) {
      std::set<std::string> used;
      auto after = a.flow == Flow::Continues ? alive_names(a.ctx) : std::set<std::string>{};
      for (const auto& n : part.available)
        if (!after.count(n)) used.insert(n);
      part.consumed.push_back(std::move(used));
    }
    bool aborted = false, ends = false, continues = false;
    for (const auto& a : arms) {
      aborted |= a.flow == Flow::Aborted;
      ends |= a.flow == Flow::Ends;
      continues |= a.flow == Flow::Continues;
    }
    if (aborted) return Flow::Aborted;
    if (!continues) {
      out_.partitions.push_back(std::move(part));
      return Flow::Ends;
    }
    if (ends) {
      for (const auto& a : arms) {
        if (a.flow != Flow::Continues) continue;
        auto live = alive_names(a.ctx);
        std::string first = live.empty() ? std::string() : *live.begin();
        error(DiagKind::LinearityDrop, a.pos,
              "arm '" + a.label +
                  "' continues after the branch while a sibling arm ends the process; "
                  "every arm must consume the same channels",
              first);
        return Flow::Aborted;
      }
    }
    const ArmResult& ref = *std::find_if(
        arms.begin(), arms.end(), [](const ArmResult& a) { return a.flow == Flow::Continues; });
    auto ref_live = alive_names(ref.ctx);
    for (const auto& a : arms) {
      if (&a == &ref) continue;
      auto live = alive_names(a.ctx);
      for (const auto& n : ref_live) {
        if (!live.count(n)) {
          error(DiagKind::LinearityDrop, a.pos,
                "arm '" + a.label + "' consumes channel '" + n + "' but arm '" + ref.label +
                    "' leaves it open",
                n);
          return Flow::Aborted;
        }
      }
      for (const auto& n : live) {
        if (!ref_live.count(n)) {
          error(DiagKind::LinearityDrop, ref.pos,
                "arm '" + ref.label + "' consumes channel '" + n + "' but arm '" + a.label +
                    "' leaves it open",
                n);
          return Flow::Aborted;
        }
        const ChanEntry& x = ref.ctx.at(n);
        const ChanEntry& y = a.ctx.at(n);
        if (x.pol != y.pol) {
          error(DiagKind::PolarityViolation, a.pos,
                "channel '" + n + "' ends the arms at different polarities", n);
          return Flow::Aborted;
        }
        if (u_.unify(x.type, y.type)) {
          error(DiagKind::UnificationFailure, a.pos,
                "channel '" + n + "' leaves arm '" + ref.label + "' as " + show(x.type) +
                    " but arm '" + a.label + "' as " + show(y.type),
                n, x.type);
          return Flow::Aborted;
        }
      }
    }
    ch = ref.ctx;
    out_.partitions.push_back(std::move(part));
    return Flow::Continues;
  }

  Flow check_hcase(const HCaseCmd& x, SourcePos pos, const SeqCtx& seq, ChanCtx& ch) {
    ChanEntry* e = lookup(ch, x.chan, pos);
    if (!e) return Flow::Aborted;
    if (x.arms.empty()) {
      error(DiagKind::IllegalCommand, pos, "hcase needs at least one arm", x.chan);
      return Flow::Aborted;
    }
    ChanType known = u_.resolve(e->type);
    const ProtocolDecl* decl = nullptr;
    if (known.kind() == ChanType::Kind::Proto || known.kind() == ChanType::Kind::Coproto)
      decl = &out_.protocols.at(known.name());
    else if (!(decl = handle_decl(x.arms.front().handle, x.arms.front().pos)))
      return Flow::Aborted;
    auto t = require(*e, x.chan, CommandKind::HCase, pos, decl);
    if (!t) return Flow::Aborted;
    annotate(pos, x.chan, *e, CommandKind::HCase);

    std::set<std::string> seen;
    bool bad = false;
    for (const auto& arm : x.arms) {
      if (!decl->find_handle(arm.handle)) {
        error(DiagKind::HandleUnknown, arm.pos,
              "'" + arm.handle + "' is not a handle of '" + decl->name + "'", x.chan, *t);
        bad = true;
      } else if (!seen.insert(arm.handle).second) {
        error(DiagKind::HandleDuplicate, arm.pos,
              "handle '" + arm.handle + "' has more than one arm", x.chan, *t);
        bad = true;
      }
    }
    for (const auto& h : decl->handles) {
      if (!seen.count(h.name) && !bad) {
        error(DiagKind::IllegalCommand, pos,
              "hcase on '" + x.chan + "' has no arm for handle '" + h.name + "'", x.chan, *t);
        bad = true;
      }
    }
    if (bad) return Flow::Aborted;

    std::vector<ArmResult> arms;
    for (const auto& arm : x.arms) {
      ChanCtx local = ch;
      local.at(x.chan).type = unfold_handle(*decl, arm.handle, *t);
      Flow f = check_body(arm.body, seq, local);
      arms.push_back({f, std::move(local), arm.handle, arm.pos});
    }
    return join(arms, ch, pos, CommandKind::HCase);
  }

  Flow check_race(const RaceCmd& x, SourcePos pos, const SeqCtx& seq, ChanCtx& ch) {
    std::set<std::string> seen;
    for (const auto& arm : x.arms) {
      if (!seen.insert(arm.chan).second) {
        error(DiagKind::LinearityReuse, arm.pos,
              "channel '" + arm.chan + "' is raced more than once", arm.chan);
        return Flow::Aborted;
      }
      ChanEntry* e = lookup(ch, arm.chan, arm.pos);
      if (!e) return Flow::Aborted;
      ChanType t = u_.resolve(e->type);
      if (t.kind() == ChanType::Kind::Var) {
        ChanType shape = e->pol == Polarity::Input ? ChanType::put(u_.fresh_seq(), u_.fresh_chan())
                                                   : ChanType::get(u_.fresh_seq(), u_.fresh_chan());
        u_.unify(t, shape);
        t = shape;
      }
      if (!can_race(t, e->pol)) {
        error(DiagKind::RaceArmNotReceiving, arm.pos,
              "race arm '" + arm.chan + "' must be able to get a value next, but it has type " +
                  show(t) + " at " + polarity_word(e->pol) + " polarity",
              arm.chan, t);
        return Flow::Aborted;
      }
      annotate(arm.pos, arm.chan, *e, CommandKind::Race);
    }
    std::vector<ArmResult> arms;
    for (const auto& arm : x.arms) {
      ChanCtx local = ch;
      Flow f = check_body(arm.body, seq, local);
      arms.push_back({f, std::move(local), arm.chan, arm.pos});
    }
    return join(arms, ch, pos, CommandKind::Race);
  }

  Flow check_fork(const ForkCmd& x, SourcePos pos, const SeqCtx& seq, ChanCtx& ch) {
    ChanEntry* e = lookup(ch, x.chan, pos);
    if (!e) return Flow::Aborted;
    auto t = require(*e, x.chan, CommandKind::Fork, pos);
    if (!t) return Flow::Aborted;
    annotate(pos, x.chan, *e, CommandKind::Fork);
    Polarity p = e->pol;
    e->alive = false;
    auto live = alive_names(ch);
    ForkLayout layout = layout_fork(x, live);
    bool bad = false;
    for (const auto& n : layout.dropped) {
      error(DiagKind::LinearityDrop, pos, "channel '" + n + "' is used by neither fork branch", n,
            ch.at(n).type);
      bad = true;
    }
    for (const auto& n : layout.shared) {
      error(DiagKind::LinearityReuse, pos, "channel '" + n + "' is used by both fork branches", n,
            ch.at(n).type);
      bad = true;
    }
    if (x.first.chan == x.second.chan) {
      error(DiagKind::LinearityReuse, pos,
            "both fork branches bind the name '" + x.first.chan + "'", x.first.chan);
      bad = true;
    }
    if (bad) return Flow::Aborted;

    PartitionAnnotation part{pos, proc_, CommandKind::Fork, live, {}};
    const ForkBranch* branches[] = {&x.first, &x.second};
    const std::vector<std::string>* slices[] = {&layout.first, &layout.second};
    const ChanType parts[] = {t->left(), t->right()};
    for (int i = 0; i < 2; ++i) {
      ChanCtx local;
      for (const auto& n : *slices[i]) local.emplace(n, ch.at(n));
      if (local.count(branches[i]->chan)) {
        error(DiagKind::LinearityReuse, branches[i]->pos,
              "fork branch name '" + branches[i]->chan + "' shadows a live channel",
              branches[i]->chan);
        return Flow::Aborted;
      }
      local.emplace(branches[i]->chan, ChanEntry{parts[i], p});
      process_body(branches[i]->body, seq, local, branches[i]->pos);
      part.consumed.emplace_back(slices[i]->begin(), slices[i]->end());
    }
    for (auto& [n, entry] : ch) entry.alive = false;
    out_.partitions.push_back(std::move(part));
    return Flow::Ends;
  }

  Flow check_plug(const PlugCmd& x, SourcePos pos, const SeqCtx& seq, ChanCtx& ch) {
    if (x.branches.size() < 2) {
      error(DiagKind::IllegalCommand, pos, "plug needs at least two branches");
      return Flow::Aborted;
    }
    auto live = alive_names(ch);
    PlugLayout layout = layout_plug(x, live);
    bool bad = false;
    for (const auto& n : layout.dropped) {
      error(DiagKind::LinearityDrop, pos, "channel '" + n + "' is used by no plug branch", n,
            ch.at(n).type);
      bad = true;
    }
    for (const auto& n : layout.shared) {
      error(DiagKind::LinearityReuse, pos,
            "channel '" + n + "' is used by more than one plug branch", n, ch.at(n).type);
      bad = true;
    }

    std::vector<std::size_t> parent(x.branches.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
      while (parent[i] != i) i = parent[i] = parent[parent[i]];
      return i;
    };
    for (const auto& pc : layout.plugged) {
      if (pc.branches.size() == 1) {
        error(DiagKind::LinearityDrop, pos,
              "plugged channel '" + pc.name + "' is used by only one branch", pc.name);
        bad = true;
        continue;
      }
      if (pc.branches.size() > 2) {
        error(DiagKind::LinearityReuse, pos,
              "plugged channel '" + pc.name + "' is used by " + std::to_string(pc.branches.size()) +
                  " branches; a channel joins exactly two",
              pc.name);
        bad = true;
        continue;
      }
      if (pc.conflict) {
        error(DiagKind::PlugPolarityMismatch, pos,
              "plugged channel '" + pc.name + "' is held at the same polarity by both branches",
              pc.name);
        bad = true;
      }
      std::size_t a = find(pc.branches[0]), b = find(pc.branches[1]);
      if (a == b) {
        error(DiagKind::PlugCycle, pos,
              "plugged channel '" + pc.name + "' closes a cycle in the process network", pc.name);
        bad = true;
      } else {
        parent[a] = b;
      }
    }
    if (!bad) {
      std::set<std::size_t> roots;
      for (std::size_t i = 0; i < x.branches.size(); ++i) roots.insert(find(i));
      if (roots.size() > 1) {
        error(DiagKind::PlugCycle, pos,
              "plug branches do not form one connected network (" + std::to_string(roots.size()) +
                  " separate parts)");
        bad = true;
      }
    }
    if (bad) return Flow::Aborted;

    std::vector<ChanCtx> locals(x.branches.size());
    for (std::size_t i = 0; i < x.branches.size(); ++i)
      for (const auto& n : layout.slices[i]) locals[i].emplace(n, ch.at(n));
    for (const auto& pc : layout.plugged) {
      ChanType t = u_.fresh_chan();
      out_.plugs.push_back({pos, proc_, pc.name, t});
      locals[*pc.output_branch].emplace(pc.name, ChanEntry{t, Polarity::Output});
      locals[*pc.input_branch].emplace(pc.name, ChanEntry{t, Polarity::Input});
    }
    for (std::size_t i = 0; i < x.branches.size(); ++i) {
      SourcePos at = x.branches[i].empty() ? pos : x.branches[i].front().pos;
      process_body(x.branches[i], seq, locals[i], at);
    }
    for (auto& [n, entry] : ch) entry.alive = false;
    return Flow::Ends;
  }

  // --- whole program -----------------------------------------------------

  void finish_program() {
    for (const auto& [name, info] : procs_)
      if (info.def) out_.signatures.emplace(name, u_.zonk(info.sig));
    for (auto& a : out_.channels) a.type = u_.zonk(a.type);
    for (auto& p : out_.plugs) p.type = u_.zonk(p.type);

    for (const auto& p : out_.plugs) {
      if (p.type.kind() == ChanType::Kind::Coproto && p.type.name() == console_protocol().name)
        error(DiagKind::IllegalCommand, p.pos,
              "plug cannot create the service channel '" + p.channel +
                  "'; Console channels come only from run",
              p.channel, p.type);
    }

    auto run = out_.signatures.find("run");
    if (run != out_.signatures.end()) {
      const ProcSignature& sig = run->second;
      const ProcDef* def = procs_.at("run").def;
      bool services_only = sig.output_chans.empty();
      for (const auto& t : sig.input_chans)
        services_only &= t.kind() == ChanType::Kind::Coproto && t.name() == console_protocol().name;
      if (!services_only && !procs_.at("run").skip)
        error(DiagKind::IllegalCommand, def->pos,
              "run may only hold Console service channels, at input polarity");
      else if (sig.input_chans.size() > 1)
        error(DiagKind::IllegalCommand, def->pos, "run may hold at most one Console channel");
    }

    if (!errors_.empty()) return;
    std::set<std::string> reported;
    auto unresolved = [&](const std::string& proc, SourcePos pos, const std::string& what) {
      if (!reported.insert(proc).second) return;
      error(DiagKind::UnificationFailure, pos,
            "could not infer a complete type for " + what + " in '" + proc +
                "'; add a type signature");
    };
    for (const auto& [name, sig] : out_.signatures)
      if (has_vars(sig)) unresolved(name, procs_.at(name).def->pos, "the signature");
    for (const auto& a : out_.channels)
      if (has_vars(a.type)) unresolved(a.proc, a.pos, "channel '" + a.channel + "'");
    for (const auto& p : out_.plugs)
      if (has_vars(p.type)) unresolved(p.proc, p.pos, "channel '" + p.channel + "'");
  }

  Unifier u_;
  std::vector<Diagnostic> errors_;
  std::map<std::string, std::string> handle_owner_;
  std::map<std::string, ProcInfo> procs_;
  std::string proc_;
  TypedProgram out_;
};

}  // namespace

CheckResult check_program(const SourceProgram& program) { return Checker().run(program); }

}  // namespace campl
