#include "support.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "campl/parser.hpp"

namespace campl::testing {

std::string corpus_file(const std::string& stem) {
  return std::string(CAMPL_CORPUS_DIR) + "/" + stem + ".campl";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> corpus_stems() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(CAMPL_CORPUS_DIR))
    if (e.path().extension() == ".campl") out.push_back(e.path().stem().string());
  std::sort(out.begin(), out.end());
  return out;
}

SourceProgram parse_ok(const std::string& source) {
  ParseResult r = parse_source(source);
  if (!r.ok()) throw std::runtime_error(format_text(r.errors.front(), "<source>"));
  return std::move(r.program);
}

RunSummary run_source(const std::string& source, std::uint64_t seed,
                      std::vector<std::string> script) {
  ServiceConfig cfg;
  cfg.mode = ServiceConfig::Mode::Scripted;
  cfg.script = std::move(script);
  Machine m(parse_ok(source), seed, cfg);
  RunSummary s;
  s.outcome = m.run_to_completion();
  for (const auto& e : s.outcome.trace) s.trace.push_back(e.format());
  s.winners = m.race_winners();
  return s;
}

bool is_forest(const Topology& t) {
  std::map<long, long> parent;
  for (long n : t.nodes()) parent[n] = n;
  std::function<long(long)> find = [&](long x) {
    if (!parent.count(x)) parent[x] = x;
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : t.edges()) {
    long a = find(e.a), b = find(e.b);
    if (a == b) return false;
    parent[a] = b;
  }
  return true;
}

std::optional<std::string> ends_conserved(const Machine& m) {
  std::map<int, ChannelView> chans;
  for (const auto& c : m.channels()) chans.emplace(c.id, c);
  for (const auto& [id, c] : chans) {
    if (c.output.kind == EndOwner::Kind::None && !c.output_closed)
      return "channel #" + std::to_string(id) + " lost its output end";
    if (c.input.kind == EndOwner::Kind::None && !c.input_closed)
      return "channel #" + std::to_string(id) + " lost its input end";
  }
  for (const auto& p : m.processes()) {
    if (p.status == ProcessView::Status::Finished && !p.channels.empty())
      return "finished pid " + std::to_string(p.pid) + " still holds channels";
    for (const auto& [name, id] : p.channels) {
      auto it = chans.find(id);
      if (it == chans.end())
        return "pid " + std::to_string(p.pid) + " holds vanished channel " + name;
      const auto& c = it->second;
      bool mine = (c.output.kind == EndOwner::Kind::Process && c.output.id == p.pid) ||
                  (c.input.kind == EndOwner::Kind::Process && c.input.id == p.pid);
      if (!mine) return "pid " + std::to_string(p.pid) + " holds " + name + " it does not own";
    }
  }
  return std::nullopt;
}

// --- random programs -----------------------------------------------------

namespace {

struct Session {
  struct Step {
    bool output_sends;
    bool text;
  };
  std::vector<Step> steps;
  /// Set when the session ends by splitting into two.
  std::shared_ptr<Session> left, right;
  bool output_forks = true;
};

ChanType type_of(const Session& s, std::size_t i = 0) {
  if (i < s.steps.size()) {
    const auto& st = s.steps[i];
    SeqType msg = st.text ? SeqType::string_type() : SeqType::int_type();
    ChanType rest = type_of(s, i + 1);
    return st.output_sends ? ChanType::put(msg, rest) : ChanType::get(msg, rest);
  }
  if (!s.left) return ChanType::top_bot();
  return s.output_forks ? ChanType::tensor(type_of(*s.left), type_of(*s.right))
                        : ChanType::par(type_of(*s.left), type_of(*s.right));
}

struct Held {
  std::string name;
  std::shared_ptr<Session> session;
  std::size_t pos = 0;
  Polarity end;
};

class Generator {
 public:
  explicit Generator(std::mt19937_64& rng) : rng_(rng) {}

  RandomProgram generate() {
    RandomProgram out;
    int n = pick(2, 6);
    budget_ = 8 - (n - 1);
    std::vector<std::vector<Held>> holds(n);
    std::vector<std::vector<std::string>> ins(n), outs(n);
    for (int i = 1; i < n; ++i) {
      int parent = pick(0, i - 1);
      auto s = session(1);
      std::string name = "c" + std::to_string(channel_++);
      int o = coin(0.5) ? parent : i, in = o == parent ? i : parent;
      holds[o].push_back({name, s, 0, Polarity::Output});
      holds[in].push_back({name, s, 0, Polarity::Input});
      outs[o].push_back(name);
      ins[in].push_back(name);
    }
    std::ostringstream os;
    for (int i = 0; i < n; ++i) {
      os << "proc p" << i;
      if (coin(0.5)) {
        ProcSignature sig;
        for (const auto& h : holds[i])
          (h.end == Polarity::Input ? sig.input_chans : sig.output_chans)
              .push_back(type_of(*h.session));
        os << " :: " << render(sig);
      }
      os << " =\n    | " << join(ins[i]) << " => " << join(outs[i]) << " -> do\n";
      vars_.clear();
      emit(holds[i], 8, os);
    }
    os << "proc run =\n    | => -> plug\n";
    for (int i = 0; i < n; ++i)
      os << "        p" << i << "( | " << join(ins[i]) << " => " << join(outs[i]) << " )\n";
    out.source = os.str();
    out.processes = n;
    out.channels = (n - 1) + 2 * forks_;
    out.max_depth = max_depth_;
    return out;
  }

 private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }

  static std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
    return s;
  }

  std::shared_ptr<Session> session(int depth) {
    auto s = std::make_shared<Session>();
    max_depth_ = std::max(max_depth_, depth);
    for (int k = pick(0, 3); k > 0; --k) s->steps.push_back({coin(0.5), coin(0.5)});
    if (depth < 3 && budget_ >= 2 && coin(0.3)) {
      budget_ -= 2;
      ++forks_;
      s->output_forks = coin(0.5);
      s->left = session(depth + 1);
      s->right = session(depth + 1);
    }
    return s;
  }

  std::string literal(bool text) {
    auto& pool = vars_[text];
    if (!pool.empty() && coin(0.4)) return pool[pick(0, static_cast<int>(pool.size()) - 1)];
    return text ? "\"m" + std::to_string(pick(0, 99)) + "\"" : std::to_string(pick(0, 99));
  }

  void emit(std::vector<Held> held, int ind, std::ostringstream& os) {
    std::string pad(ind, ' ');
    while (!held.empty()) {
      auto i = static_cast<std::size_t>(pick(0, static_cast<int>(held.size()) - 1));
      Held& h = held[i];
      const Session& s = *h.session;
      if (h.pos < s.steps.size()) {
        auto st = s.steps[h.pos++];
        if ((h.end == Polarity::Output) == st.output_sends) {
          os << pad << "put " << literal(st.text) << " on " << h.name << '\n';
        } else {
          std::string v = "v" + std::to_string(var_++);
          os << pad << "get " << v << " on " << h.name << '\n';
          vars_[st.text].push_back(v);
        }
        continue;
      }
      if (!s.left) {
        os << pad << (held.size() == 1 ? "halt " : "close ") << h.name << '\n';
        held.erase(held.begin() + static_cast<long>(i));
        continue;
      }
      std::string a = "c" + std::to_string(channel_++), b = "c" + std::to_string(channel_++);
      bool forks = (h.end == Polarity::Output) == s.output_forks;
      if (!forks) {
        os << pad << "split " << h.name << " into " << a << ", " << b << '\n';
        Held l{a, s.left, 0, h.end}, r{b, s.right, 0, h.end};
        held.erase(held.begin() + static_cast<long>(i));
        held.push_back(l);
        held.push_back(r);
        continue;
      }
      Held l{a, s.left, 0, h.end}, r{b, s.right, 0, h.end};
      std::string forked = h.name;
      held.erase(held.begin() + static_cast<long>(i));
      std::vector<Held> first{l}, second{r};
      for (auto& rest : held) (coin(0.5) ? first : second).push_back(rest);
      os << pad << "fork " << forked << " as\n";
      auto saved = vars_;
      os << pad << "    " << a << " -> do\n";
      emit(first, ind + 8, os);
      vars_ = saved;
      os << pad << "    " << b << " -> do\n";
      emit(second, ind + 8, os);
      return;
    }
  }

  std::mt19937_64& rng_;
  int budget_ = 0;
  int channel_ = 0;
  int var_ = 0;
  int max_depth_ = 0;
  int forks_ = 0;
  std::map<bool, std::vector<std::string>> vars_;
};

}  // namespace

RandomProgram random_program(std::mt19937_64& rng) { return Generator(rng).generate(); }

std::optional<ChanType> hand_unify(const Body& output_side, const std::string& output_chan,
                                   const Body& input_side, const std::string& input_chan) {
  auto on = [](const Body& body, const std::string& chan) {
    std::vector<const Command*> out;
    for (const auto& c : body) {
      bool hit = std::visit(overloaded{
                                [&](const PutCmd& x) { return x.chan == chan; },
                                [&](const GetCmd& x) { return x.chan == chan; },
                                [&](const CloseCmd& x) { return x.chan == chan; },
                                [&](const HaltCmd& x) { return x.chan == chan; },
                                [](const auto&) { return false; },
                            },
                            c.node);
      if (hit) out.push_back(&c);
    }
    return out;
  };
  auto o = on(output_side, output_chan), i = on(input_side, input_chan);
  if (o.size() != i.size() || o.empty()) return std::nullopt;

  std::map<std::string, SeqType> env_o, env_i;
  auto type_of_expr = [](const Expr& e,
                         const std::map<std::string, SeqType>& env) -> std::optional<SeqType> {
    switch (e.kind) {
      case Expr::Kind::Int: return SeqType::int_type();
      case Expr::Kind::Char: return SeqType::char_type();
      case Expr::Kind::String: return SeqType::string_type();
      case Expr::Kind::Bool: return SeqType::bool_type();
      case Expr::Kind::Var: {
        auto it = env.find(e.text);
        if (it == env.end()) return std::nullopt;
        return it->second;
      }
      default: return std::nullopt;
    }
  };
  auto is_end = [](const Command* c) {
    return std::holds_alternative<CloseCmd>(c->node) || std::holds_alternative<HaltCmd>(c->node);
  };
  if (!is_end(o.back()) || !is_end(i.back())) return std::nullopt;

  // Build the spine front to back, then fold it from the end.
  std::vector<std::pair<bool, SeqType>> spine;
  for (std::size_t k = 0; k + 1 < o.size(); ++k) {
    const auto* po = std::get_if<PutCmd>(&o[k]->node);
    const auto* gi = std::get_if<GetCmd>(&i[k]->node);
    const auto* go = std::get_if<GetCmd>(&o[k]->node);
    const auto* pi = std::get_if<PutCmd>(&i[k]->node);
    if (po && gi) {
      auto t = type_of_expr(po->value, env_o);
      if (!t) return std::nullopt;
      env_i.insert_or_assign(gi->binder, *t);
      spine.emplace_back(true, *t);
    } else if (go && pi) {
      auto t = type_of_expr(pi->value, env_i);
      if (!t) return std::nullopt;
      env_o.insert_or_assign(go->binder, *t);
      spine.emplace_back(false, *t);
    } else {
      return std::nullopt;
    }
  }
  ChanType t = ChanType::top_bot();
  for (auto it = spine.rbegin(); it != spine.rend(); ++it)
    t = it->first ? ChanType::put(it->second, t) : ChanType::get(it->second, t);
  return t;
}

}  // namespace campl::testing
