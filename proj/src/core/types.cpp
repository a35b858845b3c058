#include "campl/types.hpp"

#include <cassert>
#include <sstream>
#include <stdexcept>

namespace campl {

std::string_view to_string(Polarity p) { return p == Polarity::Output ? "Output" : "Input"; }

struct SeqType::Node {
  Kind kind;
  std::string name;
  int var_id = -1;
  std::shared_ptr<const ProcSignature> signature;
};

struct ChanType::Node {
  Kind kind;
  std::string name;
  int var_id = -1;
  std::vector<SeqType> seqs;       // Put/Get payload, or protocol arguments
  std::vector<ChanType> children;  // rest, or left/right, or Neg operand
};

namespace {

template <typename N>
std::shared_ptr<const N> make_node(N node) {
  return std::make_shared<const N>(std::move(node));
}

}  // namespace

// --- SeqType -----------------------------------------------------------------

SeqType SeqType::int_type() {
  static const SeqType t(make_node(Node{Kind::Int, "", -1, nullptr}));
  return t;
}
SeqType SeqType::char_type() {
  static const SeqType t(make_node(Node{Kind::Char, "", -1, nullptr}));
  return t;
}
SeqType SeqType::bool_type() {
  static const SeqType t(make_node(Node{Kind::Bool, "", -1, nullptr}));
  return t;
}
SeqType SeqType::string_type() {
  static const SeqType t(make_node(Node{Kind::String, "", -1, nullptr}));
  return t;
}
SeqType SeqType::store(ProcSignature signature) {
  return SeqType(make_node(
      Node{Kind::Store, "", -1, std::make_shared<const ProcSignature>(std::move(signature))}));
}
SeqType SeqType::type_var(std::string name) {
  return SeqType(make_node(Node{Kind::TypeVar, std::move(name), -1, nullptr}));
}
SeqType SeqType::var(int id) { return SeqType(make_node(Node{Kind::Var, "", id, nullptr})); }

SeqType::Kind SeqType::kind() const { return node_->kind; }
const std::string& SeqType::name() const { return node_->name; }
int SeqType::var_id() const { return node_->var_id; }
const ProcSignature& SeqType::signature() const {
  assert(node_->signature);
  return *node_->signature;
}

bool operator==(const SeqType& a, const SeqType& b) { return type_equal(a, b); }

// --- ChanType ----------------------------------------------------------------

ChanType ChanType::top_bot() {
  static const ChanType t(make_node(Node{Kind::TopBot, "", -1, {}, {}}));
  return t;
}
ChanType ChanType::put(SeqType message, ChanType rest) {
  return ChanType(make_node(Node{Kind::Put, "", -1, {std::move(message)}, {std::move(rest)}}));
}
ChanType ChanType::get(SeqType message, ChanType rest) {
  return ChanType(make_node(Node{Kind::Get, "", -1, {std::move(message)}, {std::move(rest)}}));
}
ChanType ChanType::tensor(ChanType left, ChanType right) {
  return ChanType(make_node(Node{Kind::Tensor, "", -1, {}, {std::move(left), std::move(right)}}));
}
ChanType ChanType::par(ChanType left, ChanType right) {
  return ChanType(make_node(Node{Kind::Par, "", -1, {}, {std::move(left), std::move(right)}}));
}
ChanType ChanType::neg(ChanType inner) {
  return ChanType(make_node(Node{Kind::Neg, "", -1, {}, {std::move(inner)}}));
}
ChanType ChanType::proto(std::string name, std::vector<SeqType> args) {
  return ChanType(make_node(Node{Kind::Proto, std::move(name), -1, std::move(args), {}}));
}
ChanType ChanType::coproto(std::string name, std::vector<SeqType> args) {
  return ChanType(make_node(Node{Kind::Coproto, std::move(name), -1, std::move(args), {}}));
}
ChanType ChanType::state_var(std::string name) {
  return ChanType(make_node(Node{Kind::StateVar, std::move(name), -1, {}, {}}));
}
ChanType ChanType::var(int id) { return ChanType(make_node(Node{Kind::Var, "", id, {}, {}})); }

ChanType::Kind ChanType::kind() const { return node_->kind; }
const SeqType& ChanType::message() const { return node_->seqs.at(0); }
const ChanType& ChanType::rest() const { return node_->children.at(0); }
const ChanType& ChanType::left() const { return node_->children.at(0); }
const ChanType& ChanType::right() const { return node_->children.at(1); }
const std::string& ChanType::name() const { return node_->name; }
const std::vector<SeqType>& ChanType::args() const { return node_->seqs; }
int ChanType::var_id() const { return node_->var_id; }

bool operator==(const ChanType& a, const ChanType& b) { return type_equal(a, b); }

// --- equality & queries ------------------------------------------------------

bool type_equal(const SeqType& a, const SeqType& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case SeqType::Kind::Int:
    case SeqType::Kind::Char:
    case SeqType::Kind::Bool:
    case SeqType::Kind::String: return true;
    case SeqType::Kind::TypeVar: return a.name() == b.name();
    case SeqType::Kind::Var: return a.var_id() == b.var_id();
    case SeqType::Kind::Store: return a.signature() == b.signature();
  }
  return false;
}

bool type_equal(const ChanType& a, const ChanType& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ChanType::Kind::TopBot: return true;
    case ChanType::Kind::Put:
    case ChanType::Kind::Get:
      return type_equal(a.message(), b.message()) && type_equal(a.rest(), b.rest());
    case ChanType::Kind::Tensor:
    case ChanType::Kind::Par:
      return type_equal(a.left(), b.left()) && type_equal(a.right(), b.right());
    case ChanType::Kind::Neg: return type_equal(a.inner(), b.inner());
    case ChanType::Kind::Proto:
    case ChanType::Kind::Coproto: return a.name() == b.name() && a.args() == b.args();
    case ChanType::Kind::StateVar: return a.name() == b.name();
    case ChanType::Kind::Var: return a.var_id() == b.var_id();
  }
  return false;
}

bool has_vars(const SeqType& t) {
  switch (t.kind()) {
    case SeqType::Kind::Var: return true;
    case SeqType::Kind::Store: return has_vars(t.signature());
    default: return false;
  }
}

bool has_vars(const ChanType& t) {
  switch (t.kind()) {
    case ChanType::Kind::Var: return true;
    case ChanType::Kind::Put:
    case ChanType::Kind::Get: return has_vars(t.message()) || has_vars(t.rest());
    case ChanType::Kind::Tensor:
    case ChanType::Kind::Par: return has_vars(t.left()) || has_vars(t.right());
    case ChanType::Kind::Neg: return has_vars(t.inner());
    case ChanType::Kind::Proto:
    case ChanType::Kind::Coproto:
      for (const auto& a : t.args())
        if (has_vars(a)) return true;
      return false;
    default: return false;
  }
}

bool has_vars(const ProcSignature& sig) {
  for (const auto& s : sig.seq_params)
    if (has_vars(s)) return true;
  for (const auto& c : sig.input_chans)
    if (has_vars(c)) return true;
  for (const auto& c : sig.output_chans)
    if (has_vars(c)) return true;
  return false;
}

namespace {

bool seq_has_decl_vars(const SeqType& t);

bool sig_has_decl_vars(const ProcSignature& sig) {
  for (const auto& s : sig.seq_params)
    if (seq_has_decl_vars(s)) return true;
  for (const auto& c : sig.input_chans)
    if (has_decl_vars(c)) return true;
  for (const auto& c : sig.output_chans)
    if (has_decl_vars(c)) return true;
  return false;
}

bool seq_has_decl_vars(const SeqType& t) {
  if (t.kind() == SeqType::Kind::TypeVar) return true;
  if (t.kind() == SeqType::Kind::Store) return sig_has_decl_vars(t.signature());
  return false;
}

}  // namespace

bool has_decl_vars(const ChanType& t) {
  switch (t.kind()) {
    case ChanType::Kind::StateVar: return true;
    case ChanType::Kind::Put:
    case ChanType::Kind::Get: return seq_has_decl_vars(t.message()) || has_decl_vars(t.rest());
    case ChanType::Kind::Tensor:
    case ChanType::Kind::Par: return has_decl_vars(t.left()) || has_decl_vars(t.right());
    case ChanType::Kind::Neg: return has_decl_vars(t.inner());
    case ChanType::Kind::Proto:
    case ChanType::Kind::Coproto:
      for (const auto& a : t.args())
        if (seq_has_decl_vars(a)) return true;
      return false;
    default: return false;
  }
}

// --- rendering ---------------------------------------------------------------

namespace {

void render_to(std::ostream& os, const ChanType& t);

void render_list(std::ostream& os, const std::vector<ChanType>& ts) {
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i) os << ", ";
    render_to(os, ts[i]);
  }
}

void render_sig_to(std::ostream& os, const ProcSignature& sig) {
  for (std::size_t i = 0; i < sig.seq_params.size(); ++i) {
    if (i) os << ", ";
    os << render(sig.seq_params[i]);
  }
  os << (sig.seq_params.empty() ? "| " : " | ");
  render_list(os, sig.input_chans);
  os << (sig.input_chans.empty() ? "=>" : " =>");
  if (!sig.output_chans.empty()) {
    os << ' ';
    render_list(os, sig.output_chans);
  }
}

void render_operand(std::ostream& os, const ChanType& t) {
  bool wrap = t.kind() == ChanType::Kind::Tensor || t.kind() == ChanType::Kind::Par;
  if (wrap) os << '(';
  render_to(os, t);
  if (wrap) os << ')';
}

void render_to(std::ostream& os, const ChanType& t) {
  switch (t.kind()) {
    case ChanType::Kind::TopBot: os << "TopBot"; break;
    case ChanType::Kind::Put:
    case ChanType::Kind::Get:
      os << (t.kind() == ChanType::Kind::Put ? "Put(" : "Get(") << render(t.message()) << '|';
      render_to(os, t.rest());
      os << ')';
      break;
    case ChanType::Kind::Tensor:
    case ChanType::Kind::Par:
      render_operand(os, t.left());
      os << (t.kind() == ChanType::Kind::Tensor ? " (*) " : " (+) ");
      render_operand(os, t.right());
      break;
    case ChanType::Kind::Neg:
      os << "Neg(";
      render_to(os, t.inner());
      os << ')';
      break;
    case ChanType::Kind::Proto:
    case ChanType::Kind::Coproto:
      os << t.name();
      if (!t.args().empty()) {
        os << '(';
        for (std::size_t i = 0; i < t.args().size(); ++i) {
          if (i) os << ", ";
          os << render(t.args()[i]);
        }
        os << "| )";
      }
      break;
    case ChanType::Kind::StateVar: os << t.name(); break;
    case ChanType::Kind::Var: os << "?c" << t.var_id(); break;
  }
}

}  // namespace

std::string render(const SeqType& t) {
  switch (t.kind()) {
    case SeqType::Kind::Int: return "Int";
    case SeqType::Kind::Char: return "Char";
    case SeqType::Kind::Bool: return "Bool";
    case SeqType::Kind::String: return "[Char]";
    case SeqType::Kind::TypeVar: return t.name();
    case SeqType::Kind::Var: return "?s" + std::to_string(t.var_id());
    case SeqType::Kind::Store: {
      std::ostringstream os;
      os << "Store(";
      render_sig_to(os, t.signature());
      os << ')';
      return os.str();
    }
  }
  return "?";
}

std::string render(const ChanType& t) {
  std::ostringstream os;
  render_to(os, t);
  return os.str();
}

std::string render(const ProcSignature& sig) {
  std::ostringstream os;
  render_sig_to(os, sig);
  return os.str();
}

// --- protocols ---------------------------------------------------------------

const HandleClause* ProtocolDecl::find_handle(std::string_view handle) const {
  for (const auto& h : handles)
    if (h.name == handle) return &h;
  return nullptr;
}

ChanType ProtocolDecl::apply(std::vector<SeqType> args) const {
  return kind == ProtocolKind::Protocol ? ChanType::proto(name, std::move(args))
                                        : ChanType::coproto(name, std::move(args));
}

const ProtocolDecl& console_protocol() {
  static const ProtocolDecl decl = [] {
    ProtocolDecl d;
    d.name = "Console";
    d.kind = ProtocolKind::Coprotocol;
    d.state_var = "S";
    auto s = ChanType::state_var("S");
    d.handles.push_back({"ConsolePut", ChanType::get(SeqType::string_type(), s), {}});
    d.handles.push_back({"ConsoleGet", ChanType::put(SeqType::string_type(), s), {}});
    d.handles.push_back({"ConsoleClose", ChanType::top_bot(), {}});
    return d;
  }();
  return decl;
}

UnknownHandle::UnknownHandle(std::string decl, std::string handle)
    : message_("handle '" + handle + "' is not declared by '" + decl + "'") {}

namespace {

struct Instantiation {
  const ProtocolDecl& decl;
  const ChanType& app;

  SeqType seq(const SeqType& t) const {
    switch (t.kind()) {
      case SeqType::Kind::TypeVar:
        for (std::size_t i = 0; i < decl.seq_params.size(); ++i)
          if (decl.seq_params[i] == t.name()) return app.args().at(i);
        return t;
      case SeqType::Kind::Store: {
        const auto& s = t.signature();
        ProcSignature out;
        for (const auto& p : s.seq_params) out.seq_params.push_back(seq(p));
        for (const auto& c : s.input_chans) out.input_chans.push_back(chan(c));
        for (const auto& c : s.output_chans) out.output_chans.push_back(chan(c));
        return SeqType::store(std::move(out));
      }
      default: return t;
    }
  }

  ChanType chan(const ChanType& t) const {
    switch (t.kind()) {
      case ChanType::Kind::StateVar: return t.name() == decl.state_var ? app : t;
      case ChanType::Kind::Put: return ChanType::put(seq(t.message()), chan(t.rest()));
      case ChanType::Kind::Get: return ChanType::get(seq(t.message()), chan(t.rest()));
      case ChanType::Kind::Tensor: return ChanType::tensor(chan(t.left()), chan(t.right()));
      case ChanType::Kind::Par: return ChanType::par(chan(t.left()), chan(t.right()));
      case ChanType::Kind::Neg: return ChanType::neg(chan(t.inner()));
      case ChanType::Kind::Proto:
      case ChanType::Kind::Coproto: {
        std::vector<SeqType> args;
        for (const auto& a : t.args()) args.push_back(seq(a));
        return t.kind() == ChanType::Kind::Proto ? ChanType::proto(t.name(), std::move(args))
                                                 : ChanType::coproto(t.name(), std::move(args));
      }
      default: return t;
    }
  }
};

}  // namespace

ChanType unfold_handle(const ProtocolDecl& decl, std::string_view handle, const ChanType& app) {
  const HandleClause* clause = decl.find_handle(handle);
  if (!clause) throw UnknownHandle(decl.name, std::string(handle));
  if ((app.kind() != ChanType::Kind::Proto && app.kind() != ChanType::Kind::Coproto) ||
      app.name() != decl.name || app.args().size() != decl.seq_params.size())
    throw std::invalid_argument("unfold_handle: '" + render(app) + "' is not an application of " +
                                decl.name);
  return Instantiation{decl, app}.chan(clause->body);
}

// --- command matrix ----------------------------------------------------------

std::string_view to_string(CommandKind k) {
  switch (k) {
    case CommandKind::Put: return "put";
    case CommandKind::Get: return "get";
    case CommandKind::HPut: return "hput";
    case CommandKind::HCase: return "hcase";
    case CommandKind::Close: return "close";
    case CommandKind::Halt: return "halt";
    case CommandKind::Fork: return "fork";
    case CommandKind::Split: return "split";
    case CommandKind::Plug: return "plug";
    case CommandKind::Race: return "race";
    case CommandKind::Call: return "call";
    case CommandKind::Use: return "use";
    case CommandKind::Link: return "|=|";
    case CommandKind::Neg: return "neg";
  }
  return "?";
}

CommandSet allowed_commands(const ChanType& t, Polarity p) {
  const bool out = p == Polarity::Output;
  using K = CommandKind;
  switch (t.kind()) {
    case ChanType::Kind::TopBot: return {K::Close, K::Halt};
    case ChanType::Kind::Neg: return {K::Neg, K::Link};
    case ChanType::Kind::Put: return {out ? K::Put : K::Get};
    case ChanType::Kind::Get: return {out ? K::Get : K::Put};
    case ChanType::Kind::Tensor: return {out ? K::Fork : K::Split};
    case ChanType::Kind::Par: return {out ? K::Split : K::Fork};
    case ChanType::Kind::Proto: return {out ? K::HPut : K::HCase};
    case ChanType::Kind::Coproto: return {out ? K::HCase : K::HPut};
    case ChanType::Kind::StateVar:
    case ChanType::Kind::Var: return {};
  }
  return {};
}

bool can_race(const ChanType& t, Polarity p) {
  return (t.kind() == ChanType::Kind::Put || t.kind() == ChanType::Kind::Get) &&
         allowed_commands(t, p).count(CommandKind::Get) == 1;
}

}  // namespace campl
