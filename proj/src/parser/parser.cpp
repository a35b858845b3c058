#include "campl/parser.hpp"

#include <algorithm>
#include <charconv>
#include <optional>
#include <sstream>

namespace campl {

namespace {

struct ParseFailure {};

class Parser {
 public:
  explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {
    if (!toks_.empty()) top_column_ = toks_.front().column;
  }

  ParseResult run() {
    ParseResult result;
    while (!at_end()) {
      if (peek().kind == TokenKind::LayoutSep) {
        ++pos_;
        continue;
      }
      try {
        result.program.declarations.push_back(declaration());
        if (!at_end() && peek().kind != TokenKind::LayoutSep)
          fail("expected the end of the declaration");
      } catch (const ParseFailure&) {
        recover();
      }
    }
    result.errors = std::move(errors_);
    return result;
  }

 private:
  // --- token plumbing --------------------------------------------------------

  bool at_end() const { return pos_ >= toks_.size(); }

  const Token& peek(std::size_t ahead = 0) const {
    static const Token eof{TokenKind::Operator, "<end of input>", 0, 0};
    if (pos_ + ahead < toks_.size()) return toks_[pos_ + ahead];
    if (!toks_.empty()) {
      static thread_local Token last;
      last = toks_.back();
      last.kind = TokenKind::Operator;
      last.lexeme = "<end of input>";
      return last;
    }
    return eof;
  }

  SourcePos here() const { return {peek().line, peek().column}; }

  const Token& next() {
    const Token& t = peek();
    last_ = {t.line, t.column};
    if (!at_end()) ++pos_;
    return t;
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case TokenKind::LayoutOpen: return "start of an indented block";
      case TokenKind::LayoutSep: return "new line";
      case TokenKind::LayoutClose: return "end of an indented block";
      case TokenKind::Operator:
        if (t.lexeme == "<end of input>") return "end of input";
        return "'" + t.lexeme + "'";
      case TokenKind::String: return "string \"" + t.lexeme + "\"";
      case TokenKind::Char: return "character literal";
      case TokenKind::Integer: return "integer " + t.lexeme;
      case TokenKind::Identifier: return "identifier '" + t.lexeme + "'";
      default: return "'" + t.lexeme + "'";
    }
  }

  [[noreturn]] void fail(const std::string& message) {
    Diagnostic d;
    d.kind = DiagKind::ParseError;
    d.pos = here();
    d.message = message + ", found " + describe(peek());
    errors_.push_back(std::move(d));
    throw ParseFailure{};
  }

  [[noreturn]] void expected(std::initializer_list<std::string_view> options) {
    std::string msg = "expected ";
    if (options.size() > 1) msg += "one of ";
    bool first = true;
    for (auto o : options) {
      if (!first) msg += ", ";
      msg += o;
      first = false;
    }
    fail(msg);
  }

  void expect_op(std::string_view op) {
    if (!peek().is_op(op)) expected({"'" + std::string(op) + "'"});
    next();
  }

  void expect_keyword(std::string_view kw) {
    if (!peek().is_keyword(kw)) expected({"'" + std::string(kw) + "'"});
    next();
  }

  void expect_layout(TokenKind k) {
    if (peek().kind != k) {
      if (k == TokenKind::LayoutOpen) expected({"an indented block"});
      if (k == TokenKind::LayoutClose) expected({"the end of the indented block"});
      expected({"a new line"});
    }
    next();
  }

  std::string identifier(std::string_view what = "identifier") {
    if (peek().kind != TokenKind::Identifier) expected({what});
    return next().lexeme;
  }

  bool accept_op(std::string_view op) {
    if (!peek().is_op(op)) return false;
    next();
    return true;
  }

  bool at_item_end() const {
    const Token& t = peek();
    return at_end() || t.kind == TokenKind::LayoutSep || t.kind == TokenKind::LayoutClose ||
           t.is_op(")");
  }

  void recover() {
    while (!at_end()) {
      const Token& t = peek();
      if (t.kind == TokenKind::LayoutSep && t.column == top_column_) return;
      ++pos_;
    }
  }

  // --- declarations ----------------------------------------------------------

  Declaration declaration() {
    if (peek().is_keyword("proc")) return proc_declaration();
    if (peek().is_keyword("protocol") || peek().is_keyword("coprotocol"))
      return protocol_declaration();
    expected({"'proc'", "'protocol'", "'coprotocol'"});
  }

  ProcDef proc_declaration() {
    ProcDef def;
    def.pos = here();
    expect_keyword("proc");
    def.name = identifier("process name");
    if (accept_op("::")) def.signature = signature();
    expect_op("=");
    proc_rhs(def);
    def.end = last_;
    return def;
  }

  void proc_rhs(ProcDef& def) {
    bool block = peek().kind == TokenKind::LayoutOpen;
    if (block) next();
    context_line(def);
    expect_op("->");
    def.body = body();
    if (block) expect_layout(TokenKind::LayoutClose);
  }

  void context_line(ProcDef& def) {
    if (peek().kind == TokenKind::Identifier) {
      def.vars.push_back(identifier());
      while (accept_op(",")) def.vars.push_back(identifier("variable name"));
    }
    expect_op("|");
    def.chans = channel_lists({"->"});
  }

  std::vector<std::string> name_list() {
    std::vector<std::string> names;
    if (peek().kind != TokenKind::Identifier) return names;
    names.push_back(identifier());
    while (accept_op(",")) names.push_back(identifier("channel name"));
    return names;
  }

  ChannelLists channel_lists(std::initializer_list<std::string_view> terminators) {
    ChannelLists lists;
    auto first = name_list();
    if (accept_op("=>")) {
      lists.inputs = std::move(first);
      lists.outputs = name_list();
    } else if (!first.empty()) {
      lists.polarized = false;
      lists.unpolarized = std::move(first);
    }
    for (auto t : terminators)
      if (peek().is_op(t)) return lists;
    std::string opts;
    for (auto t : terminators) opts += (opts.empty() ? "'" : ", '") + std::string(t) + "'";
    fail("expected ',', '=>' or " + opts + " in channel list");
  }

  ProtocolDecl protocol_declaration() {
    ProtocolDecl decl;
    decl.pos = here();
    bool co = next().lexeme == "coprotocol";
    decl.kind = co ? ProtocolKind::Coprotocol : ProtocolKind::Protocol;
    if (co) {
      decl.state_var = identifier("state variable");
      expect_op("=>");
      decl.name = identifier("coprotocol name");
      decl.seq_params = protocol_params();
    } else {
      decl.name = identifier("protocol name");
      decl.seq_params = protocol_params();
      expect_op("=>");
      decl.state_var = identifier("state variable");
    }
    expect_op("=");
    type_params_ = &decl.seq_params;
    state_var_ = decl.state_var;
    struct Reset {
      Parser& p;
      ~Reset() {
        p.type_params_ = nullptr;
        p.state_var_.clear();
      }
    } reset{*this};
    if (peek().kind == TokenKind::LayoutOpen) {
      next();
      decl.handles.push_back(handle_clause(decl));
      while (peek().kind == TokenKind::LayoutSep) {
        next();
        decl.handles.push_back(handle_clause(decl));
      }
      expect_layout(TokenKind::LayoutClose);
    } else {
      decl.handles.push_back(handle_clause(decl));
    }
    decl.end = last_;
    return decl;
  }

  std::vector<std::string> protocol_params() {
    std::vector<std::string> params;
    if (!accept_op("(")) return params;
    if (peek().kind == TokenKind::Identifier) {
      params.push_back(identifier());
      while (accept_op(",")) params.push_back(identifier("type parameter"));
    }
    if (accept_op("|")) {
      if (!peek().is_op(")"))
        fail(
            "channel-type parameters are not supported; only sequential parameters may appear "
            "before '|'");
    }
    expect_op(")");
    return params;
  }

  HandleClause handle_clause(const ProtocolDecl& decl) {
    SourcePos pos = here();
    std::string name = identifier("handle name");
    expect_op("::");
    if (decl.kind == ProtocolKind::Protocol) {
      ChanType body = chan_type();
      expect_op("=>");
      expect_state_var(decl);
      return HandleClause{name, body, pos};
    }
    expect_state_var(decl);
    expect_op("=>");
    return HandleClause{name, chan_type(), pos};
  }

  void expect_state_var(const ProtocolDecl& decl) {
    if (!(peek().kind == TokenKind::Identifier && peek().lexeme == decl.state_var))
      fail("expected state variable '" + decl.state_var + "'");
    next();
  }

  // --- types -----------------------------------------------------------------

  ProcSignature signature() {
    ProcSignature sig;
    if (!peek().is_op("|")) {
      sig.seq_params.push_back(seq_type());
      while (accept_op(",")) sig.seq_params.push_back(seq_type());
    }
    expect_op("|");
    if (!peek().is_op("=>")) {
      sig.input_chans.push_back(chan_type());
      while (accept_op(",")) sig.input_chans.push_back(chan_type());
    }
    expect_op("=>");
    if (!peek().is_op("=") && !peek().is_op(")")) {
      sig.output_chans.push_back(chan_type());
      while (accept_op(",")) sig.output_chans.push_back(chan_type());
    }
    return sig;
  }

  SeqType seq_type() {
    if (accept_op("[")) {
      if (!(peek().kind == TokenKind::Identifier && peek().lexeme == "Char"))
        fail("only [Char] lists are supported");
      next();
      expect_op("]");
      return SeqType::string_type();
    }
    if (peek().kind != TokenKind::Identifier) expected({"a sequential type"});
    const std::string name = peek().lexeme;
    if (name == "Int") return next(), SeqType::int_type();
    if (name == "Char") return next(), SeqType::char_type();
    if (name == "Bool") return next(), SeqType::bool_type();
    if (name == "String") return next(), SeqType::string_type();
    if (name == "Store") {
      next();
      expect_op("(");
      auto sig = signature();
      expect_op(")");
      return SeqType::store(std::move(sig));
    }
    if (type_params_ &&
        std::find(type_params_->begin(), type_params_->end(), name) != type_params_->end())
      return next(), SeqType::type_var(name);
    fail("unknown sequential type '" + name + "'");
  }

  ChanType chan_type() {
    ChanType t = chan_atom();
    while (true) {
      if (accept_op("(*)"))
        t = ChanType::tensor(t, chan_atom());
      else if (accept_op("(+)"))
        t = ChanType::par(t, chan_atom());
      else
        return t;
    }
  }

  ChanType chan_atom() {
    if (accept_op("(")) {
      ChanType t = chan_type();
      expect_op(")");
      return t;
    }
    if (peek().kind != TokenKind::Identifier) expected({"a channel type"});
    const std::string name = peek().lexeme;
    if (!state_var_.empty() && name == state_var_) return next(), ChanType::state_var(name);
    if (name == "TopBot") return next(), ChanType::top_bot();
    if (name == "Put" || name == "Get") {
      next();
      expect_op("(");
      SeqType msg = seq_type();
      expect_op("|");
      ChanType rest = chan_type();
      expect_op(")");
      return name == "Put" ? ChanType::put(msg, rest) : ChanType::get(msg, rest);
    }
    if (name == "Neg") {
      next();
      expect_op("(");
      ChanType inner = chan_type();
      expect_op(")");
      return ChanType::neg(inner);
    }
    if (type_params_ &&
        std::find(type_params_->begin(), type_params_->end(), name) != type_params_->end())
      fail("sequential type parameter '" + name + "' used where a channel type is expected");
    next();
    std::vector<SeqType> args;
    if (accept_op("(")) {
      if (!peek().is_op("|") && !peek().is_op(")")) {
        args.push_back(seq_type());
        while (accept_op(",")) args.push_back(seq_type());
      }
      if (accept_op("|") && !peek().is_op(")")) fail("channel-type arguments are not supported");
      expect_op(")");
    }
    // Resolved to a coprotocol application by the checker when appropriate.
    return ChanType::proto(name, std::move(args));
  }

  // --- bodies ----------------------------------------------------------------

  Body body() {
    Body out;
    if (peek().kind == TokenKind::LayoutOpen) {
      block_into(out);
    } else {
      item_into(out);
    }
    return out;
  }

  void block_into(Body& out) {
    expect_layout(TokenKind::LayoutOpen);
    if (peek().kind == TokenKind::LayoutClose) fail("expected at least one command in the block");
    item_into(out);
    while (peek().kind == TokenKind::LayoutSep) {
      next();
      item_into(out);
    }
    if (peek().kind != TokenKind::LayoutClose) fail("expected the end of the command");
    next();
  }

  void item_into(Body& out) {
    if (peek().is_keyword("do")) {
      next();
      block_into(out);
      return;
    }
    out.push_back(command());
  }

  /// Optional explicit channel for commands that may rely on `on ch do`.
  std::string channel_after_on() {
    if (peek().is_keyword("on")) {
      next();
      return identifier("channel name");
    }
    if (implicit_depth_ == 0) expected({"'on <channel>'"});
    return {};
  }

  std::string optional_channel() {
    if (peek().kind == TokenKind::Identifier) return identifier();
    if (implicit_depth_ == 0) expected({"channel name"});
    return {};
  }

  Command command() {
    Command cmd;
    cmd.pos = here();
    const Token& t = peek();
    if (t.kind == TokenKind::Keyword) {
      const std::string kw = t.lexeme;
      next();
      if (kw == "put") {
        PutCmd c;
        c.value = expr();
        c.chan = channel_after_on();
        cmd.node = std::move(c);
      } else if (kw == "get") {
        GetCmd c;
        c.binder = identifier("variable name");
        c.chan = channel_after_on();
        cmd.node = std::move(c);
      } else if (kw == "hput") {
        HPutCmd c;
        c.handle = identifier("handle name");
        c.chan = channel_after_on();
        cmd.node = std::move(c);
      } else if (kw == "hcase") {
        HCaseCmd c;
        if (!peek().is_keyword("of")) c.chan = optional_channel();
        expect_keyword("of");
        expect_layout(TokenKind::LayoutOpen);
        do {
          HCaseArm arm;
          arm.pos = here();
          arm.handle = identifier("handle name");
          expect_op("->");
          arm.body = body();
          c.arms.push_back(std::move(arm));
        } while (peek().kind == TokenKind::LayoutSep && (next(), true));
        expect_layout(TokenKind::LayoutClose);
        cmd.node = std::move(c);
      } else if (kw == "close" || kw == "halt") {
        std::string chan;
        if (peek().kind == TokenKind::Identifier && !at_item_end())
          chan = identifier();
        else if (implicit_depth_ == 0)
          expected({"channel name"});
        if (kw == "close")
          cmd.node = CloseCmd{chan};
        else
          cmd.node = HaltCmd{chan};
      } else if (kw == "fork") {
        ForkCmd c;
        if (!peek().is_keyword("as")) c.chan = optional_channel();
        expect_keyword("as");
        expect_layout(TokenKind::LayoutOpen);
        c.first = fork_branch();
        if (peek().kind != TokenKind::LayoutSep) fail("fork needs exactly two branches");
        next();
        c.second = fork_branch();
        if (peek().kind == TokenKind::LayoutSep) fail("fork needs exactly two branches");
        expect_layout(TokenKind::LayoutClose);
        cmd.node = std::move(c);
      } else if (kw == "split") {
        SplitCmd c;
        if (!peek().is_keyword("into")) c.chan = optional_channel();
        expect_keyword("into");
        c.first = identifier("channel name");
        expect_op(",");
        c.second = identifier("channel name");
        cmd.node = std::move(c);
      } else if (kw == "plug") {
        PlugCmd c;
        expect_layout(TokenKind::LayoutOpen);
        do {
          Body branch;
          item_into(branch);
          c.branches.push_back(std::move(branch));
        } while (peek().kind == TokenKind::LayoutSep && (next(), true));
        expect_layout(TokenKind::LayoutClose);
        cmd.node = std::move(c);
      } else if (kw == "race") {
        RaceCmd c;
        expect_layout(TokenKind::LayoutOpen);
        do {
          RaceArm arm;
          arm.pos = here();
          arm.chan = identifier("channel name");
          expect_op("->");
          arm.body = body();
          c.arms.push_back(std::move(arm));
        } while (peek().kind == TokenKind::LayoutSep && (next(), true));
        expect_layout(TokenKind::LayoutClose);
        cmd.node = std::move(c);
      } else if (kw == "use") {
        UseCmd c;
        expect_op("(");
        c.stored = expr();
        expect_op(")");
        call_arguments(c.seq_args, c.chans);
        cmd.node = std::move(c);
      } else if (kw == "neg") {
        NegCmd c;
        if (!peek().is_keyword("as")) c.chan = optional_channel();
        expect_keyword("as");
        bool block = peek().kind == TokenKind::LayoutOpen;
        if (block) next();
        c.rebound = identifier("channel name");
        if (block) expect_layout(TokenKind::LayoutClose);
        cmd.node = std::move(c);
      } else if (kw == "on") {
        OnDoCmd c;
        c.chan = identifier("channel name");
        expect_keyword("do");
        ++implicit_depth_;
        struct Leave {
          int& depth;
          ~Leave() { --depth; }
        } leave{implicit_depth_};
        block_into(c.body);
        cmd.node = std::move(c);
      } else {
        --pos_;
        expected({"a process command"});
      }
      return cmd;
    }
    if (t.kind == TokenKind::Identifier) {
      std::string name = identifier();
      if (accept_op("|=|")) {
        cmd.node = LinkCmd{name, identifier("channel name")};
        return cmd;
      }
      if (!peek().is_op("(")) expected({"'('", "'|=|'"});
      CallCmd c;
      c.proc = std::move(name);
      call_arguments(c.seq_args, c.chans);
      cmd.node = std::move(c);
      return cmd;
    }
    expected({"a process command"});
  }

  ForkBranch fork_branch() {
    ForkBranch b;
    b.pos = here();
    b.chan = identifier("channel name");
    expect_op("->");
    b.body = body();
    return b;
  }

  void call_arguments(std::vector<Expr>& seq_args, ChannelLists& chans) {
    expect_op("(");
    if (!peek().is_op("|") && !peek().is_op(")")) {
      seq_args.push_back(expr());
      while (accept_op(",")) seq_args.push_back(expr());
    }
    if (accept_op("|")) chans = channel_lists({")"});
    expect_op(")");
  }

  // --- expressions -----------------------------------------------------------

  Expr expr() {
    SourcePos pos = here();
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Integer: {
        std::int64_t v = 0;
        const std::string& s = t.lexeme;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc()) fail("integer literal out of range");
        next();
        return Expr::integer(v, pos);
      }
      case TokenKind::Char: {
        char c = t.lexeme.front();
        next();
        return Expr::character(c, pos);
      }
      case TokenKind::String: {
        std::string s = t.lexeme;
        next();
        return Expr::string(std::move(s), pos);
      }
      case TokenKind::Identifier: {
        std::string name = t.lexeme;
        next();
        if (name == "True") return Expr::boolean(true, pos);
        if (name == "False") return Expr::boolean(false, pos);
        return Expr::variable(std::move(name), pos);
      }
      default: break;
    }
    if (t.is_keyword("store")) {
      next();
      expect_op("(");
      Expr e;
      if (peek().is_keyword("proc")) {
        e = Expr::store_anonymous(std::make_shared<const ProcDef>(anonymous_proc()), pos);
      } else {
        e = Expr::store_name(identifier("process name"), pos);
      }
      expect_op(")");
      return e;
    }
    if (accept_op("(")) {
      Expr e = expr();
      expect_op(")");
      return e;
    }
    expected({"an expression"});
  }

  ProcDef anonymous_proc() {
    ProcDef def;
    def.pos = here();
    expect_keyword("proc");
    if (!peek().is_op("::")) fail("an anonymous stored process needs a '::' signature");
    next();
    def.signature = signature();
    expect_op("=");
    // Inside the call parentheses the outer on-block channel does not apply.
    int saved = implicit_depth_;
    implicit_depth_ = 0;
    struct Restore {
      int& depth;
      int saved;
      ~Restore() { depth = saved; }
    } restore{implicit_depth_, saved};
    proc_rhs(def);
    def.end = last_;
    return def;
  }

  const std::vector<Token>& toks_;
  std::size_t pos_ = 0;
  int top_column_ = 1;
  int implicit_depth_ = 0;
  SourcePos last_;
  std::vector<Diagnostic> errors_;
  const std::vector<std::string>* type_params_ = nullptr;
  std::string state_var_;
};

}  // namespace

ParseResult parse_program(const std::vector<Token>& tokens) { return Parser(tokens).run(); }

ParseResult parse_source(std::string_view source) {
  try {
    auto tokens = tokenize(source);
    return parse_program(tokens);
  } catch (const LexError& e) {
    ParseResult r;
    Diagnostic d;
    d.kind = DiagKind::LexError;
    d.pos = {e.line(), e.column()};
    d.message = e.what();
    r.errors.push_back(std::move(d));
    return r;
  }
}

namespace {

std::string quote(std::string_view text, char delim) {
  std::string out(1, delim);
  for (char c : text) {
    switch (c) {
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\\': out += "\\\\"; break;
      default:
        if (c == delim) out += '\\';
        out += c;
    }
  }
  out += delim;
  return out;
}

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? ", " : "") + names[i];
  return out;
}

std::string channel_lists(const ChannelLists& c) {
  if (!c.polarized) return "| " + join(c.unpolarized);
  std::string out = "| ";
  if (!c.inputs.empty()) out += join(c.inputs) + " ";
  out += "=>";
  if (!c.outputs.empty()) out += " " + join(c.outputs);
  return out;
}

class Printer {
 public:
  std::string program(const SourceProgram& p) {
    for (const auto& d : p.declarations) std::visit([&](const auto& x) { declaration(x); }, d);
    return os_.str();
  }

 private:
  static std::string pad(int n) { return std::string(static_cast<std::size_t>(n), ' '); }

  void declaration(const ProtocolDecl& d) {
    std::string params;
    if (!d.seq_params.empty()) params = "(" + join(d.seq_params) + "| )";
    if (d.kind == ProtocolKind::Protocol)
      os_ << "protocol " << d.name << params << " => " << d.state_var << " =\n";
    else
      os_ << "coprotocol " << d.state_var << " => " << d.name << params << " =\n";
    for (const auto& h : d.handles) {
      os_ << pad(4) << h.name << " :: ";
      if (d.kind == ProtocolKind::Protocol)
        os_ << render(h.body) << " => " << d.state_var << '\n';
      else
        os_ << d.state_var << " => " << render(h.body) << '\n';
    }
  }

  void declaration(const ProcDef& d) {
    proc_head(d);
    proc_rest(d, 0);
  }

  void proc_head(const ProcDef& d) {
    os_ << "proc";
    if (!d.name.empty()) os_ << ' ' << d.name;
    if (d.signature) os_ << " :: " << render(*d.signature);
    os_ << " =\n";
  }

  void proc_rest(const ProcDef& d, int ind) {
    os_ << pad(ind + 4);
    if (!d.vars.empty()) os_ << join(d.vars) << ' ';
    os_ << channel_lists(d.chans) << " -> do\n";
    body(d.body, ind + 8);
  }

  void body(const Body& b, int ind) {
    for (const auto& c : b) {
      os_ << pad(ind);
      command(c, ind);
    }
  }

  void block(std::string_view head, const Body& b, int ind) {
    os_ << head << " do\n";
    body(b, ind + 4);
  }

  static std::string on(const std::string& chan) { return chan.empty() ? "" : " on " + chan; }
  static std::string sp(const std::string& chan) { return chan.empty() ? "" : " " + chan; }

  void command(const Command& c, int ind) {
    std::visit(
        overloaded{
            [&](const PutCmd& x) { os_ << "put " << expr(x.value, ind) << on(x.chan) << '\n'; },
            [&](const GetCmd& x) { os_ << "get " << x.binder << on(x.chan) << '\n'; },
            [&](const HPutCmd& x) { os_ << "hput " << x.handle << on(x.chan) << '\n'; },
            [&](const HCaseCmd& x) {
              os_ << "hcase" << sp(x.chan) << " of\n";
              for (const auto& arm : x.arms) {
                os_ << pad(ind + 4);
                block(arm.handle + " ->", arm.body, ind + 4);
              }
            },
            [&](const CloseCmd& x) { os_ << "close" << sp(x.chan) << '\n'; },
            [&](const HaltCmd& x) { os_ << "halt" << sp(x.chan) << '\n'; },
            [&](const ForkCmd& x) {
              os_ << "fork" << sp(x.chan) << " as\n";
              for (const auto* br : {&x.first, &x.second}) {
                os_ << pad(ind + 4);
                block(br->chan + " ->", br->body, ind + 4);
              }
            },
            [&](const SplitCmd& x) {
              os_ << "split" << sp(x.chan) << " into " << x.first << ", " << x.second << '\n';
            },
            [&](const PlugCmd& x) {
              os_ << "plug\n";
              for (const auto& br : x.branches) {
                os_ << pad(ind + 4);
                block("", br, ind + 4);
              }
            },
            [&](const RaceCmd& x) {
              os_ << "race\n";
              for (const auto& arm : x.arms) {
                os_ << pad(ind + 4);
                block(arm.chan + " ->", arm.body, ind + 4);
              }
            },
            [&](const CallCmd& x) { os_ << x.proc << args(x.seq_args, x.chans, ind) << '\n'; },
            [&](const UseCmd& x) {
              os_ << "use(" << expr(x.stored, ind) << ")" << args(x.seq_args, x.chans, ind) << '\n';
            },
            [&](const LinkCmd& x) { os_ << x.left << " |=| " << x.right << '\n'; },
            [&](const NegCmd& x) { os_ << "neg" << sp(x.chan) << " as " << x.rebound << '\n'; },
            [&](const OnDoCmd& x) { block("on " + x.chan, x.body, ind); },
        },
        c.node);
  }

  std::string args(const std::vector<Expr>& seq, const ChannelLists& chans, int ind) {
    std::string out = "( ";
    for (std::size_t i = 0; i < seq.size(); ++i) out += (i ? ", " : "") + expr(seq[i], ind);
    out += (seq.empty() ? "" : " ") + channel_lists(chans) + " )";
    return out;
  }

  std::string expr(const Expr& e, int ind) {
    switch (e.kind) {
      case Expr::Kind::Int: return std::to_string(e.int_value);
      case Expr::Kind::Char: return quote(e.text, '\'');
      case Expr::Kind::String: return quote(e.text, '"');
      case Expr::Kind::Bool: return e.bool_value ? "True" : "False";
      case Expr::Kind::Var: return e.text;
      case Expr::Kind::StoreName: return "store(" + e.text + ")";
      case Expr::Kind::StoreAnon: {
        Printer inner;
        inner.os_ << "store(";
        inner.proc_head(*e.anonymous);
        inner.proc_rest(*e.anonymous, ind);
        inner.os_ << pad(ind) << ")";
        return inner.os_.str();
      }
    }
    return {};
  }

  std::ostringstream os_;
};

}  // namespace

std::string roundtrip_print(const SourceProgram& program) { return Printer().program(program); }

std::vector<Diagnostic> lint_program(const SourceProgram& program) {
  std::vector<Diagnostic> out;
  const ProcDef* last_proc = nullptr;
  for (const auto& d : program.declarations)
    if (const auto* p = std::get_if<ProcDef>(&d)) last_proc = p;
  for (const auto& d : program.declarations) {
    const auto* p = std::get_if<ProcDef>(&d);
    if (p && p->name == "run" && p != last_proc) {
      Diagnostic w;
      w.kind = DiagKind::Warning;
      w.pos = p->pos;
      w.message = "'run' should be the last process defined";
      out.push_back(std::move(w));
    }
  }
  return out;
}

}  // namespace campl
