#include "campl/lexer.hpp"

#include <array>
#include <cctype>
#include <optional>

namespace campl {

std::string_view to_string(TokenKind k) {
  switch (k) {
    case TokenKind::Keyword: return "keyword";
    case TokenKind::Identifier: return "identifier";
    case TokenKind::Operator: return "operator";
    case TokenKind::Integer: return "integer";
    case TokenKind::Char: return "char";
    case TokenKind::String: return "string";
    case TokenKind::LayoutOpen: return "layout-open";
    case TokenKind::LayoutSep: return "layout-sep";
    case TokenKind::LayoutClose: return "layout-close";
  }
  return "?";
}

namespace {

constexpr std::array<std::string_view, 21> kKeywords = {
    "proc", "protocol", "coprotocol", "do",   "on",    "of",    "as",
    "into", "put",      "get",        "hput", "hcase", "close", "halt",
    "fork", "split",    "plug",       "race", "use",   "store", "neg"};

// Longest first.
constexpr std::array<std::string_view, 13> kOperators = {"(*)", "(+)", "|=|", "::", "=>", "->", "=",
                                                         "|",   ",",   "(",   ")",  "[",  "]"};

struct RawToken {
  Token token;
  bool first_on_line = false;
};

class Scanner {
 public:
  explicit Scanner(std::string_view src) : src_(src) {}

  std::vector<RawToken> scan() {
    std::vector<RawToken> out;
    bool line_start = true;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        advance();
        line_start = true;
        continue;
      }
      if (c == ' ' || c == '\r') {
        advance();
        continue;
      }
      if (c == '\t')
        throw LexError(line_, col_, "tab characters are not allowed; indent with spaces");
      if (c == '-' && peek(1) == '-') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
        continue;
      }
      RawToken raw{scan_token(), line_start};
      line_start = false;
      out.push_back(std::move(raw));
    }
    return out;
  }

 private:
  char peek(std::size_t ahead) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  Token scan_token() {
    const int line = line_, col = col_;
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                    src_[pos_] == '_' || src_[pos_] == '\''))
        advance();
      std::string word(src_.substr(start, pos_ - start));
      auto kind = is_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier;
      return {kind, std::move(word), line, col};
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
      return {TokenKind::Integer, std::string(src_.substr(start, pos_ - start)), line, col};
    }
    if (c == '"') return scan_string(line, col);
    if (c == '\'') return scan_char(line, col);
    for (auto op : kOperators) {
      if (src_.substr(pos_, op.size()) == op) {
        for (std::size_t i = 0; i < op.size(); ++i) advance();
        return {TokenKind::Operator, std::string(op), line, col};
      }
    }
    std::string shown = std::isprint(static_cast<unsigned char>(c))
                            ? std::string(1, c)
                            : "\\x" + std::to_string(static_cast<unsigned char>(c));
    throw LexError(line, col, "unexpected character '" + shown + "'");
  }

  char scan_escape(int line, int col) {
    advance();  // backslash
    if (pos_ >= src_.size()) throw LexError(line, col, "unterminated escape sequence");
    char e = src_[pos_];
    advance();
    switch (e) {
      case 'n': return '\n';
      case 't': return '\t';
      case '"': return '"';
      case '\'': return '\'';
      case '\\': return '\\';
      default:
        throw LexError(line_, col_ - 2, std::string("unknown escape sequence '\\") + e + "'");
    }
  }

  Token scan_string(int line, int col) {
    advance();
    std::string value;
    while (true) {
      if (pos_ >= src_.size() || src_[pos_] == '\n')
        throw LexError(line, col, "unterminated string literal");
      char c = src_[pos_];
      if (c == '"') {
        advance();
        break;
      }
      if (c == '\\') {
        value.push_back(scan_escape(line, col));
        continue;
      }
      value.push_back(c);
      advance();
    }
    return {TokenKind::String, std::move(value), line, col};
  }

  Token scan_char(int line, int col) {
    advance();
    if (pos_ >= src_.size() || src_[pos_] == '\n')
      throw LexError(line, col, "unterminated character literal");
    char value;
    if (src_[pos_] == '\\') {
      value = scan_escape(line, col);
    } else {
      value = src_[pos_];
      advance();
    }
    if (pos_ >= src_.size() || src_[pos_] != '\'')
      throw LexError(line, col, "unterminated character literal");
    advance();
    return {TokenKind::Char, std::string(1, value), line, col};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

bool opens_block_always(const Token& t) {
  return t.kind == TokenKind::Keyword &&
         (t.lexeme == "do" || t.lexeme == "of" || t.lexeme == "as" || t.lexeme == "plug" ||
          t.lexeme == "race");
}

bool opens_block_at_line_end(const Token& t) { return t.is_op("=") || t.is_op("->"); }

class Layout {
 public:
  std::vector<Token> run(const std::vector<RawToken>& raw) {
    if (raw.empty()) return {};
    contexts_.push_back(raw.front().token.column);
    bool pending_open = false;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const Token& t = raw[i].token;
      bool line_processing = raw[i].first_on_line && i > 0;
      if (pending_open) {
        pending_open = false;
        if (t.column > enclosing_column()) {
          contexts_.push_back(t.column);
          emit(TokenKind::LayoutOpen, t);
          line_processing = false;
        } else {
          emit(TokenKind::LayoutOpen, t);
          emit(TokenKind::LayoutClose, t);
        }
      }
      if (line_processing) {
        while (top_is_block() && contexts_.size() > 1 && t.column < contexts_.back()) {
          contexts_.pop_back();
          emit(TokenKind::LayoutClose, t);
        }
        if (top_is_block() && t.column == contexts_.back()) emit(TokenKind::LayoutSep, t);
      }
      if (t.is_op(")")) {
        while (!contexts_.empty() && contexts_.back() != kParen && contexts_.size() > 1) {
          contexts_.pop_back();
          emit(TokenKind::LayoutClose, t);
        }
        if (!contexts_.empty() && contexts_.back() == kParen) contexts_.pop_back();
      }
      out_.push_back(t);
      if (t.is_op("(")) contexts_.push_back(kParen);
      if (opens_block_always(t)) {
        pending_open = true;
      } else if (opens_block_at_line_end(t)) {
        pending_open = i + 1 < raw.size() && raw[i + 1].first_on_line;
      }
    }
    const Token& last = raw.back().token;
    if (pending_open) {
      emit(TokenKind::LayoutOpen, last);
      emit(TokenKind::LayoutClose, last);
    }
    while (contexts_.size() > 1) {
      if (contexts_.back() != kParen) emit(TokenKind::LayoutClose, last);
      contexts_.pop_back();
    }
    return std::move(out_);
  }

 private:
  static constexpr int kParen = -1;

  bool top_is_block() const { return !contexts_.empty() && contexts_.back() != kParen; }

  int enclosing_column() const {
    for (auto it = contexts_.rbegin(); it != contexts_.rend(); ++it)
      if (*it != kParen) return *it;
    return 0;
  }

  void emit(TokenKind kind, const Token& at) { out_.push_back({kind, "", at.line, at.column}); }

  std::vector<int> contexts_;
  std::vector<Token> out_;
};

}  // namespace

bool is_keyword(std::string_view word) {
  for (auto k : kKeywords)
    if (k == word) return true;
  return false;
}

std::vector<Token> tokenize(std::string_view source) {
  auto raw = Scanner(source).scan();
  return Layout().run(raw);
}

}  // namespace campl
