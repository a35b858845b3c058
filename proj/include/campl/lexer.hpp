#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace campl {

enum class TokenKind {
  Keyword,
  Identifier,
  Operator,
  Integer,
  Char,
  String,
  LayoutOpen,
  LayoutSep,
  LayoutClose,
};

std::string_view to_string(TokenKind k);

/// String and char lexemes hold the decoded payload.
struct Token {
  TokenKind kind;
  std::string lexeme;
  int line = 0;
  int column = 0;

  bool is(TokenKind k, std::string_view text) const { return kind == k && lexeme == text; }
  bool is_keyword(std::string_view text) const { return is(TokenKind::Keyword, text); }
  bool is_op(std::string_view text) const { return is(TokenKind::Operator, text); }
  bool is_layout() const {
    return kind == TokenKind::LayoutOpen || kind == TokenKind::LayoutSep ||
           kind == TokenKind::LayoutClose;
  }

  friend bool operator==(const Token&, const Token&) = default;
};

class LexError : public std::runtime_error {
 public:
  LexError(int line, int column, const std::string& message)
      : std::runtime_error(message), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

bool is_keyword(std::string_view word);

/// Scans source text and inserts layout tokens.
///
/// Layout: a block opens after `do`, `of`, `as`, `plug` and `race`, and
/// after `=` or `->` when they end a line. The block's column is that of
/// the next token. A line starting at the block column begins a sibling
/// item (LayoutSep); a line starting left of it closes the block. Lines
/// indented further continue the current item. Parentheses shield their
/// contents: a `)` closes any blocks opened since its `(`. The file itself
/// is an implicit block whose items are separated but never opened/closed.
///
/// Throws LexError on unterminated literals, tabs, or stray characters.
std::vector<Token> tokenize(std::string_view source);

}  // namespace campl
