#include "campl/lexer.hpp"

#include <doctest.h>

using namespace campl;

namespace {

std::string kinds(const std::vector<Token>& toks) {
  std::string out;
  for (const auto& t : toks) {
    switch (t.kind) {
      case TokenKind::LayoutOpen: out += "{ "; break;
      case TokenKind::LayoutSep: out += "; "; break;
      case TokenKind::LayoutClose: out += "} "; break;
      case TokenKind::String: out += "\"" + t.lexeme + "\" "; break;
      default: out += t.lexeme + " ";
    }
  }
  return out;
}

}  // namespace

TEST_CASE("lexer: comments vanish and literals decode") {
  auto toks = tokenize("put \"a\\\"b\" -- trailing comment\n");
  REQUIRE(toks.size() == 2);
  CHECK(toks[0].is_keyword("put"));
  CHECK(toks[1].kind == TokenKind::String);
  CHECK(toks[1].lexeme == "a\"b");
  CHECK(toks[1].line == 1);
  CHECK(toks[1].column == 5);
}

TEST_CASE("lexer: char and integer literals") {
  auto toks = tokenize("put 'x' on c\nput 42 on c\n");
  CHECK(toks[1].kind == TokenKind::Char);
  CHECK(toks[1].lexeme == "x");
  bool saw_int = false;
  for (const auto& t : toks) saw_int |= t.kind == TokenKind::Integer && t.lexeme == "42";
  CHECK(saw_int);
}

TEST_CASE("lexer: do opens a block and dedent closes it") {
  auto toks = tokenize("proc p =\n    | => c -> do\n        put 1 on c\n        halt c\n");
  CHECK(kinds(toks) == "proc p = { | => c -> do { put 1 on c ; halt c } } ");
}

TEST_CASE("lexer: top level items are separated without braces") {
  auto toks = tokenize("proc a =\n    x\nproc b =\n    y\n");
  CHECK(kinds(toks) == "proc a = { x } ; proc b = { y } ");
}

TEST_CASE("lexer: '=' mid-line does not open a block") {
  auto toks = tokenize("proc p :: | => TopBot =\n    | => c -> halt c\n");
  CHECK(kinds(toks) == "proc p :: | => TopBot = { | => c -> halt c } ");
}

TEST_CASE("lexer: parentheses shield layout") {
  auto toks = tokenize("proc p =\n    | => c -> do\n        call( 1,\n  2 | => c )\n");
  CHECK(kinds(toks) == "proc p = { | => c -> do { call ( 1 , 2 | => c ) } } ");
}

TEST_CASE("lexer: continuation lines join the current item") {
  auto toks =
      tokenize("proc p =\n    | => c -> do\n        put 1\n            on c\n        halt c\n");
  CHECK(kinds(toks) == "proc p = { | => c -> do { put 1 on c ; halt c } } ");
}

TEST_CASE("lexer: tabs and stray characters are errors") {
  CHECK_THROWS_AS(tokenize("proc p =\n\thalt c\n"), LexError);
  CHECK_THROWS_AS(tokenize("put \"open\n"), LexError);
  CHECK_THROWS_AS(tokenize("put $ on c\n"), LexError);
  try {
    tokenize("proc p =\n    put ` on c\n");
    FAIL("no error");
  } catch (const LexError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 9);
  }
}

TEST_CASE("lexer: keywords") {
  for (const char* kw : {"proc", "protocol", "coprotocol", "put",  "get",   "hput", "hcase",
                         "fork", "split",    "plug",       "race", "close", "halt", "on",
                         "do",   "as",       "into",       "of",   "neg",   "use",  "store"})
    CHECK_MESSAGE(is_keyword(kw), kw);
  CHECK_FALSE(is_keyword("client"));
}
