#include "campl/checker.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

#include "campl/parser.hpp"
#include "campl/program.hpp"
#include "support.hpp"

using namespace campl;
using campl::testing::corpus_file;
using campl::testing::corpus_stems;
using campl::testing::hand_unify;
using campl::testing::parse_ok;
using campl::testing::read_file;

namespace {

CheckResult check_src(const std::string& src) { return check_program(parse_ok(src)); }

CheckResult check_corpus(const std::string& stem) {
  return check_src(read_file(corpus_file(stem)));
}

bool has_kind(const CheckResult& r, DiagKind k) {
  return std::any_of(r.errors.begin(), r.errors.end(),
                     [&](const Diagnostic& d) { return d.kind == k; });
}

std::string kinds(const CheckResult& r) {
  std::string out;
  for (const auto& d : r.errors) out += std::string(to_string(d.kind)) + ": " + d.message + "\n";
  return out;
}

void expect_error(const std::string& src, DiagKind k) {
  CheckResult r = check_src(src);
  CHECK_MESSAGE(has_kind(r, k), "expected ", to_string(k), ", got:\n", kinds(r));
}

void check_partitions(const TypedProgram& tp) {
  for (const auto& part : tp.partitions) {
    CAPTURE(part.proc);
    for (const auto& used : part.consumed)
      CHECK(std::includes(part.available.begin(), part.available.end(), used.begin(), used.end()));
    if (part.command == CommandKind::Fork) {
      REQUIRE(part.consumed.size() == 2);
      std::set<std::string> both;
      std::set_intersection(part.consumed[0].begin(), part.consumed[0].end(),
                            part.consumed[1].begin(), part.consumed[1].end(),
                            std::inserter(both, both.end()));
      CHECK(both.empty());
      std::set<std::string> all = part.consumed[0];
      all.insert(part.consumed[1].begin(), part.consumed[1].end());
      CHECK(all == part.available);
    } else {
      for (const auto& used : part.consumed) CHECK(used == part.consumed.front());
    }
  }
}

}  // namespace

TEST_CASE("checker: corpus programs check, except the unpolarized one") {
  for (const auto& stem : corpus_stems()) {
    CAPTURE(stem);
    CheckResult r = check_corpus(stem);
    if (stem == "no_polarity") {
      CHECK_FALSE(r.ok());
      continue;
    }
    CHECK_MESSAGE(r.ok(), kinds(r));
    REQUIRE(r.program);
    check_partitions(*r.program);
  }
}

TEST_CASE("checker: unpolarized contexts are rejected on ch") {
  CheckResult r = check_corpus("no_polarity");
  REQUIRE_FALSE(r.errors.empty());
  for (const auto& d : r.errors) {
    CHECK(d.kind == DiagKind::PolarityViolation);
    CHECK(d.channel == "ch");
  }
}

TEST_CASE("checker: explicit signatures are kept verbatim") {
  CheckResult r = check_corpus("typed_echo");
  REQUIRE_MESSAGE(r.ok(), kinds(r));
  const auto& tp = *r.program;
  CHECK(render(*tp.signature("server")) == "Int | Put([Char]|Get(Int|TopBot)) =>");
  CHECK(render(*tp.signature("client")) == "| => Put([Char]|Get(Int|TopBot))");
  auto ch = tp.plugged_type("run", "ch");
  REQUIRE(ch);
  CHECK(render(*ch) == "Put([Char]|Get(Int|TopBot))");
}

TEST_CASE("checker: inferred echo type matches hand unification") {
  Program p = parse_ok(read_file(corpus_file("echo")));
  for (const auto& d : p.declarations)
    if (auto* def = std::get_if<ProcDef>(&d)) REQUIRE_FALSE(def->signature);
  CheckResult r = check_program(p);
  REQUIRE_MESSAGE(r.ok(), kinds(r));
  auto inferred = r.program->plugged_type("run", "ch");
  REQUIRE(inferred);

  auto oracle = hand_unify(elaborate(p.find_proc("client")->body), "ch",
                           elaborate(p.find_proc("server")->body), "ch");
  REQUIRE(oracle);
  CHECK(render(*oracle) == "Put([Char]|Get([Char]|TopBot))");
  CHECK(type_equal(*inferred, *oracle));
  CHECK(render(*r.program->signature("client")) == "| => Put([Char]|Get([Char]|TopBot))");
  CHECK(render(*r.program->signature("server")) == "| Put([Char]|Get([Char]|TopBot)) =>");
}

TEST_CASE("checker: inference agrees with the typed variant's shape") {
  auto inferred = check_corpus("echo").program->plugged_type("run", "ch");
  auto typed = check_corpus("typed_echo").program->plugged_type("run", "ch");
  REQUIRE(inferred);
  REQUIRE(typed);
  CHECK(inferred->kind() == typed->kind());
  CHECK(inferred->rest().kind() == typed->rest().kind());
  CHECK(inferred->rest().rest().kind() == ChanType::Kind::TopBot);
}

TEST_CASE("checker: higher-order message type") {
  CheckResult r = check_corpus("higher_order");
  REQUIRE_MESSAGE(r.ok(), kinds(r));
  auto ch = r.program->plugged_type("run", "ch");
  REQUIRE(ch);
  CHECK(render(*ch) == "Put(Store(| Console =>)|TopBot)");
}

TEST_CASE("checker: channel annotations follow the command matrix") {
  for (const auto& stem : corpus_stems()) {
    if (stem == "no_polarity") continue;
    CAPTURE(stem);
    CheckResult r = check_corpus(stem);
    REQUIRE(r.program);
    for (const auto& a : r.program->channels) {
      CAPTURE(a.channel);
      if (a.command == CommandKind::Race) {
        CHECK(can_race(a.type, a.polarity));
        continue;
      }
      if (a.command == CommandKind::Call || a.command == CommandKind::Use ||
          a.command == CommandKind::Plug)
        continue;
      CAPTURE(to_string(a.command));
      CHECK(allowed_commands(a.type, a.polarity).count(a.command) == 1);
    }
  }
}

TEST_CASE("negative: dropped channel") {
  expect_error("proc lazy =\n    | a => b -> do\n        close a\n", DiagKind::LinearityDrop);
}

TEST_CASE("negative: double close") {
  expect_error(
      "proc twice =\n    | a => b -> do\n        close a\n        close a\n        halt b\n",
      DiagKind::LinearityReuse);
}

TEST_CASE("negative: put after close") {
  expect_error(
      "proc late =\n    | a => b -> do\n        close a\n        put 1 on a\n        halt b\n",
      DiagKind::LinearityReuse);
}

TEST_CASE("negative: fork with overlapping partitions") {
  expect_error(
      "proc greedy =\n    | other => two -> do\n        fork two as\n"
      "            x -> do\n                close other\n                halt x\n"
      "            y -> do\n                close other\n                halt y\n",
      DiagKind::LinearityReuse);
}

TEST_CASE("negative: plug triangle") {
  expect_error(
      "proc node =\n    | a => b -> do\n        close a\n        halt b\n"
      "proc run =\n    | => -> plug\n        node( | x => y )\n        node( | y => z )\n"
      "        node( | z => x )\n",
      DiagKind::PlugCycle);
}

TEST_CASE("negative: handle names are global") {
  expect_error(
      "protocol First => S =\n    Go :: TopBot => S\n"
      "protocol Second => S =\n    Go :: TopBot => S\n",
      DiagKind::HandleDuplicate);
}

TEST_CASE("negative: polarity and command legality") {
  // put on a Put channel held at input
  expect_error(
      "proc p :: | Put(Int|TopBot) => =\n    | c => -> do\n        put 1 on c\n        halt c\n",
      DiagKind::PolarityViolation);
  // fork on a Put channel
  expect_error(
      "proc p :: | => Put(Int|TopBot) =\n    | => c -> do\n        fork c as\n"
      "            a -> halt a\n            b -> halt b\n",
      DiagKind::IllegalCommand);
}

TEST_CASE("negative: message types must agree") {
  expect_error(
      "proc p :: | => Put([Char]|TopBot) =\n    | => c -> do\n        put 1 on c\n        halt c\n",
      DiagKind::SeqMismatch);
}

TEST_CASE("negative: halt must be last") {
  expect_error("proc p =\n    | => c, d -> do\n        halt c\n        halt d\n",
               DiagKind::HaltNotLast);
}

TEST_CASE("negative: unknown handle and missing hcase arm") {
  const std::string proto = "protocol P => S =\n    A :: TopBot => S\n    B :: TopBot => S\n";
  expect_error(
      proto + "proc p :: | => P =\n    | => c -> do\n        hput Zed on c\n        halt c\n",
      DiagKind::HandleUnknown);
  expect_error(proto +
                   "proc q :: | P => =\n    | c => -> do\n        hcase c of\n"
                   "            A -> halt c\n",
               DiagKind::IllegalCommand);
}

TEST_CASE("negative: race arm must receive") {
  expect_error(
      "proc p :: | => Put(Int|TopBot), Put(Int|TopBot) =\n    | => a, b -> do\n        race\n"
      "            a -> do\n                put 1 on a\n                close a\n"
      "                put 2 on b\n                halt b\n"
      "            b -> do\n                put 1 on b\n                close b\n"
      "                put 2 on a\n                halt a\n",
      DiagKind::RaceArmNotReceiving);
}

TEST_CASE("negative: plug polarity and usage") {
  const std::string procs =
      "proc give =\n    | => c -> halt c\n"
      "proc take =\n    | c => -> halt c\n";
  expect_error(
      procs + "proc run =\n    | => -> plug\n        give( | => x )\n        give( | => x )\n",
      DiagKind::PlugPolarityMismatch);
  expect_error(
      procs + "proc run =\n    | => -> plug\n        give( | => x )\n        take( | y => )\n",
      DiagKind::LinearityDrop);
}

TEST_CASE("negative: disconnected plug") {
  expect_error(
      "proc give =\n    | => c -> halt c\nproc take =\n    | c => -> halt c\n"
      "proc run =\n    | => -> plug\n        give( | => x )\n        take( | x => )\n"
      "        give( | => y )\n        take( | y => )\n",
      DiagKind::PlugCycle);
}

TEST_CASE("negative: names, arity and recursion through types") {
  expect_error("proc p =\n    | => c -> do\n        missing( | => c )\n", DiagKind::UnknownName);
  expect_error("proc p =\n    | => c -> halt c\nproc p =\n    | => c -> halt c\n",
               DiagKind::DuplicateDefinition);
  expect_error(
      "proc p :: Int | => TopBot =\n    | => c -> halt c\n"
      "proc q =\n    | => c -> do\n        p( | => c )\n",
      DiagKind::ArityMismatch);
}

TEST_CASE("negative: console cannot be plugged") {
  expect_error(
      "proc p :: | Console => =\n    | c => -> do\n        hput ConsoleClose on c\n        halt c\n"
      "proc q :: | => Console =\n    | => c -> do\n        hcase c of\n"
      "            ConsolePut -> halt c\n"
      "            ConsoleGet -> halt c\n"
      "            ConsoleClose -> halt c\n"
      "proc run =\n    | => -> plug\n        p( | x => )\n        q( | => x )\n",
      DiagKind::IllegalCommand);
}

TEST_CASE("property: random tree programs check with sound partitions") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 200; ++i) {
    auto prog = campl::testing::random_program(rng);
    CAPTURE(prog.source);
    CheckResult r = check_src(prog.source);
    REQUIRE_MESSAGE(r.ok(), kinds(r));
    check_partitions(*r.program);
  }
}

TEST_CASE("negative: a body must end with halt") {
  expect_error("proc p =\n    | => c -> do\n        close c\n", DiagKind::HaltNotLast);
}

TEST_CASE("checker: neg flips polarity and link needs equal types") {
  CheckResult ok = check_src(
      "proc p =\n    | => c -> do\n        neg c as d\n        halt d\n"
      "proc q =\n    | c => -> do\n        neg c as d\n        halt d\n"
      "proc run =\n    | => -> plug\n        p( | => c )\n        q( | c => )\n");
  CHECK_MESSAGE(ok.ok(), kinds(ok));
  expect_error(
      "proc r :: | Put(Int|TopBot) => Put([Char]|TopBot) =\n    | a => b -> a |=| b\n",
      DiagKind::UnificationFailure);
  expect_error("proc r =\n    | a, b => -> a |=| b\n", DiagKind::PolarityViolation);
}
