#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "campl/checker.hpp"
#include "campl/console.hpp"
#include "campl/machine.hpp"
#include "campl/topology.hpp"
#include "support.hpp"

using namespace campl;
using campl::testing::corpus_file;
using campl::testing::corpus_stems;
using campl::testing::parse_ok;
using campl::testing::read_file;
using campl::testing::run_source;

namespace {

Machine boot(const std::string& src, std::uint64_t seed = 0, std::vector<std::string> script = {}) {
  ServiceConfig cfg;
  cfg.script = std::move(script);
  return Machine(parse_ok(src), seed, cfg);
}

std::vector<std::string> commands(const Outcome& o) {
  std::vector<std::string> out;
  for (const auto& e : o.trace) out.emplace_back(to_string(e.command));
  return out;
}

std::multiset<std::string> active(const Machine& m) {
  std::multiset<std::string> out;
  for (const auto& p : m.processes())
    if (p.status != ProcessView::Status::Finished) out.insert(p.proc);
  return out;
}

}  // namespace

// --- topology ------------------------------------------------------------

TEST_CASE("topology: a path is acyclic, a triangle is not") {
  Topology path;
  for (long n : {0L, 1L, 2L}) path.add_node(n);
  path.add_edge(10, 0, 1);
  path.add_edge(11, 1, 2);
  CHECK_FALSE(path.find_cycle());
  CHECK(campl::testing::is_forest(path));

  Topology tri = path;
  tri.add_edge(12, 2, 0);
  auto cycle = tri.find_cycle();
  REQUIRE(cycle);
  CHECK(cycle->size() == 3);
  std::set<int> ids;
  for (const auto& e : *cycle) ids.insert(e.channel);
  CHECK(ids == std::set<int>{10, 11, 12});
  CHECK_FALSE(campl::testing::is_forest(tri));
}

TEST_CASE("topology: parallel edges and self loops are cycles") {
  Topology par;
  par.add_node(0);
  par.add_node(1);
  par.add_edge(1, 0, 1);
  par.add_edge(2, 1, 0);
  auto c = par.find_cycle();
  REQUIRE(c);
  CHECK(c->size() == 2);

  Topology self;
  self.add_node(Topology::service_node(0));
  self.add_edge(3, -1, -1);
  CHECK(self.find_cycle());
}

TEST_CASE("property: find_cycle agrees with a union-find oracle") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    Topology t;
    int n = 1 + static_cast<int>(rng() % 7);
    for (int k = 0; k < n; ++k) t.add_node(k);
    int m = static_cast<int>(rng() % 8);
    for (int k = 0; k < m; ++k)
      t.add_edge(k, static_cast<long>(rng() % n), static_cast<long>(rng() % n));
    CHECK(t.find_cycle().has_value() == !campl::testing::is_forest(t));
  }
}

// --- console -------------------------------------------------------------

TEST_CASE("console: put, get and close") {
  ServiceConfig cfg;
  cfg.script = {"typed line"};
  ConsoleEndpoint c(cfg);
  CHECK_FALSE(c.dispatch(Message::handle_of("ConsolePut")));
  CHECK(c.state() == ConsoleEndpoint::State::AwaitValue);
  CHECK_FALSE(c.dispatch(Message::val(Value{std::string("hi")})));
  auto reply = c.dispatch(Message::handle_of("ConsoleGet"));
  REQUIRE(reply);
  CHECK(reply->kind == Message::Kind::Val);
  CHECK(std::get<std::string>(reply->value.data) == "typed line");
  CHECK_FALSE(c.dispatch(Message::handle_of("ConsoleClose")));
  CHECK_FALSE(c.dispatch(Message::close()));
  CHECK(c.state() == ConsoleEndpoint::State::Closed);
  CHECK(drain_output(c) == std::vector<std::string>{"hi"});
}

TEST_CASE("console: exhausted script and protocol errors") {
  ConsoleEndpoint empty{ServiceConfig{}};
  CHECK_THROWS_AS(empty.dispatch(Message::handle_of("ConsoleGet")), ScriptExhausted);
  ConsoleEndpoint c{ServiceConfig{}};
  CHECK_THROWS_AS(c.dispatch(Message::val(Value{std::int64_t{1}})), ConsoleProtocolError);
  ConsoleEndpoint d{ServiceConfig{}};
  d.dispatch(Message::handle_of("ConsolePut"));
  CHECK_THROWS_AS(d.dispatch(Message::handle_of("ConsolePut")), ConsoleProtocolError);
}

TEST_CASE("console: values print without quotes") {
  ConsoleEndpoint c{ServiceConfig{}};
  for (Value v : {Value{std::int64_t{42}}, Value{std::string("text")}, Value{true}}) {
    c.dispatch(Message::handle_of("ConsolePut"));
    c.dispatch(Message::val(v));
  }
  CHECK(c.output() == std::vector<std::string>{"42", "text", "True"});
}

// --- machine -------------------------------------------------------------

TEST_CASE("machine: hello world") {
  auto s = run_source(read_file(corpus_file("hello_world")));
  CHECK(s.outcome.kind == Outcome::Kind::Done);
  CHECK(s.outcome.output == std::vector<std::string>{"Hello World!"});
}

TEST_CASE("machine: echo runs put, get, put, get then halts") {
  auto s = run_source(read_file(corpus_file("echo")));
  REQUIRE(s.outcome.kind == Outcome::Kind::Done);
  std::vector<std::string> io;
  for (const auto& e : s.outcome.trace)
    if (e.command == CommandKind::Put || e.command == CommandKind::Get)
      io.push_back(std::to_string(e.pid) + ":" + std::string(to_string(e.command)) + ":" +
                   e.payload);
  CHECK(io == std::vector<std::string>{"1:put:\"Hello Server!\"", "2:get:\"Hello Server!\"",
                                       "2:put:\"Hello Server!\"", "1:get:\"Hello Server!\""});
  Machine m = boot(read_file(corpus_file("echo")));
  m.run_to_completion();
  CHECK(m.channels().empty());
}

TEST_CASE("machine: fork and split leave two clients on one server") {
  Machine m = boot(read_file(corpus_file("fork_clients")));
  std::optional<TraceEvent> split;
  for (int guard = 0; guard < 100 && !split; ++guard) {
    auto r = m.step();
    REQUIRE(r.kind == Machine::StepKind::Stepped);
    if (r.event->command == CommandKind::Split) split = r.event;
  }
  REQUIRE(split);
  // Three live processes: the server and the two fork branches, each of
  // which is about to become a client.
  auto procs = m.processes();
  std::vector<int> live;
  for (const auto& p : procs)
    if (p.status != ProcessView::Status::Finished) live.push_back(p.pid);
  REQUIRE(live.size() == 3);
  Topology t = m.topology();
  CHECK(t.nodes().size() == 3);
  CHECK(t.edges().size() == 2);
  CHECK_FALSE(t.find_cycle());
  std::map<long, int> degree;
  for (const auto& e : t.edges()) {
    ++degree[e.a];
    ++degree[e.b];
  }
  CHECK(degree[split->pid] == 2);
  std::multiset<int> degrees;
  for (const auto& [n, d] : degree) degrees.insert(d);
  CHECK(degrees == std::multiset<int>{1, 1, 2});

  Outcome o = m.run_to_completion();
  CHECK(o.kind == Outcome::Kind::Done);
  std::set<int> callers;
  for (const auto& e : o.trace)
    if (e.command == CommandKind::Call && e.payload == "client") callers.insert(e.pid);
  std::set<int> branches;
  for (int pid : live)
    if (pid != split->pid) branches.insert(pid);
  CHECK(callers == branches);
}

TEST_CASE("machine: unpolarized echo is stuck with both ends waiting") {
  auto s = run_source(read_file(corpus_file("no_polarity")));
  REQUIRE(s.outcome.kind == Outcome::Kind::Stuck);
  REQUIRE(s.outcome.blocked.size() == 2);
  const auto& a = s.outcome.blocked[0].waiting;
  const auto& b = s.outcome.blocked[1].waiting;
  REQUIRE(a.size() == 1);
  REQUIRE(b.size() == 1);
  CHECK(a[0].first == "ch");
  CHECK(a[0].second == b[0].second);
}

TEST_CASE("machine: race picks among ready arms without consuming") {
  const std::string src = read_file(corpus_file("race_echo"));
  std::set<std::string> winners;
  for (std::uint64_t seed = 0; seed < 32; ++seed) {
    auto s = run_source(src, seed);
    REQUIRE(s.outcome.kind == Outcome::Kind::Done);
    REQUIRE(s.winners.size() == 1);
    winners.insert(s.winners[0]);
    auto race = std::find_if(s.outcome.trace.begin(), s.outcome.trace.end(),
                             [](const TraceEvent& e) { return e.command == CommandKind::Race; });
    REQUIRE(race != s.outcome.trace.end());
    CHECK(race->payload == "winner=" + s.winners[0] + " ready=ch1,ch2");
    auto next = std::find_if(race + 1, s.outcome.trace.end(),
                             [&](const TraceEvent& e) { return e.pid == race->pid; });
    REQUIRE(next != s.outcome.trace.end());
    CHECK(next->command == CommandKind::Call);
    CHECK(std::find_if(next + 1, s.outcome.trace.end(), [&](const TraceEvent& e) {
            return e.pid == race->pid && e.command == CommandKind::Get;
          })->channel_id == race->channel_id);
  }
  CHECK(winners == std::set<std::string>{"ch1", "ch2"});
}

TEST_CASE("machine: a fixed seed replays the same trace") {
  const std::string src = read_file(corpus_file("race_echo"));
  for (std::uint64_t seed : {0u, 7u, 31u}) {
    auto a = run_source(src, seed), b = run_source(src, seed);
    CHECK(a.trace == b.trace);
  }
}

TEST_CASE("machine: recursive protocol forwarding") {
  for (const char* stem : {"forward_protocol", "forward_coprotocol"}) {
    CAPTURE(stem);
    auto s = run_source(read_file(corpus_file(stem)));
    CHECK(s.outcome.kind == Outcome::Kind::Done);
    CHECK(s.outcome.output == std::vector<std::string>{"first", "second", "third"});
    auto hcases =
        std::count_if(s.outcome.trace.begin(), s.outcome.trace.end(),
                      [](const TraceEvent& e) { return e.command == CommandKind::HCase; });
    CHECK(hcases >= 4);
  }
}

TEST_CASE("machine: stored processes travel and run") {
  auto s = run_source(read_file(corpus_file("higher_order")));
  CHECK(s.outcome.kind == Outcome::Kind::Done);
  CHECK(s.outcome.output ==
        std::vector<std::string>{"Server says: Running the stored process", "Hello World!"});
}

TEST_CASE("machine: console input comes from the script") {
  const std::string src =
      "proc run =\n    | console => -> do\n        on console do\n"
      "            hput ConsoleGet\n            get line\n            hput ConsolePut\n"
      "            put line\n            hput ConsoleClose\n            halt\n";
  auto s = run_source(src, 0, {"typed"});
  CHECK(s.outcome.kind == Outcome::Kind::Done);
  CHECK(s.outcome.output == std::vector<std::string>{"typed"});
  auto none = run_source(src, 0, {});
  CHECK(none.outcome.kind == Outcome::Kind::Fault);
  CHECK(none.outcome.fault == "ScriptExhausted");
}

TEST_CASE("machine: link fuses two channels") {
  const std::string src =
      "proc producer =\n    | => ch -> do\n        put \"linked\" on ch\n        halt ch\n"
      "proc relay =\n    | source => dest -> source |=| dest\n"
      "proc consumer =\n    | ch, console => -> do\n        get msg on ch\n        close ch\n"
      "        on console do\n            hput ConsolePut\n            put msg\n"
      "            hput ConsoleClose\n            halt\n"
      "proc run =\n    | console => -> plug\n        producer( | => a )\n"
      "        relay( | a => b )\n        consumer( | b, console => )\n";
  CHECK(check_program(parse_ok(src)).ok());
  Machine m = boot(src);
  Outcome o = m.run_to_completion();
  CHECK(o.kind == Outcome::Kind::Done);
  CHECK(o.output == std::vector<std::string>{"linked"});
  auto cmds = commands(o);
  CHECK(std::count(cmds.begin(), cmds.end(), "|=|") == 1);
  auto trace = o.trace;
  CHECK(std::any_of(trace.begin(), trace.end(), [](const TraceEvent& e) {
    return e.format().find(" LINK ch=source#") != std::string::npos;
  }));
}

TEST_CASE("machine: link keeps messages already in flight in order") {
  // The producer sends twice before the relay links; the consumer must
  // see both, in order.
  const std::string src =
      "proc producer =\n    | => ch -> do\n        put 1 on ch\n        put 2 on ch\n        halt "
      "ch\n"
      "proc relay =\n    | source => dest -> do\n        put 0 on dest\n        source |=| dest\n"
      "proc consumer =\n    | ch => -> do\n        get a on ch\n        get b on ch\n"
      "        get c on ch\n        halt ch\n"
      "proc run =\n    | => -> plug\n        producer( | => a )\n"
      "        relay( | a => b )\n        consumer( | b => )\n";
  Outcome o = boot(src).run_to_completion();
  REQUIRE(o.kind == Outcome::Kind::Done);
  std::vector<std::string> got;
  for (const auto& e : o.trace)
    if (e.command == CommandKind::Get) got.push_back(e.payload);
  CHECK(got == std::vector<std::string>{"0", "1", "2"});
}

TEST_CASE("machine: neg renames without moving the end") {
  const std::string src =
      "proc p =\n    | => c -> do\n        neg c as d\n        put 1 on d\n        halt d\n"
      "proc q =\n    | c => -> do\n        get x on c\n        halt c\n"
      "proc run =\n    | => -> plug\n        p( | => c )\n        q( | c => )\n";
  CHECK(boot(src).run_to_completion().kind == Outcome::Kind::Done);
}

TEST_CASE("machine: an unchecked plug triangle trips the topology monitor") {
  const std::string src =
      "proc node =\n    | a => b -> do\n        close a\n        halt b\n"
      "proc run =\n    | => -> plug\n        node( | x => y )\n        node( | y => z )\n"
      "        node( | z => x )\n";
  Outcome o = boot(src).run_to_completion();
  REQUIRE(o.kind == Outcome::Kind::Fault);
  CHECK(o.fault == "CycleFound");
  CHECK(o.cycle.size() == 3);
  CHECK(o.steps == 1);
}

TEST_CASE("machine: step limit and missing run") {
  const std::string spin =
      "proc spin =\n    | => -> spin( | => )\nproc run =\n    | => -> spin( | => )\n";
  Outcome o = boot(spin).run_to_completion(50);
  CHECK(o.kind == Outcome::Kind::StepLimit);
  CHECK(o.steps == 50);
  CHECK_THROWS_AS(boot("proc p =\n    | => c -> halt c\n"), MissingRun);
  CHECK_THROWS_AS(boot("proc run =\n    | => c -> halt c\n"), BootError);
}

TEST_CASE("machine: desynchronised commands fault") {
  const std::string src =
      "proc p =\n    | => c -> do\n        hput Go on c\n        halt c\n"
      "proc q =\n    | c => -> do\n        get x on c\n        halt c\n"
      "proc run =\n    | => -> plug\n        p( | => c )\n        q( | c => )\n";
  Outcome o = boot(src).run_to_completion();
  CHECK(o.kind == Outcome::Kind::Fault);
  CHECK(o.fault == "IllegalCommand");
}

TEST_CASE("machine: trace line format") {
  auto s = run_source(read_file(corpus_file("hello_world")));
  REQUIRE(s.trace.size() >= 3);
  CHECK(s.trace[0] == "#1 pid=0 CALL payload=helloworld");
  CHECK(s.trace[1] == "#2 pid=0 HPUT ch=console#0 payload=ConsolePut");
  CHECK(s.trace[2] == "#3 pid=0 PUT ch=console#0 payload=\"Hello World!\"");
  CHECK(s.trace.back() == "#5 pid=0 HALT ch=console#0");
}

TEST_CASE("property: corpus runs keep the network acyclic and ends conserved") {
  for (const auto& stem : corpus_stems()) {
    if (stem == "no_polarity") continue;
    CAPTURE(stem);
    Machine m = boot(read_file(corpus_file(stem)));
    while (true) {
      auto r = m.step();
      if (r.kind != Machine::StepKind::Stepped) {
        CHECK(r.kind == Machine::StepKind::Done);
        break;
      }
      CHECK(campl::testing::is_forest(m.topology()));
      auto bad = campl::testing::ends_conserved(m);
      CHECK_MESSAGE(!bad, *bad);
    }
  }
}

TEST_CASE("property: random well-typed programs finish without cycles") {
  std::mt19937_64 rng(2024);
  int forks = 0;
  for (int i = 0; i < 500; ++i) {
    auto prog = campl::testing::random_program(rng);
    CAPTURE(prog.source);
    CHECK(prog.processes <= 6);
    CHECK(prog.channels <= 8);
    CHECK(prog.max_depth <= 3);
    forks += prog.channels > prog.processes - 1;
    Machine m = boot(prog.source, static_cast<std::uint64_t>(i));
    while (true) {
      auto r = m.step();
      if (r.kind != Machine::StepKind::Stepped) {
        REQUIRE_MESSAGE(r.kind == Machine::StepKind::Done, m.fault_message());
        break;
      }
      REQUIRE(campl::testing::is_forest(m.topology()));
      auto bad = campl::testing::ends_conserved(m);
      REQUIRE_MESSAGE(!bad, *bad);
    }
  }
  CHECK(forks > 50);
}
