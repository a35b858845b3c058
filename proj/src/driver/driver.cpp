#include "campl/driver.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "campl/checker.hpp"
#include "campl/machine.hpp"
#include "campl/parser.hpp"

namespace campl {

namespace {

std::optional<std::string> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void report(std::vector<Diagnostic> diags, const CliOptions& opts, std::ostream& out,
            std::ostream& err) {
  sort_by_position(diags);
  for (const auto& d : diags) {
    if (opts.json_diagnostics)
      out << format_json(d, opts.file) << '\n';
    else
      err << format_text(d, opts.file) << '\n';
  }
}

struct Loaded {
  int code = exit_code::ok;
  std::optional<SourceProgram> program;
};

Loaded load(const CliOptions& opts, bool type_check, std::ostream& out, std::ostream& err) {
  auto source = slurp(opts.file);
  if (!source) {
    err << opts.file << ": cannot read file\n";
    return {exit_code::io_error, std::nullopt};
  }
  ParseResult parsed = parse_source(*source);
  std::vector<Diagnostic> diags = parsed.errors;
  if (parsed.ok() && type_check) {
    CheckResult checked = check_program(parsed.program);
    diags.insert(diags.end(), checked.errors.begin(), checked.errors.end());
  }
  bool failed = !diags.empty();
  if (opts.warnings && parsed.ok()) {
    auto lint = lint_program(parsed.program);
    diags.insert(diags.end(), lint.begin(), lint.end());
  }
  report(std::move(diags), opts, out, err);
  if (failed) return {exit_code::diagnostics, std::nullopt};
  return {exit_code::ok, std::move(parsed.program)};
}

}  // namespace

int cmd_check(const CliOptions& opts, std::ostream& out, std::ostream& err) {
  return load(opts, true, out, err).code;
}

int cmd_dump_ast(const CliOptions& opts, std::ostream& out, std::ostream& err) {
  Loaded l = load(opts, false, out, err);
  if (l.program) out << roundtrip_print(*l.program);
  return l.code;
}

int cmd_run(const CliOptions& opts, std::ostream& out, std::ostream& err, std::istream& in) {
  Loaded l = load(opts, !opts.unchecked, out, err);
  if (!l.program) return l.code;

  ServiceConfig services;
  services.out = &out;
  services.in = &in;
  if (opts.stdin_path) {
    auto script = slurp(*opts.stdin_path);
    if (!script) {
      err << *opts.stdin_path << ": cannot read file\n";
      return exit_code::io_error;
    }
    services.mode = ServiceConfig::Mode::Scripted;
    std::istringstream lines(*script);
    for (std::string line; std::getline(lines, line);) services.script.push_back(line);
  } else {
    services.mode = ServiceConfig::Mode::Live;
  }
  // Scripted mode keeps printing to stdout.
  if (services.mode == ServiceConfig::Mode::Scripted) services.echo = &out;

  std::optional<Machine> machine;
  try {
    machine.emplace(*l.program, opts.seed, services);
  } catch (const std::exception& e) {
    err << opts.file << ": " << e.what() << '\n';
    return exit_code::diagnostics;
  }
  if (opts.trace) machine->set_trace_sink(&err);
  Outcome o = machine->run_to_completion(opts.max_steps);

  switch (o.kind) {
    case Outcome::Kind::Done: return exit_code::ok;
    case Outcome::Kind::Stuck:
      err << "stuck after " << o.steps << " steps\n";
      for (const auto& p : o.blocked) {
        err << "  pid=" << p.pid << " (" << p.proc << ") waiting on";
        for (const auto& [name, id] : p.waiting) err << ' ' << name << '#' << id;
        err << '\n';
      }
      return exit_code::stuck;
    case Outcome::Kind::StepLimit:
      err << "step limit of " << opts.max_steps << " reached\n";
      return exit_code::step_limit;
    case Outcome::Kind::Fault:
      err << "fault after " << o.steps << " steps: " << o.fault << ": " << o.message << '\n';
      for (const auto& e : o.cycle)
        err << "  channel #" << e.channel << " joins " << e.a << " and " << e.b << '\n';
      return exit_code::fault;
  }
  return exit_code::fault;
}

}  // namespace campl
