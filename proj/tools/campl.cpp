#include <CLI11.hpp>
#include <iostream>

#include "campl/driver.hpp"

int main(int argc, char** argv) {
  CLI::App app{"campl: check and run concurrent message-passing programs"};
  app.require_subcommand(1);

  campl::CliOptions opts;
  auto common = [&](CLI::App* sub) {
    sub->add_option("file", opts.file, "source file")->required();
    sub->add_flag("--json-diagnostics", opts.json_diagnostics,
                  "diagnostics as JSON lines on stdout");
    sub->add_flag("--warnings", opts.warnings, "also report style warnings");
  };

  auto* check = app.add_subcommand("check", "type check a program");
  common(check);

  auto* run = app.add_subcommand("run", "check and execute a program");
  common(run);
  run->add_option("--seed", opts.seed, "seed for race resolution")->default_val(0);
  run->add_option("--stdin", opts.stdin_path, "scripted console input, one line per read");
  run->add_flag("--trace", opts.trace, "write the step trace to stderr");
  run->add_option("--max-steps", opts.max_steps, "step budget")->default_val(100000);
  run->add_flag("--unchecked", opts.unchecked, "skip type checking");

  auto* dump = app.add_subcommand("dump-ast", "print the canonical form of a program");
  common(dump);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : campl::exit_code::io_error;
  }

  if (*check) return campl::cmd_check(opts, std::cout, std::cerr);
  if (*run) return campl::cmd_run(opts, std::cout, std::cerr, std::cin);
  return campl::cmd_dump_ast(opts, std::cout, std::cerr);
}
