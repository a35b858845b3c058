#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace campl {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int diagnostics = 1;
inline constexpr int io_error = 2;
inline constexpr int stuck = 3;
inline constexpr int step_limit = 4;
inline constexpr int fault = 5;
}  // namespace exit_code

struct CliOptions {
  std::string file;
  std::uint64_t seed = 0;
  /// Scripted console input, one line per ConsoleGet.
  std::optional<std::string> stdin_path;
  bool trace = false;
  std::size_t max_steps = 100000;
  bool unchecked = false;
  bool json_diagnostics = false;
  /// Also report style warnings; they never change the exit code.
  bool warnings = false;
};

/// Text diagnostics go to `err`; JSON lines go to `out`.
int cmd_check(const CliOptions& opts, std::ostream& out, std::ostream& err);

/// Console output and JSON diagnostics go to `out`; trace lines, text
/// diagnostics and the final report go to `err`. Live console input is
/// read from `in`.
int cmd_run(const CliOptions& opts, std::ostream& out, std::ostream& err, std::istream& in);

/// Canonical re-parseable form of the parsed file.
int cmd_dump_ast(const CliOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace campl
