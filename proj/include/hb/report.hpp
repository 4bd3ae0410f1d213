#pragma once

#include <iosfwd>
#include <string>

#include "hb/machine.hpp"

namespace hb {

struct RunReport {
  Outcome outcome;
  Stats stats;
  double wall_ms = 0.0;
};

// Exit codes: 0 value, 1 blame, 2 runtime error, 3 step limit. Parse
// errors exit 4 and I/O errors 5, handled by the callers below.
int outcome_exit_code(const Outcome& o);

// "key: value" lines; wall time is excluded unless asked for, so the text
// is stable across runs.
std::string render_report(const RunReport& r, bool include_wall = false);

// Loads, parses and runs a source file, writing the report to `out` and
// diagnostics to `err`. Returns the process exit code.
int run_file(const std::string& path, const RunOptions& opts, bool show_wall,
             std::ostream& out, std::ostream& err);

}  // namespace hb
