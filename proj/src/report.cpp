#include "hb/report.hpp"

#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>

#include "hb/parser.hpp"

namespace hb {

int outcome_exit_code(const Outcome& o) {
  switch (o.kind) {
    case Outcome::Kind::Value: return 0;
    case Outcome::Kind::Blame: return 1;
    case Outcome::Kind::RuntimeError: return 2;
    case Outcome::Kind::StepLimit: return 3;
  }
  return 2;
}

std::string render_report(const RunReport& r, bool include_wall) {
  std::ostringstream out;
  out << "outcome: " << to_string(r.outcome) << "\n";
  if (r.outcome.kind == Outcome::Kind::Blame && r.outcome.blame.body_error)
    out << "detail: " << r.outcome.blame.body_error->render() << "\n";
  if (r.outcome.kind == Outcome::Kind::RuntimeError)
    out << "detail: " << r.outcome.message << "\n";
  out << "steps: " << r.stats.steps << "\n";
  out << "static_checks: " << r.stats.static_checks << "\n";
  out << "cache_hits: " << r.stats.cache_hits << "\n";
  out << "cache_misses: " << r.stats.cache_misses << "\n";
  out << "invalidations: " << r.stats.invalidations << "\n";
  out << "phases: " << r.stats.phases << "\n";
  if (include_wall) out << "wall_time_ms: " << r.wall_ms << "\n";
  return out.str();
}

int run_file(const std::string& path, const RunOptions& opts, bool show_wall,
             std::ostream& out, std::ostream& err) {
  std::ifstream in(path);
  if (!in) {
    err << "error: cannot open " << path << "\n";
    return 5;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  if (in.bad()) {
    err << "error: cannot read " << path << "\n";
    return 5;
  }

  ExprPtr program;
  try {
    program = parse(buf.str());
  } catch (const ParseError& pe) {
    err << path << ":" << pe.render() << "\n";
    return 4;
  }

  RunReport report;
  auto t0 = std::chrono::steady_clock::now();
  try {
    Machine m(program, opts);
    report.outcome = m.run();
    report.stats = m.stats();
  } catch (const ConsistencyViolation& cv) {
    err << path << ": " << cv.what() << "\n";
    return 2;
  }
  auto t1 = std::chrono::steady_clock::now();
  report.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  out << render_report(report, show_wall);
  return outcome_exit_code(report.outcome);
}

}  // namespace hb
