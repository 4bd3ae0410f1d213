#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "hb/harness.hpp"
#include "hb/report.hpp"

namespace {

// "LO..HI", both inclusive.
bool parse_seed_range(const std::string& text, std::uint64_t& lo, std::uint64_t& hi) {
  auto pos = text.find("..");
  if (pos == std::string::npos) return false;
  try {
    lo = std::stoull(text.substr(0, pos));
    hi = std::stoull(text.substr(pos + 2));
  } catch (...) {
    return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interpreter for a small dynamic language whose method bodies "
               "are statically type checked at first call, with checks cached "
               "and invalidated as definitions change"};
  app.require_subcommand(1);

  // run
  std::string path;
  hb::RunOptions run_opts;
  bool no_cache = false, show_stats = false, trace = false;
  auto* run_cmd = app.add_subcommand("run", "Run a .hb source file");
  run_cmd->add_option("file", path, "source file")->required();
  run_cmd->add_flag("--no-cache", no_cache, "re-check method bodies on every call");
  run_cmd->add_flag("--instrument", run_opts.instrument,
                    "verify environment and cache consistency after every step");
  run_cmd->add_flag("--instrument-stack", run_opts.instrument_stack,
                    "also verify stack consistency after every step");
  run_cmd->add_flag("--trace", trace, "print one line per step");
  run_cmd->add_option("--max-steps", run_opts.max_steps, "step budget")
      ->default_val(1'000'000);
  run_cmd->add_flag("--stats", show_stats, "include wall time in the report");
  run_cmd
      ->add_flag("--bug-skip-def-invalidate", run_opts.bug_skip_def_invalidate)
      ->group("");  // test-only, hidden

  // fuzz
  std::string seeds = "1..1000";
  hb::FuzzOptions fuzz_opts;
  auto* fuzz_cmd = app.add_subcommand("fuzz", "Run the property suites over a seed range");
  fuzz_cmd->add_option("--seeds", seeds, "seed range LO..HI, inclusive")
      ->default_val("1..1000");
  fuzz_cmd->add_option("--size", fuzz_opts.size, "program size budget")->default_val(30);
  fuzz_cmd->add_option("--max-steps", fuzz_opts.max_steps, "step budget per run")
      ->default_val(10'000);
  fuzz_cmd->add_flag("--instrument", fuzz_opts.instrument,
                     "also run each program with consistency checking");
  fuzz_cmd->add_flag("--instrument-stack", fuzz_opts.instrument_stack,
                     "also run each program with stack consistency checking");
  fuzz_cmd->add_option("--repro-dir", fuzz_opts.repro_dir,
                       "directory for reproduction files")
      ->default_val("fuzz-repros");
  fuzz_cmd->add_option("--threads", fuzz_opts.threads, "worker count, 0 = auto")
      ->default_val(0);
  fuzz_cmd
      ->add_flag("--bug-skip-def-invalidate", fuzz_opts.bug_skip_def_invalidate)
      ->group("");  // test-only, hidden

  CLI11_PARSE(app, argc, argv);

  if (*run_cmd) {
    run_opts.caching = !no_cache;
    if (trace) run_opts.trace = &std::cout;
    return hb::run_file(path, run_opts, show_stats, std::cout, std::cerr);
  }

  if (!parse_seed_range(seeds, fuzz_opts.seed_begin, fuzz_opts.seed_end)) {
    std::cerr << "error: --seeds expects LO..HI\n";
    return 2;
  }
  hb::FuzzResult r = hb::fuzz(fuzz_opts);
  std::cout << "programs: " << r.total << "\n";
  std::cout << "well_typed: " << r.well_typed << "\n";
  std::cout << "well_typed_fraction: " << r.well_typed_fraction() << "\n";
  std::cout << "outcome_value: " << r.value_outcomes << "\n";
  std::cout << "outcome_blame: " << r.blame_outcomes << "\n";
  std::cout << "outcome_step_limit: " << r.step_limit_outcomes << "\n";
  std::cout << "outcome_runtime_error: " << r.runtime_error_outcomes << "\n";
  std::cout << "soundness_violations: " << r.soundness_violations << "\n";
  std::cout << "oracle_mismatches: " << r.oracle_mismatches << "\n";
  std::cout << "consistency_violations: " << r.consistency_violations << "\n";
  for (const auto& f : r.repro_files) std::cout << "repro: " << f << "\n";
  return r.ok() ? 0 : 1;
}
