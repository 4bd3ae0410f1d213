#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hb/machine.hpp"
#include "hb/typecheck.hpp"

namespace hb {

// The pieces of a typing judgment pushed alongside a dynamic frame:
// input environment, expected hole type, output environment and result
// type of the calling context checked as an expression.
struct TypeStackFrame {
  TypeEnv in_env;
  ValType hole_type;
  TypeEnv out_env;
  ValType result_type;
};

// dom(g) within dom(e), and stype(e(x)) <= g(x) for every tracked x.
bool env_consistent(const TypeEnv& g, const DynEnv& e);

// t <= the hole type of the most recent frame. Throws std::invalid_argument
// on an empty type stack.
bool stack_subtype(const ValType& t, const std::vector<TypeStackFrame>& ts);

// Type stack against dynamic stack, most recent frames at the back:
// pairwise environment consistency, each context re-checks to its recorded
// judgment with the hole bound as a variable, and each frame's result type
// stack-subtypes the rest.
bool stack_consistent(const TypeTable& tt, const std::vector<TypeStackFrame>& ts,
                      const std::vector<Frame>& s);

// Deterministic random program over <=3 classes, methods and variables.
// Biased so a healthy fraction passes the top-level check while the rest
// exercise calls, blame and cache traffic.
ExprPtr gen_program(std::uint64_t seed, int size);

enum class VerdictKind { Match, OutcomeMismatch, CacheInconsistent };

struct Verdict {
  VerdictKind kind;
  Outcome cached;
  Outcome uncached;
  Stats cached_stats;
  Stats uncached_stats;

  bool match() const { return kind == VerdictKind::Match; }
};

// Runs the program with caching on and off and compares outcomes (stats
// excluded). On a match the cached machine's final cache must still be
// consistent with its tables.
Verdict oracle_compare(const ExprPtr& program, long long max_steps);

struct FuzzOptions {
  std::uint64_t seed_begin = 1;
  std::uint64_t seed_end = 0;  // inclusive; empty range when end < begin
  int size = 30;
  long long max_steps = 10'000;
  bool instrument = false;
  bool instrument_stack = false;
  std::string repro_dir;  // reproduction files land here when non-empty
  unsigned threads = 0;   // 0 = pick from hardware
  // Test-only fault injection, forwarded to the machines under test.
  bool bug_skip_def_invalidate = false;
};

struct FuzzResult {
  std::uint64_t total = 0;
  std::uint64_t well_typed = 0;
  std::uint64_t value_outcomes = 0;
  std::uint64_t blame_outcomes = 0;
  std::uint64_t step_limit_outcomes = 0;
  std::uint64_t runtime_error_outcomes = 0;
  std::uint64_t soundness_violations = 0;
  std::uint64_t oracle_mismatches = 0;
  std::uint64_t consistency_violations = 0;
  std::vector<std::string> repro_files;

  std::uint64_t violations() const {
    return soundness_violations + oracle_mismatches + consistency_violations;
  }
  bool ok() const { return violations() == 0; }
  double well_typed_fraction() const {
    return total == 0 ? 0.0 : static_cast<double>(well_typed) / static_cast<double>(total);
  }
};

// The soundness / transparency / preservation suites over a seed range.
// Shards across threads; results are merged counts, deterministic per seed.
FuzzResult fuzz(const FuzzOptions& opts);

}  // namespace hb
