#include "hb/harness.hpp"

#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "hb/pretty.hpp"

namespace hb {

bool env_consistent(const TypeEnv& g, const DynEnv& e) {
  for (const auto& [name, t] : g) {
    auto it = e.find(name);
    if (it == e.end() || !subtype(stype(it->second), t)) return false;
  }
  return true;
}

bool stack_subtype(const ValType& t, const std::vector<TypeStackFrame>& ts) {
  if (ts.empty()) throw std::invalid_argument("stack_subtype: empty type stack");
  return subtype(t, ts.back().hole_type);
}

bool stack_consistent(const TypeTable& tt, const std::vector<TypeStackFrame>& ts,
                      const std::vector<Frame>& s) {
  if (ts.size() != s.size()) return false;
  for (size_t i = ts.size(); i-- > 0;) {
    const TypeStackFrame& f = ts[i];
    if (!env_consistent(f.in_env, s[i].env)) return false;
    TypeEnv with_hole = f.in_env;
    with_hole[kHoleVar] = f.hole_type;
    auto cr = try_typecheck(tt, with_hole, *context_to_expr(s[i].ctx, kHoleVar));
    if (!cr || !(cr->out_env == f.out_env) || !(cr->type == f.result_type))
      return false;
    if (i > 0 && !subtype(f.result_type, ts[i - 1].hole_type)) return false;
  }
  return true;
}

namespace {

Verdict oracle_compare_impl(const ExprPtr& program, long long max_steps,
                            bool bug_skip_def_invalidate);

}  // namespace

Verdict oracle_compare(const ExprPtr& program, long long max_steps) {
  return oracle_compare_impl(program, max_steps, false);
}

namespace {

Verdict oracle_compare_impl(const ExprPtr& program, long long max_steps,
                            bool bug_skip_def_invalidate) {
  RunOptions on;
  on.max_steps = max_steps;
  on.caching = true;
  on.bug_skip_def_invalidate = bug_skip_def_invalidate;
  Machine cached(program, on);
  Outcome cached_out = cached.run();

  RunOptions off;
  off.max_steps = max_steps;
  off.caching = false;
  Machine uncached(program, off);
  Outcome uncached_out = uncached.run();

  Verdict v;
  v.cached = cached_out;
  v.uncached = uncached_out;
  v.cached_stats = cached.stats();
  v.uncached_stats = uncached.stats();
  if (!(cached_out == uncached_out)) {
    v.kind = VerdictKind::OutcomeMismatch;
    return v;
  }
  const Config& end = cached.config();
  if (!consistent(end.cache, end.tt, end.dt)) {
    v.kind = VerdictKind::CacheInconsistent;
    return v;
  }
  v.kind = VerdictKind::Match;
  return v;
}

struct SeedFailure {
  std::uint64_t seed;
  std::string reason;
  ExprPtr program;
};

std::string capped_trace(const ExprPtr& program, const FuzzOptions& fopts) {
  std::ostringstream trace;
  RunOptions opts;
  opts.max_steps = std::min<long long>(fopts.max_steps, 2000);
  opts.trace = &trace;
  opts.instrument = fopts.instrument;
  opts.instrument_stack = fopts.instrument_stack;
  opts.bug_skip_def_invalidate = fopts.bug_skip_def_invalidate;
  try {
    run(program, opts);
  } catch (const ConsistencyViolation& cv) {
    trace << "-- " << cv.what() << "\n";
  }
  return trace.str();
}

std::string write_repro(const std::string& dir, const SeedFailure& f,
                        const FuzzOptions& fopts) {
  std::filesystem::create_directories(dir);
  std::string path = dir + "/repro_seed_" + std::to_string(f.seed) + ".txt";
  std::ofstream out(path);
  out << "seed: " << f.seed << "\n";
  out << "reason: " << f.reason << "\n";
  out << "program:\n" << pretty(f.program) << "\n";
  out << "trace:\n" << capped_trace(f.program, fopts);
  return path;
}

void count_outcome(FuzzResult& r, const Outcome& o) {
  switch (o.kind) {
    case Outcome::Kind::Value: ++r.value_outcomes; break;
    case Outcome::Kind::Blame: ++r.blame_outcomes; break;
    case Outcome::Kind::StepLimit: ++r.step_limit_outcomes; break;
    case Outcome::Kind::RuntimeError: ++r.runtime_error_outcomes; break;
  }
}

void fuzz_one(const FuzzOptions& opts, std::uint64_t seed, FuzzResult& r,
              std::vector<SeedFailure>& failures) {
  ExprPtr program = gen_program(seed, opts.size);
  ++r.total;
  bool well_typed = try_typecheck({}, {}, *program).has_value();
  if (well_typed) ++r.well_typed;

  Verdict v =
      oracle_compare_impl(program, opts.max_steps, opts.bug_skip_def_invalidate);
  count_outcome(r, v.cached);
  if (!v.match()) {
    ++r.oracle_mismatches;
    failures.push_back({seed,
                        v.kind == VerdictKind::OutcomeMismatch
                            ? "caching on/off outcome mismatch: " +
                                  to_string(v.cached) + " vs " + to_string(v.uncached)
                            : "final cache inconsistent with tables",
                        program});
  }
  if (well_typed && v.cached.kind == Outcome::Kind::RuntimeError) {
    ++r.soundness_violations;
    failures.push_back({seed, "well-typed program hit " + to_string(v.cached), program});
  }

  if (opts.instrument || opts.instrument_stack) {
    RunOptions io;
    io.max_steps = opts.max_steps;
    io.instrument = true;
    io.instrument_stack = opts.instrument_stack;
    io.bug_skip_def_invalidate = opts.bug_skip_def_invalidate;
    try {
      run(program, io);
    } catch (const ConsistencyViolation& cv) {
      ++r.consistency_violations;
      failures.push_back({seed, cv.what(), program});
    }
  }
}

}  // namespace

FuzzResult fuzz(const FuzzOptions& opts) {
  FuzzResult total;
  if (opts.seed_end < opts.seed_begin) return total;

  std::uint64_t count = opts.seed_end - opts.seed_begin + 1;
  unsigned threads = opts.threads;
  if (threads == 0) {
    threads = std::thread::hardware_concurrency();
    if (threads == 0) threads = 1;
    threads = std::min<unsigned>(threads, 8);
  }
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, count));

  std::vector<FuzzResult> shard_results(threads);
  std::vector<std::vector<SeedFailure>> shard_failures(threads);
  std::vector<std::thread> workers;
  std::uint64_t chunk = count / threads;
  std::uint64_t rem = count % threads;
  std::uint64_t begin = opts.seed_begin;
  for (unsigned t = 0; t < threads; ++t) {
    std::uint64_t n = chunk + (t < rem ? 1 : 0);
    std::uint64_t lo = begin;
    begin += n;
    workers.emplace_back([&, t, lo, n]() {
      for (std::uint64_t s = lo; s < lo + n; ++s)
        fuzz_one(opts, s, shard_results[t], shard_failures[t]);
    });
  }
  for (auto& w : workers) w.join();

  for (unsigned t = 0; t < threads; ++t) {
    const FuzzResult& r = shard_results[t];
    total.total += r.total;
    total.well_typed += r.well_typed;
    total.value_outcomes += r.value_outcomes;
    total.blame_outcomes += r.blame_outcomes;
    total.step_limit_outcomes += r.step_limit_outcomes;
    total.runtime_error_outcomes += r.runtime_error_outcomes;
    total.soundness_violations += r.soundness_violations;
    total.oracle_mismatches += r.oracle_mismatches;
    total.consistency_violations += r.consistency_violations;
    if (!opts.repro_dir.empty()) {
      for (const SeedFailure& f : shard_failures[t])
        total.repro_files.push_back(write_repro(opts.repro_dir, f, opts));
    }
  }
  return total;
}

}  // namespace hb
