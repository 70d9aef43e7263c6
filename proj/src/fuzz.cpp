#include "edgesim/fuzz.hpp"

#include <sstream>

#include "edgesim/assembler.hpp"
#include "edgesim/core_pipeline.hpp"

namespace edgesim {

namespace {

std::string describe_result(const BlockResult& r) {
  std::ostringstream os;
  os << "exit=" << r.exit << " fired=[";
  for (size_t i = 0; i < r.fired.size(); ++i) os << (i ? " " : "") << int(r.fired[i]);
  os << "] regwrites=[";
  for (auto [reg, v] : r.regwrites) os << " R" << int(reg) << "=" << v;
  os << " ] stores=[";
  for (auto [a, v] : r.stores) os << " [" << a << "]=" << v;
  os << " ]";
  return os.str();
}

}  // namespace

FuzzOutcome run_equivalence_fuzz(uint64_t count, uint64_t seed, const GenOptions& opt) {
  FuzzOutcome out;
  std::mt19937_64 rng(seed);

  for (uint64_t i = 0; i < count; ++i) {
    Block block = generate_block(rng, opt);
    ArchState state = generate_state(rng);
    ++out.runs;

    auto record = [&](const std::string& what) {
      ++out.mismatches;
      if (out.first_failure.empty()) {
        std::ostringstream os;
        os << "run " << i << " (seed " << seed << "): " << what << "\n"
           << disassemble(block);
        out.first_failure = os.str();
      }
    };

    BlockResult ref;
    try {
      ref = interpret_block(block, state);
    } catch (const Error& e) {
      record(std::string("reference interpreter error: ") + e.what());
      continue;
    }

    for (SchedulerKind kind : {SchedulerKind::Parallel, SchedulerKind::Incremental}) {
      const char* name = kind == SchedulerKind::Parallel ? "parallel" : "incremental";
      CoreConfig cfg;
      cfg.scheduler = kind;
      try {
        BlockRun run = run_block(block, state, cfg);
        if (!(run.result == ref))
          record(std::string(name) + " diverged\n  ref:   " + describe_result(ref) +
                 "\n  timed: " + describe_result(run.result));
      } catch (const Error& e) {
        record(std::string(name) + " error: " + e.what());
      }
    }
  }
  return out;
}

}  // namespace edgesim
