#pragma once
//
// Cycle-level core: decoupled two-wide front end, instruction window
// (scheduler + decoded instruction buffer + operand buffers), one-issue back
// end with IS-stage result forwarding, EX-stage predicate events, and an
// in-order load/store queue. Architectural results match the reference
// interpreter; the scheduler kind decides the timing.
//

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "edgesim/refinterp.hpp"
#include "edgesim/sched_core.hpp"

namespace edgesim {

struct CoreConfig {
  SchedulerKind scheduler = SchedulerKind::Parallel;
  int load_latency = 2;  // issue-to-result-event cycles for an uncontended load
  uint64_t max_cycles_per_block = 100000;
  bool collect_trace = false;
};

struct CycleStats {
  uint64_t cycles = 0;
  uint64_t blocks = 0;
  uint64_t decodes = 0;
  uint64_t issues = 0;
  uint64_t refreshes = 0;
  uint64_t bank_conflicts = 0;
  uint64_t broadcast_drain_cycles = 0;
  uint64_t events_generated = 0;
  uint64_t events_delivered = 0;

  double ipc() const { return cycles ? double(issues) / double(cycles) : 0.0; }
};

struct TraceEventRec {
  bool broadcast = false;
  int id = 0;  // iid, or channel for broadcasts
  RdyVec rdys;
};

struct TraceCycle {
  uint64_t cycle = 0;
  std::vector<int> decoded;
  std::vector<TraceEventRec> events;
  std::optional<int> issued;
  std::vector<int> ex;
  std::vector<int> ls;
  int stall_bank_conflict = 0;
  int stall_broadcast_drain = 0;
  bool stall_empty = false;
};

struct BlockRun {
  BlockResult result;
  CycleStats stats;
  std::vector<TraceCycle> trace;
  std::vector<uint64_t> issue_cycle;  // per iid, ~0 if never issued
  std::vector<std::pair<int8_t, uint64_t>> mem_access_trace;  // (lsid, cycle)
};

// One block against one entry state, scheduler freshly reset.
BlockRun run_block(const Block& block, const ArchState& state, const CoreConfig& cfg);

struct TimedRun {
  ArchState state;
  std::vector<std::string> exits;
  CycleStats stats;
  std::vector<TraceCycle> trace;
};

// Block sequence from `start`. A block branching back to itself refreshes the
// scheduler and skips fetch/decode; any other transition resets and decodes.
TimedRun run_program_timed(const Program& program, ArchState state,
                           const CoreConfig& cfg, const std::string& start,
                           uint64_t max_blocks);

std::string stats_to_json(const CycleStats& stats);
std::string trace_to_jsonl(const std::vector<TraceCycle>& trace);

}  // namespace edgesim
