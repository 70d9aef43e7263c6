#include "edgesim/core_pipeline.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>

#include "edgesim/sched_incremental.hpp"
#include "edgesim/sched_parallel.hpp"
#include "json.hpp"

namespace edgesim {

namespace {

using EK = ExecError::Kind;

constexpr uint64_t kNever = ~uint64_t(0);

// Event source class, in intake priority order: memory results first, then
// EX results, then same-cycle IS-forwards.
enum Cls : int { kLs = 0, kEx = 1, kIsf = 2 };

struct FutureTargeted {
  uint64_t due;
  int cls;
  uint64_t seq;
  TargetedEvent ev;
};

struct FutureBroadcast {
  uint64_t due;
  int cls;
  uint64_t seq;
  BroadcastEvent ev;
};

struct LsqEntry {
  int iid = -1;
  uint32_t addr = 0;
  uint32_t value = 0;  // store data
  bool is_store = false;
  uint64_t addr_ready = 0;
  bool notified = false;
  bool accessed = false;
};

std::unique_ptr<Scheduler> make_scheduler(SchedulerKind kind) {
  if (kind == SchedulerKind::Parallel) return std::make_unique<ParallelScheduler>();
  return std::make_unique<IncrementalScheduler>();
}

// Drives one block through the pipeline. The scheduler and the decoded
// window persist across executions so a self-branch can refresh instead of
// re-decoding.
class BlockEngine {
 public:
  explicit BlockEngine(const CoreConfig& cfg)
      : cfg_(cfg), sched_(make_scheduler(cfg.scheduler)) {}

  void load(const Block& block) {
    block_ = &block;
    sched_->reset();
    decoded_upto_ = 0;
    total_memory_ = 0;
    for (const auto& insn : block.instructions)
      if (is_memory(insn.opcode)) ++total_memory_;
  }

  void rearm() {
    assert(block_);
    sched_->refresh();
  }

  BlockRun run(const ArchState& entry);

 private:
  const CoreConfig cfg_;
  std::unique_ptr<Scheduler> sched_;
  const Block* block_ = nullptr;
  int decoded_upto_ = 0;
  int total_memory_ = 0;
};

BlockRun BlockEngine::run(const ArchState& entry) {
  const auto& insns = block_->instructions;
  const int n = static_cast<int>(insns.size());

  BlockRun out;
  out.issue_cycle.assign(n, kNever);

  // per-execution state
  std::vector<std::optional<uint32_t>> op0(n), op1(n);
  std::vector<bool> fired(n, false);
  std::vector<uint32_t> result(n, 0);
  std::array<std::optional<uint32_t>, kBroadcastChannels + 1> channel_value{};
  std::array<std::optional<RdyVec>, kBroadcastChannels + 1> channel_closed{};
  std::deque<std::pair<uint8_t, RdyVec>> open_broadcasts;

  std::vector<FutureTargeted> future_tgt;
  std::vector<FutureBroadcast> future_bc;
  std::deque<TargetedEvent> ready_tgt;
  std::deque<BroadcastEvent> ready_bc;
  uint64_t seq = 0;

  std::vector<LsqEntry> lsq(total_memory_);
  int next_access = 0;

  std::map<uint8_t, uint32_t> regwrites;
  std::vector<std::pair<uint32_t, uint32_t>> stores;
  bool bro_fired = false;
  std::string exit;

  std::optional<int> pending_issue;  // dataflow issue executing this cycle
  std::optional<int> pending_grant;  // memory access grant executing this cycle
  std::optional<int> prev_issue;     // EX-stage occupant

  const SchedCounters base_counters = sched_->counters();
  CycleStats& stats = out.stats;

  auto schedule_targeted = [&](uint64_t due, int cls, TargetedEvent ev) {
    future_tgt.push_back({due, cls, seq++, ev});
    stats.events_generated++;
  };
  auto schedule_broadcast = [&](uint64_t due, int cls, BroadcastEvent ev) {
    future_bc.push_back({due, cls, seq++, ev});
  };

  auto deliver_operand = [&](int iid, Slot slot, uint32_t value) {
    auto& buf = slot == Slot::Op0 ? op0[iid] : op1[iid];
    if (buf) throw ExecError(EK::DoubleDelivery, "operand buffer written twice");
    buf = value;
  };

  auto operand = [&](int iid, Slot slot) -> uint32_t {
    const Instruction& insn = insns[iid];
    if (insn.binput.channel != 0 && insn.binput.slot == slot) {
      assert(channel_value[insn.binput.channel]);
      return *channel_value[insn.binput.channel];
    }
    const auto& buf = slot == Slot::Op0 ? op0[iid] : op1[iid];
    assert(buf);
    return *buf;
  };

  auto mem_read = [&](uint32_t addr) -> uint32_t {
    for (auto it = stores.rbegin(); it != stores.rend(); ++it)
      if (it->first == addr) return it->second;
    auto it = entry.mem.find(addr);
    return it == entry.mem.end() ? 0 : it->second;
  };

  // Value delivery for a value-producing instruction: operand buffers and
  // commit-time register writes now, ready events per the given origin.
  auto emit_value = [&](int iid, uint32_t value, uint64_t due, int cls,
                        EventOrigin origin) {
    const Instruction& insn = insns[iid];
    for (const Target& t : insn.targets) {
      switch (t.kind) {
        case TargetKind::None:
          break;
        case TargetKind::Reg: {
          auto [it, inserted] = regwrites.emplace(t.index, value);
          if (!inserted)
            throw ExecError(EK::DoubleDelivery,
                            "register " + std::to_string(t.index) + " written twice");
          break;
        }
        case TargetKind::Op0:
        case TargetKind::Op1: {
          Slot s = t.kind == TargetKind::Op0 ? Slot::Op0 : Slot::Op1;
          deliver_operand(t.index, s, value);
          schedule_targeted(due, cls, {t.index, RdyVec::for_slot(s), origin});
          break;
        }
        case TargetKind::PredTrue:
        case TargetKind::PredFalse:
          assert(false && "value op with predicate target");
          break;
      }
    }
    if (insn.bid != 0) {
      channel_value[insn.bid] = value;
      // data channels feed one slot, uniform across listeners
      Slot s = Slot::Op0;
      for (const auto& l : insns)
        if (l.binput.channel == insn.bid) s = l.binput.slot;
      schedule_broadcast(due, cls, {insn.bid, RdyVec::for_slot(s), origin});
    }
  };

  auto emit_predicate = [&](int iid, bool value, uint64_t due) {
    const Instruction& insn = insns[iid];
    RdyVec bits = RdyVec::for_slot(Slot::Predicate, value);
    for (const Target& t : insn.targets) {
      if (t.kind == TargetKind::None) continue;
      assert(t.kind == TargetKind::PredTrue || t.kind == TargetKind::PredFalse);
      schedule_targeted(due, kEx, {t.index, bits, EventOrigin::Ex});
    }
    if (insn.bid != 0) schedule_broadcast(due, kEx, {insn.bid, bits, EventOrigin::Ex});
  };

  for (uint64_t t = 0;; ++t) {
    if (t >= cfg_.max_cycles_per_block)
      throw ExecError(EK::CycleLimitExceeded,
                      "cycle limit in block '" + block_->name + "'");

    TraceCycle tc;
    tc.cycle = t;
    const SchedCounters cycle_base = sched_->counters();

    // -- front end: decode up to two instructions in iid order
    for (int w = 0; w < 2 && decoded_upto_ < n; ++w) {
      int iid = decoded_upto_++;
      const Instruction& insn = insns[iid];
      DecodedReady dr = decoded_ready_state(insn);
      sched_->decode(iid, dr.drdys, dr.dbid, insn.binput.slot);
      stats.decodes++;
      tc.decoded.push_back(iid);
      // A listener decoded after its channel already delivered needs the
      // event replayed; the scheduler can no longer wake it itself.
      if (insn.binput.channel != 0 && channel_closed[insn.binput.channel]) {
        RdyVec bits = *channel_closed[insn.binput.channel];
        if (!bits.delivers_predicate()) bits = RdyVec::for_slot(insn.binput.slot);
        schedule_targeted(t, kIsf, {static_cast<uint8_t>(iid), bits,
                                    EventOrigin::IsForward});
      }
    }

    // -- execute whatever issues this cycle
    if (pending_grant) {
      int iid = *pending_grant;
      LsqEntry& e = lsq[insns[iid].lsid];
      assert(!e.accessed && insns[iid].lsid == next_access);
      e.accessed = true;
      ++next_access;
      out.mem_access_trace.emplace_back(insns[iid].lsid, t);
      tc.ls.push_back(iid);
      if (e.addr % 4)
        throw ExecError(EK::UnalignedAddress, "unaligned access in block '" +
                                                  block_->name + "'");
      if (e.is_store) {
        stores.emplace_back(e.addr, e.value);
      } else {
        uint32_t v = mem_read(e.addr);
        result[iid] = v;
        emit_value(iid, v, t + cfg_.load_latency - 1, kLs, EventOrigin::Ls);
      }
    } else if (pending_issue) {
      int iid = *pending_issue;
      const Instruction& insn = insns[iid];
      assert(iid < decoded_upto_);
      if (fired[iid])
        throw Error("internal: iid " + std::to_string(iid) + " issued twice");
      fired[iid] = true;
      out.issue_cycle[iid] = t;
      stats.issues++;
      tc.issued = iid;

      uint32_t a = operand_count(insn.opcode) >= 1 ? operand(iid, Slot::Op0) : 0;
      uint32_t b = operand_count(insn.opcode) >= 2 ? operand(iid, Slot::Op1) : 0;
      int32_t imm = insn.imm;

      switch (insn.opcode) {
        case Opcode::Nop:
          break;
        case Opcode::Read:
          result[iid] = entry.regs[insn.reg];
          emit_value(iid, result[iid], t, kIsf, EventOrigin::IsForward);
          break;
        case Opcode::Mov:
          result[iid] = a;
          emit_value(iid, a, t, kIsf, EventOrigin::IsForward);
          break;
        case Opcode::Add:
        case Opcode::Sub:
        case Opcode::And:
        case Opcode::Or:
        case Opcode::Xor: {
          uint32_t v = insn.opcode == Opcode::Add   ? a + b
                       : insn.opcode == Opcode::Sub ? a - b
                       : insn.opcode == Opcode::And ? (a & b)
                       : insn.opcode == Opcode::Or  ? (a | b)
                                                    : (a ^ b);
          result[iid] = v;
          emit_value(iid, v, t, kIsf, EventOrigin::IsForward);
          break;
        }
        case Opcode::Addi:
          result[iid] = a + static_cast<uint32_t>(imm);
          emit_value(iid, result[iid], t, kIsf, EventOrigin::IsForward);
          break;
        case Opcode::Tlei:
          emit_predicate(iid, static_cast<int32_t>(a) <= imm, t + 1);
          break;
        case Opcode::Tlt:
          emit_predicate(iid, static_cast<int32_t>(a) < static_cast<int32_t>(b), t + 1);
          break;
        case Opcode::Teq:
          emit_predicate(iid, a == b, t + 1);
          break;
        case Opcode::Bro:
          if (bro_fired)
            throw ExecError(EK::DoubleFire,
                            "two branches fired in block '" + block_->name + "'");
          bro_fired = true;
          exit = block_->exits[insn.exit_index];
          break;
        case Opcode::Ld:
        case Opcode::St: {
          LsqEntry& e = lsq[insn.lsid];
          e.iid = iid;
          e.is_store = insn.opcode == Opcode::St;
          e.addr = a + static_cast<uint32_t>(imm);
          e.value = b;
          e.addr_ready = t + 1;
          break;
        }
      }
    }

    // -- LSQ: memory goes to the data port strictly in lsid order
    if (next_access < total_memory_) {
      LsqEntry& head = lsq[next_access];
      if (head.iid >= 0 && !head.accessed && head.addr_ready <= t) {
        if (sched_->selects_memory_grants()) {
          if (!head.notified) {
            head.notified = true;
            sched_->notify_ls_ready(head.iid);
          }
        } else {
          head.accessed = true;
          ++next_access;
          out.mem_access_trace.emplace_back(insns[head.iid].lsid, t);
          tc.ls.push_back(head.iid);
          if (head.addr % 4)
            throw ExecError(EK::UnalignedAddress, "unaligned access in block '" +
                                                      block_->name + "'");
          if (head.is_store) {
            stores.emplace_back(head.addr, head.value);
          } else {
            uint32_t v = mem_read(head.addr);
            result[head.iid] = v;
            emit_value(head.iid, v, t + cfg_.load_latency - 1, kLs, EventOrigin::Ls);
          }
        }
      }
    }

    // -- gather events due this cycle, leftovers first, then LS > EX > ISF
    auto move_due = [&](auto& future, auto& ready) {
      std::stable_sort(future.begin(), future.end(), [](const auto& x, const auto& y) {
        return std::tie(x.cls, x.seq) < std::tie(y.cls, y.seq);
      });
      for (auto it = future.begin(); it != future.end();) {
        if (it->due <= t) {
          ready.push_back(it->ev);
          it = future.erase(it);
        } else {
          ++it;
        }
      }
    };
    move_due(future_tgt, ready_tgt);
    move_due(future_bc, ready_bc);

    std::vector<TargetedEvent> cycle_events;
    if (!ready_tgt.empty()) {
      cycle_events.push_back(ready_tgt.front());
      ready_tgt.pop_front();
      // predicate and operand deliveries never share a cycle
      if (!ready_tgt.empty() &&
          ready_tgt.front().rdys.delivers_predicate() ==
              cycle_events[0].rdys.delivers_predicate()) {
        cycle_events.push_back(ready_tgt.front());
        ready_tgt.pop_front();
      }
    }
    std::optional<BroadcastEvent> cycle_bcast;
    if (!ready_bc.empty()) {
      cycle_bcast = ready_bc.front();
      ready_bc.pop_front();
      open_broadcasts.emplace_back(cycle_bcast->channel, cycle_bcast->rdys);
    }

    for (const auto& ev : cycle_events)
      tc.events.push_back({false, ev.iid, ev.rdys});
    if (cycle_bcast) tc.events.push_back({true, cycle_bcast->channel, cycle_bcast->rdys});

    // -- scheduler step: deliver and select
    std::optional<int> selected = sched_->step(cycle_events, cycle_bcast, pending_issue);

    // broadcasts fully delivered by now close their channel; listeners that
    // decode later get the event replayed
    while (open_broadcasts.size() > sched_->broadcast_backlog()) {
      auto [ch, bits] = open_broadcasts.front();
      open_broadcasts.pop_front();
      channel_closed[ch] = bits;
    }

    // trace stall attribution from this cycle's scheduler counter movement
    const SchedCounters now = sched_->counters();
    tc.stall_bank_conflict =
        static_cast<int>(now.bank_conflict_stalls - cycle_base.bank_conflict_stalls);
    tc.stall_broadcast_drain = static_cast<int>(now.broadcast_drain_cycles -
                                                cycle_base.broadcast_drain_cycles);
    tc.ex = prev_issue ? std::vector<int>{*prev_issue} : std::vector<int>{};

    // -- rotate: classify next cycle's selection
    prev_issue = pending_issue;
    pending_issue.reset();
    pending_grant.reset();
    if (selected) {
      if (fired[*selected] && is_memory(insns[*selected].opcode))
        pending_grant = selected;
      else
        pending_issue = selected;
    }

    bool quiescent = decoded_upto_ == n && !selected && ready_tgt.empty() &&
                     ready_bc.empty() && future_tgt.empty() && future_bc.empty() &&
                     sched_->idle() && open_broadcasts.empty();
    bool lsq_waiting = next_access < total_memory_;
    bool lsq_can_progress =
        lsq_waiting && lsq[next_access].iid >= 0 && !lsq[next_access].accessed;

    tc.stall_empty = !tc.issued && !quiescent;
    if (cfg_.collect_trace) out.trace.push_back(tc);

    if (quiescent && !lsq_can_progress) {
      stats.cycles = t + 1;
      if (!bro_fired || lsq_waiting) {
        std::string unissued;
        for (int i = 0; i < n; ++i)
          if (!fired[i]) unissued += " " + std::to_string(i);
        throw ExecError(EK::CycleLimitExceeded, "deadlocked block '" + block_->name +
                                                    "' (unissued:" + unissued + ")");
      }
      break;
    }
  }

  const SchedCounters end_counters = sched_->counters();
  stats.bank_conflicts =
      end_counters.bank_conflict_stalls - base_counters.bank_conflict_stalls;
  stats.broadcast_drain_cycles =
      end_counters.broadcast_drain_cycles - base_counters.broadcast_drain_cycles;
  stats.events_delivered =
      end_counters.events_delivered - base_counters.events_delivered;
  stats.blocks = 1;

  out.result.exit = exit;
  out.result.stores = std::move(stores);
  for (auto [r, v] : regwrites) out.result.regwrites.emplace_back(r, v);
  for (int i = 0; i < n; ++i)
    if (fired[i]) out.result.fired.push_back(static_cast<uint8_t>(i));
  return out;
}

}  // namespace

BlockRun run_block(const Block& block, const ArchState& state, const CoreConfig& cfg) {
  BlockEngine engine(cfg);
  engine.load(block);
  return engine.run(state);
}

TimedRun run_program_timed(const Program& program, ArchState state,
                           const CoreConfig& cfg, const std::string& start,
                           uint64_t max_blocks) {
  TimedRun out;
  if (max_blocks == 0) {
    out.state = std::move(state);
    return out;
  }
  const Block* current = program.find(start);
  if (!current)
    throw ExecError(EK::UnknownLabel, "unknown start label '" + start + "'");

  BlockEngine engine(cfg);
  const Block* loaded = nullptr;

  for (uint64_t executed = 0;; ++executed) {
    if (executed == max_blocks)
      throw ExecError(EK::BlockLimitExceeded,
                      "block limit " + std::to_string(max_blocks) + " reached");
    if (loaded == current) {
      engine.rearm();
      out.stats.refreshes++;
    } else {
      engine.load(*current);
      loaded = current;
    }
    BlockRun r = engine.run(state);
    out.stats.cycles += r.stats.cycles;
    out.stats.blocks += 1;
    out.stats.decodes += r.stats.decodes;
    out.stats.issues += r.stats.issues;
    out.stats.bank_conflicts += r.stats.bank_conflicts;
    out.stats.broadcast_drain_cycles += r.stats.broadcast_drain_cycles;
    out.stats.events_generated += r.stats.events_generated;
    out.stats.events_delivered += r.stats.events_delivered;
    if (cfg.collect_trace)
      out.trace.insert(out.trace.end(), r.trace.begin(), r.trace.end());

    commit(r.result, state);
    out.exits.push_back(r.result.exit);
    if (r.result.exit == kHaltLabel) break;
    current = program.find(r.result.exit);
    if (!current)
      throw ExecError(EK::UnknownLabel, "unknown label '" + r.result.exit + "'");
  }
  out.state = std::move(state);
  return out;
}

// ---------------------------------------------------------------------------
// JSON rendering

std::string stats_to_json(const CycleStats& stats) {
  nlohmann::ordered_json j;
  j["cycles"] = stats.cycles;
  j["blocks"] = stats.blocks;
  j["decodes"] = stats.decodes;
  j["issues"] = stats.issues;
  j["refreshes"] = stats.refreshes;
  j["bank_conflicts"] = stats.bank_conflicts;
  j["broadcast_drain_cycles"] = stats.broadcast_drain_cycles;
  j["ipc"] = stats.ipc();
  return j.dump(2);
}

std::string trace_to_jsonl(const std::vector<TraceCycle>& trace) {
  std::string out;
  for (const auto& tc : trace) {
    nlohmann::ordered_json j;
    j["cycle"] = tc.cycle;
    j["decoded"] = tc.decoded;
    auto events = nlohmann::ordered_json::array();
    for (const auto& ev : tc.events) {
      nlohmann::ordered_json e;
      if (ev.broadcast)
        e["channel"] = ev.id;
      else
        e["iid"] = ev.id;
      e["rdys"] = ev.rdys.str();
      events.push_back(e);
    }
    j["events"] = events;
    if (tc.issued)
      j["issued"] = *tc.issued;
    else
      j["issued"] = nullptr;
    j["ex"] = tc.ex;
    j["ls"] = tc.ls;
    j["stalls"] = {{"bank_conflict", tc.stall_bank_conflict},
                   {"broadcast_drain", tc.stall_broadcast_drain},
                   {"empty", tc.stall_empty ? 1 : 0}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace edgesim
