#pragma once
//
// Shared vocabulary of the two dataflow schedulers: the 4-bit ready vector,
// the ready-merge function, wakeup events, and the scheduler interface the
// pipeline drives once per cycle.
//

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

namespace edgesim {

inline constexpr int kWindowEntries = 32;
inline constexpr int kBroadcastChannels = 3;  // usable channels 1..3, 0 = none
inline constexpr int kMaxTargetedEventsPerCycle = 2;

// Input slot of an instruction, as named by a target or broadcast.
enum class Slot : uint8_t { Op0 = 0, Op1 = 1, Predicate = 2 };

// Per-instruction ready vector, MSB to LSB [RT, RF, R0, R1]:
//   RT/RF  predicate-true / predicate-false ready
//   R0/R1  operand #0 / operand #1 ready
// All-ones means no input is still awaited.
class RdyVec {
 public:
  static constexpr uint8_t kRT = 0b1000;
  static constexpr uint8_t kRF = 0b0100;
  static constexpr uint8_t kR0 = 0b0010;
  static constexpr uint8_t kR1 = 0b0001;

  constexpr RdyVec() = default;
  explicit constexpr RdyVec(uint8_t bits) : bits_(bits & 0xF) {}

  constexpr uint8_t bits() const { return bits_; }
  constexpr bool all() const { return bits_ == 0xF; }
  constexpr bool any() const { return bits_ != 0; }
  constexpr bool rt() const { return bits_ & kRT; }
  constexpr bool rf() const { return bits_ & kRF; }
  constexpr bool r0() const { return bits_ & kR0; }
  constexpr bool r1() const { return bits_ & kR1; }

  constexpr RdyVec operator|(RdyVec o) const { return RdyVec(bits_ | o.bits_); }
  RdyVec& operator|=(RdyVec o) {
    bits_ |= o.bits_;
    return *this;
  }
  constexpr bool operator==(const RdyVec&) const = default;

  // One-hot event masks deliver a single input.
  constexpr bool delivers_predicate() const { return bits_ == kRT || bits_ == kRF; }
  constexpr bool delivers_operand() const { return bits_ == kR0 || bits_ == kR1; }
  constexpr bool one_hot() const { return bits_ != 0 && (bits_ & (bits_ - 1)) == 0; }

  // The event mask that satisfies slot `s`; predicates deliver RT on a true
  // result and RF on a false one.
  static constexpr RdyVec for_slot(Slot s, bool pred_value = true) {
    switch (s) {
      case Slot::Op0: return RdyVec(kR0);
      case Slot::Op1: return RdyVec(kR1);
      case Slot::Predicate: return RdyVec(pred_value ? kRT : kRF);
    }
    return RdyVec();
  }

  std::string str() const;  // "1101" style, [RT RF R0 R1]

 private:
  uint8_t bits_ = 0;
};

struct MergeResult {
  RdyVec ardys_next;
  bool ready;
};

// Ready merge: decoded state (if valid) ORed with accumulated active state
// (if valid) ORed with the incoming event mask. Ready when all four bits set.
constexpr MergeResult merge_ready(bool dv, RdyVec drdys, bool av, RdyVec ardys,
                                  RdyVec evt_rdys) {
  RdyVec next{static_cast<uint8_t>((dv ? drdys.bits() : 0) |
                                   (av ? ardys.bits() : 0) | evt_rdys.bits())};
  return {next, next.all()};
}

// Pipeline stage an event originates from. IS-forward events wake a target
// the same cycle the producer issues; EX and LS results arrive later.
enum class EventOrigin : uint8_t { IsForward, Ex, Ls };

// A targeted ready event delivers exactly one input to one instruction.
struct TargetedEvent {
  uint8_t iid = 0;
  RdyVec rdys;
  EventOrigin origin = EventOrigin::IsForward;
};

// A broadcast ready event delivers one input to every instruction listening
// on the channel. The mask is uniform across listeners: RT or RF for a
// predicate channel, the channel's operand bit for a data channel.
struct BroadcastEvent {
  uint8_t channel = 0;  // 1..3
  RdyVec rdys;
  EventOrigin origin = EventOrigin::Ex;
};

struct SchedCounters {
  uint64_t events_delivered = 0;     // targeted read-modify-writes performed
  uint64_t events_to_undecoded = 0;  // accepted before the target was decoded
  uint64_t bank_conflict_stalls = 0;
  uint64_t broadcast_drain_cycles = 0;
};

enum class SchedulerKind { Parallel, Incremental };

// Contract the pipeline drives. Per simulated cycle:
//   decode()      up to 2 instructions (front end),
//   step()        deliver this cycle's events (<=2 targeted, <=1 broadcast)
//                 plus the iid issuing this cycle, and get back the
//                 instruction selected to issue next cycle.
// step() is the per-cycle boundary; decode() calls belong to the cycle of
// the following step().
class Scheduler {
 public:
  virtual ~Scheduler() = default;

  virtual SchedulerKind kind() const = 0;

  // Full clear: decoded and active state, on branch to a new block.
  virtual void reset() = 0;
  // Branch-back-to-self: active state cleared, decoded state preserved.
  virtual void refresh() = 0;

  virtual void decode(int iid, RdyVec drdys, uint8_t dbid, Slot listen_slot) = 0;

  virtual std::optional<int> step(std::span<const TargetedEvent> events,
                                  const std::optional<BroadcastEvent>& bcast,
                                  std::optional<int> issued) = 0;

  // LSQ callback: a previously issued memory instruction is now issuable to
  // memory. Only the incremental scheduler routes these through selection.
  virtual void notify_ls_ready(int iid) { (void)iid; }
  virtual bool selects_memory_grants() const { return false; }

  // Broadcasts not yet fully delivered to their listeners. Zero for the
  // parallel scheduler (flash delivery).
  virtual size_t broadcast_backlog() const { return 0; }

  // True when no queued or deferred work remains inside the scheduler.
  virtual bool idle() const = 0;

  virtual void dump(std::ostream& os) const = 0;
  virtual const SchedCounters& counters() const = 0;
};

}  // namespace edgesim
