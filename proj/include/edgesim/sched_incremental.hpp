#pragma once
//
// Incremental scheduler: decoded/active ready state in even and odd 16-entry
// banks with valid bits, one event read-modify-write per bank per cycle,
// ready queues fed by the decoder, the issue stage, and the LSQ, and
// iterative broadcast drain through per-channel listener queues.
//

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "edgesim/sched_core.hpp"

namespace edgesim {

class IncrementalScheduler final : public Scheduler {
 public:
  struct EntryView {
    bool dv = false;  // decoded valid
    RdyVec drdys;
    bool av = false;  // active valid
    RdyVec ardys;
  };

  SchedulerKind kind() const override { return SchedulerKind::Incremental; }

  void reset() override;
  void refresh() override;
  void decode(int iid, RdyVec drdys, uint8_t dbid, Slot listen_slot) override;

  std::optional<int> step(std::span<const TargetedEvent> events,
                          const std::optional<BroadcastEvent>& bcast,
                          std::optional<int> issued) override;

  void notify_ls_ready(int iid) override { lsrdyq_.push_back(iid); }
  bool selects_memory_grants() const override { return true; }
  size_t broadcast_backlog() const override { return drains_.size(); }

  bool idle() const override;
  void dump(std::ostream& os) const override;
  const SchedCounters& counters() const override { return counters_; }

  EntryView entry(int iid) const;
  // Current merged ready view of an entry, as the ready logic would read it.
  RdyVec merged_view(int iid) const;

  const std::deque<int>& dcrdyq() const { return dcrdyq_; }
  const std::deque<int>& isrdyq() const { return isrdyq_; }
  const std::deque<int>& lsrdyq() const { return lsrdyq_; }
  const std::vector<std::pair<int, Slot>>& brq(int channel) const {
    return brq_[channel];
  }
  bool draining() const { return !drains_.empty(); }

 private:
  struct Bank {
    std::array<uint8_t, 16> drdys{};
    std::array<uint8_t, 16> ardys{};
    uint16_t dv = 0;
    uint16_t av = 0;
  };

  // In-flight broadcast: walks the channel's listener queue, converting at
  // most one listener per bank per cycle into a targeted event.
  struct Drain {
    uint8_t channel;
    RdyVec rdys;  // uniform delivered bit (RT/RF for predicates, R0/R1 data)
    size_t cursor = 0;
  };

  // Returns the iid if this event completed the entry's ready state.
  std::optional<int> process_event(const TargetedEvent& ev);

  std::array<Bank, 2> banks_;  // [parity]
  std::deque<int> dcrdyq_, isrdyq_, lsrdyq_;
  std::array<std::vector<std::pair<int, Slot>>, kBroadcastChannels + 1> brq_;
  std::array<std::deque<TargetedEvent>, 2> deferred_;  // bank-conflict overflow
  std::deque<Drain> drains_;
  SchedCounters counters_;
};

}  // namespace edgesim
