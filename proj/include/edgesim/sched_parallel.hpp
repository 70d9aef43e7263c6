#pragma once
//
// Brute-force parallel scheduler: 12 bits of ready state per window entry in
// flip-flop style registers, every entry reevaluated every cycle, lowest
// ready iid selected through two 16-entry bank encoders and a comparator.
//

#include <array>
#include <cstdint>
#include <optional>

#include "edgesim/sched_core.hpp"

namespace edgesim {

class ParallelScheduler final : public Scheduler {
 public:
  struct Entry {
    // decoded ready state, cleared by reset only
    uint8_t dbid = 0;
    bool drt = false, drf = false, dr0 = false, dr1 = false;
    bool decoded = false;
    // active ready state, cleared by reset or refresh
    bool rt = false, rf = false, r0 = false, r1 = false;
    bool inh = false, rdy = false;
  };

  SchedulerKind kind() const override { return SchedulerKind::Parallel; }

  void reset() override;
  void refresh() override;
  void decode(int iid, RdyVec drdys, uint8_t dbid, Slot listen_slot) override;

  std::optional<int> step(std::span<const TargetedEvent> events,
                          const std::optional<BroadcastEvent>& bcast,
                          std::optional<int> issued) override;

  bool idle() const override;
  void dump(std::ostream& os) const override;
  const SchedCounters& counters() const override { return counters_; }

  const Entry& entry(int iid) const { return entries_[iid]; }
  uint32_t rdy_mask() const;

  // Lowest set bit via per-parity 16-entry encoders plus a comparator on the
  // two bank results.
  static std::optional<int> select_lowest(uint32_t rdy);

 private:
  std::array<Entry, kWindowEntries> entries_{};
  SchedCounters counters_;
};

}  // namespace edgesim
