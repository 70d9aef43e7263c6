#include "edgesim/sched_parallel.hpp"

#include <bit>
#include <cassert>
#include <ostream>

namespace edgesim {

void ParallelScheduler::reset() {
  entries_.fill(Entry{});
  counters_ = {};
}

void ParallelScheduler::refresh() {
  for (auto& e : entries_) {
    e.rt = e.rf = e.r0 = e.r1 = false;
    e.inh = e.rdy = false;
  }
}

void ParallelScheduler::decode(int iid, RdyVec drdys, uint8_t dbid, Slot) {
  Entry& e = entries_[iid];
  assert(!e.decoded);
  e.decoded = true;
  e.dbid = dbid;
  e.drt = drdys.rt();
  e.drf = drdys.rf();
  e.dr0 = drdys.r0();
  e.dr1 = drdys.r1();
}

std::optional<int> ParallelScheduler::step(std::span<const TargetedEvent> events,
                                           const std::optional<BroadcastEvent>& bcast,
                                           std::optional<int> issued) {
  assert(events.size() <= kMaxTargetedEventsPerCycle);

  // Reconstruct the hardware event ports: {input# bit; iid}, where the high
  // side carries RT/R1 deliveries and the low side RF/R0, plus the shared
  // input-type enables. Predicate and operand events never share a cycle.
  struct Port {
    bool valid = false;
    int iid = 0;
    bool hi = false;
  };
  Port port[2];
  bool rt_en = false, rf_en = false, r0_en = false, r1_en = false;
  for (size_t k = 0; k < events.size(); ++k) {
    const TargetedEvent& ev = events[k];
    assert(ev.rdys.one_hot());
    port[k] = {true, ev.iid, ev.rdys.rt() || ev.rdys.r1()};
    rt_en |= ev.rdys.rt();
    rf_en |= ev.rdys.rf();
    r0_en |= ev.rdys.r0();
    r1_en |= ev.rdys.r1();
    counters_.events_delivered++;
    if (!entries_[ev.iid].decoded) counters_.events_to_undecoded++;
  }
  assert(!((rt_en || rf_en) && (r0_en || r1_en)));

  const bool bc_valid = bcast && bcast->channel != 0;

  for (int i = 0; i < kWindowEntries; ++i) {
    Entry& e = entries_[i];
    const bool t00 = port[0].valid && port[0].iid == i && !port[0].hi;
    const bool t01 = port[0].valid && port[0].iid == i && port[0].hi;
    const bool t10 = port[1].valid && port[1].iid == i && !port[1].hi;
    const bool t11 = port[1].valid && port[1].iid == i && port[1].hi;
    // BID 00 is "no channel": a zero-channel broadcast matches nothing.
    const bool b = bc_valid && e.dbid == bcast->channel;

    e.rt = e.rt || e.drt || (rt_en && (t01 || t11)) || (b && bcast->rdys.rt());
    e.rf = e.rf || e.drf || (rf_en && (t00 || t10)) || (b && bcast->rdys.rf());
    e.r0 = e.r0 || e.dr0 || (r0_en && (t00 || t10)) || (b && bcast->rdys.r0());
    e.r1 = e.r1 || e.dr1 || (r1_en && (t01 || t11)) || (b && bcast->rdys.r1());
    e.inh = e.inh || (issued && *issued == i);
    e.rdy = e.rt && e.rf && e.r0 && e.r1 && !e.inh;
  }

  return select_lowest(rdy_mask());
}

uint32_t ParallelScheduler::rdy_mask() const {
  uint32_t mask = 0;
  for (int i = 0; i < kWindowEntries; ++i)
    if (entries_[i].rdy) mask |= 1u << i;
  return mask;
}

bool ParallelScheduler::idle() const { return rdy_mask() == 0; }

std::optional<int> ParallelScheduler::select_lowest(uint32_t rdy) {
  // Even/odd 16-entry banks, one encoder each, comparator picks the smaller
  // global iid.
  uint16_t even = 0, odd = 0;
  for (int k = 0; k < 16; ++k) {
    if (rdy & (1u << (2 * k))) even |= 1u << k;
    if (rdy & (1u << (2 * k + 1))) odd |= 1u << k;
  }
  std::optional<int> even_iid, odd_iid;
  if (even) even_iid = 2 * std::countr_zero(even);
  if (odd) odd_iid = 2 * std::countr_zero(odd) + 1;
  if (even_iid && odd_iid) return std::min(*even_iid, *odd_iid);
  if (even_iid) return even_iid;
  return odd_iid;
}

void ParallelScheduler::dump(std::ostream& os) const {
  os << "IID DBID DRT DRF DR0 DR1 | RT RF R0 R1 INH RDY\n";
  for (int i = 0; i < kWindowEntries; ++i) {
    const Entry& e = entries_[i];
    os << (i < 10 ? "  " : " ") << i << "   " << (e.dbid >> 1) << (e.dbid & 1) << "   "
       << e.drt << "   " << e.drf << "   " << e.dr0 << "   " << e.dr1 << " |  " << e.rt
       << "  " << e.rf << "  " << e.r0 << "  " << e.r1 << "   " << e.inh << "   "
       << e.rdy << '\n';
  }
}

}  // namespace edgesim
