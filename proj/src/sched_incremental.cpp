#include "edgesim/sched_incremental.hpp"

#include <cassert>
#include <ostream>
#include <stdexcept>
#include <string>

namespace edgesim {

void IncrementalScheduler::reset() {
  banks_ = {};
  dcrdyq_.clear();
  isrdyq_.clear();
  lsrdyq_.clear();
  for (auto& q : brq_) q.clear();
  for (auto& q : deferred_) q.clear();
  drains_.clear();
  counters_ = {};
}

void IncrementalScheduler::refresh() {
  // Active valid bits flash-clear; decoded state and the broadcast listener
  // queues are decode-time properties and survive. Issue-side queues and any
  // in-flight events or drains belong to the finished execution.
  for (auto& bank : banks_) bank.av = 0;
  dcrdyq_.clear();
  isrdyq_.clear();
  lsrdyq_.clear();
  for (auto& q : deferred_) q.clear();
  drains_.clear();
  for (int iid = 0; iid < kWindowEntries; ++iid) {
    const Bank& bank = banks_[iid & 1];
    int slot = iid >> 1;
    if ((bank.dv >> slot) & 1 && bank.drdys[slot] == 0xF) dcrdyq_.push_back(iid);
  }
}

void IncrementalScheduler::decode(int iid, RdyVec drdys, uint8_t dbid,
                                  Slot listen_slot) {
  Bank& bank = banks_[iid & 1];
  int slot = iid >> 1;
  if ((bank.dv >> slot) & 1)
    throw std::runtime_error("double decode of iid " + std::to_string(iid));
  bank.dv |= 1u << slot;
  bank.drdys[slot] = drdys.bits();
  // The decode write port sees any active state events accumulated before
  // decode; an entry whose inputs all arrived early is ready right now.
  bool av = (bank.av >> slot) & 1;
  if (merge_ready(true, drdys, av, RdyVec(bank.ardys[slot]), RdyVec()).ready)
    dcrdyq_.push_back(iid);
  if (dbid != 0) brq_[dbid].emplace_back(iid, listen_slot);
}

IncrementalScheduler::EntryView IncrementalScheduler::entry(int iid) const {
  const Bank& bank = banks_[iid & 1];
  int slot = iid >> 1;
  return {((bank.dv >> slot) & 1) != 0, RdyVec(bank.drdys[slot]),
          ((bank.av >> slot) & 1) != 0, RdyVec(bank.ardys[slot])};
}

RdyVec IncrementalScheduler::merged_view(int iid) const {
  EntryView e = entry(iid);
  return merge_ready(e.dv, e.drdys, e.av, e.ardys, RdyVec()).ardys_next;
}

std::optional<int> IncrementalScheduler::process_event(const TargetedEvent& ev) {
  Bank& bank = banks_[ev.iid & 1];
  int slot = ev.iid >> 1;
  bool dv = (bank.dv >> slot) & 1;
  bool av = (bank.av >> slot) & 1;
  counters_.events_delivered++;
  if (!dv) counters_.events_to_undecoded++;

  MergeResult m = merge_ready(dv, RdyVec(bank.drdys[slot]), av,
                              RdyVec(bank.ardys[slot]), ev.rdys);
  bool was_ready = merge_ready(dv, RdyVec(bank.drdys[slot]), av,
                               RdyVec(bank.ardys[slot]), RdyVec())
                       .ready;
  bank.ardys[slot] = m.ardys_next.bits();
  bank.av |= 1u << slot;
  if (m.ready && !was_ready) return ev.iid;
  return std::nullopt;
}

std::optional<int> IncrementalScheduler::step(std::span<const TargetedEvent> events,
                                              const std::optional<BroadcastEvent>& bcast,
                                              std::optional<int> /*issued*/) {
  assert(events.size() <= kMaxTargetedEventsPerCycle);

  bool busy[2] = {false, false};
  std::optional<int> bank_ready[2];

  auto run_event = [&](const TargetedEvent& ev) {
    int parity = ev.iid & 1;
    busy[parity] = true;
    if (auto ready = process_event(ev)) {
      assert(!bank_ready[parity]);
      bank_ready[parity] = ready;
    }
  };

  // Bank-conflict leftovers from earlier cycles go first.
  for (int p = 0; p < 2; ++p) {
    if (!deferred_[p].empty()) {
      run_event(deferred_[p].front());
      deferred_[p].pop_front();
    }
  }

  // This cycle's events; a busy bank defers the event, never drops it.
  for (const TargetedEvent& ev : events) {
    int parity = ev.iid & 1;
    if (busy[parity]) {
      deferred_[parity].push_back(ev);
      counters_.bank_conflict_stalls++;
    } else {
      run_event(ev);
    }
  }

  if (bcast && !brq_[bcast->channel].empty())
    drains_.push_back({bcast->channel, bcast->rdys, 0});

  // Iterative broadcast drain: listeners leave the queue in order, at most
  // one per bank per cycle, into whatever event slots are still idle.
  if (!drains_.empty()) {
    Drain& d = drains_.front();
    const auto& queue = brq_[d.channel];
    bool injected = false;
    for (int burst = 0; burst < 2 && d.cursor < queue.size(); ++burst) {
      auto [iid, slot] = queue[d.cursor];
      RdyVec bits = d.rdys.delivers_predicate() ? d.rdys : RdyVec::for_slot(slot);
      if (busy[iid & 1]) break;  // head of line holds until its bank frees up
      run_event({static_cast<uint8_t>(iid), bits, EventOrigin::Ex});
      ++d.cursor;
      injected = true;
    }
    if (injected) counters_.broadcast_drain_cycles++;
    if (d.cursor == queue.size()) drains_.pop_front();
  }

  // Selection: bank ready outputs first (even beats odd, the loser parks on
  // ISRDYQ), then the issue, load/store, and decoder ready queues.
  std::optional<int> selected;
  if (bank_ready[0] && bank_ready[1]) {
    selected = bank_ready[0];
    isrdyq_.push_back(*bank_ready[1]);
  } else if (bank_ready[0]) {
    selected = bank_ready[0];
  } else if (bank_ready[1]) {
    selected = bank_ready[1];
  } else if (!isrdyq_.empty()) {
    selected = isrdyq_.front();
    isrdyq_.pop_front();
  } else if (!lsrdyq_.empty()) {
    selected = lsrdyq_.front();
    lsrdyq_.pop_front();
  } else if (!dcrdyq_.empty()) {
    selected = dcrdyq_.front();
    dcrdyq_.pop_front();
  }
  return selected;
}

bool IncrementalScheduler::idle() const {
  return dcrdyq_.empty() && isrdyq_.empty() && lsrdyq_.empty() &&
         deferred_[0].empty() && deferred_[1].empty() && drains_.empty();
}

void IncrementalScheduler::dump(std::ostream& os) const {
  os << "IID DV DRDYS AV ARDYS\n";
  for (int iid = 0; iid < kWindowEntries; ++iid) {
    EntryView e = entry(iid);
    os << (iid < 10 ? "  " : " ") << iid << "  " << e.dv << "  " << e.drdys.str()
       << "  " << e.av << "  " << e.ardys.str() << '\n';
  }
  auto print_queue = [&](const char* name, const std::deque<int>& q) {
    os << name << ": [";
    for (size_t i = 0; i < q.size(); ++i) os << (i ? " " : "") << q[i];
    os << "]\n";
  };
  print_queue("DCRDYQ", dcrdyq_);
  print_queue("ISRDYQ", isrdyq_);
  print_queue("LSRDYQ", lsrdyq_);
  for (int ch = 1; ch <= kBroadcastChannels; ++ch) {
    os << "BR" << ch << "Q: [";
    for (size_t i = 0; i < brq_[ch].size(); ++i)
      os << (i ? " " : "") << brq_[ch][i].first;
    os << "]\n";
  }
}

}  // namespace edgesim
