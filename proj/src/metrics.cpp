#include "edgesim/metrics.hpp"

#include <sstream>

#include "json.hpp"

namespace edgesim {

HardwareCost cost_report(SchedulerKind kind, int entries, int events_per_cycle) {
  const bool parallel = kind == SchedulerKind::Parallel;
  if (entries == 32 && events_per_cycle == 2) {
    if (parallel) return {kind, 32, 2, 288, 340, 5.0, 2.9, 340 * 5.0};
    return {kind, 32, 2, 78, 150, 4.3, 2.5, 150 * 4.3};
  }
  if (entries == 32 && events_per_cycle == 4)
    return {kind, 32, 4, parallel ? 288 : 156, std::nullopt, std::nullopt,
            std::nullopt, std::nullopt};
  if (entries == 64 && events_per_cycle == 2)
    return {kind, 64, 2, parallel ? 576 : 130, std::nullopt, std::nullopt,
            std::nullopt, std::nullopt};
  throw MetricsError("no cost figures for " + std::to_string(entries) + " entries / " +
                     std::to_string(events_per_cycle) + " events per cycle");
}

namespace {

const char* kind_name(SchedulerKind k) {
  return k == SchedulerKind::Parallel ? "parallel" : "incremental";
}

}  // namespace

std::string cost_to_text(const HardwareCost& c) {
  std::ostringstream os;
  os << kind_name(c.kind) << " scheduler, " << c.window_entries << " entries, "
     << c.events_per_cycle << " events/cycle\n";
  os << "  area (core):    " << c.area_core_luts << " LUTs\n";
  if (c.area_total_luts) os << "  area (total):   " << *c.area_total_luts << " LUTs\n";
  if (c.period_ns) os << "  period:         " << *c.period_ns << " ns\n";
  if (c.period_pipelined_ns)
    os << "  period (piped): " << *c.period_pipelined_ns << " ns\n";
  if (c.area_period_product)
    os << "  area*period:    " << *c.area_period_product << " LUT*ns\n";
  return os.str();
}

std::string cost_to_json(const HardwareCost& c) {
  nlohmann::ordered_json j;
  j["scheduler"] = kind_name(c.kind);
  j["window_entries"] = c.window_entries;
  j["events_per_cycle"] = c.events_per_cycle;
  j["area_core_luts"] = c.area_core_luts;
  if (c.area_total_luts) j["area_total_luts"] = *c.area_total_luts;
  if (c.period_ns) j["period_ns"] = *c.period_ns;
  if (c.period_pipelined_ns) j["period_pipelined_ns"] = *c.period_pipelined_ns;
  if (c.area_period_product) j["area_period_product"] = *c.area_period_product;
  return j.dump(2);
}

std::string cost_table_text() {
  HardwareCost p = cost_report(SchedulerKind::Parallel, 32, 2);
  HardwareCost i = cost_report(SchedulerKind::Incremental, 32, 2);
  HardwareCost p4 = cost_report(SchedulerKind::Parallel, 32, 4);
  HardwareCost i4 = cost_report(SchedulerKind::Incremental, 32, 4);
  HardwareCost p64 = cost_report(SchedulerKind::Parallel, 64, 2);
  HardwareCost i64 = cost_report(SchedulerKind::Incremental, 64, 2);
  std::ostringstream os;
  os << "metric                 parallel  incremental  units\n";
  os << "area, 32 entries       " << p.area_core_luts << "       " << i.area_core_luts
     << "           LUTs\n";
  os << "area, total            " << *p.area_total_luts << "       "
     << *i.area_total_luts << "          LUTs\n";
  os << "period                 " << *p.period_ns << "       " << *i.period_ns
     << "          ns\n";
  os << "period, pipelined      " << *p.period_pipelined_ns << "       "
     << *i.period_pipelined_ns << "          ns\n";
  os << "area, total * period   " << *p.area_period_product << "      "
     << *i.area_period_product << "          LUT*ns\n";
  os << "broadcast              flash     iterative\n";
  os << "event bank conflicts   never     sometimes\n";
  os << "area, 4 events/cycle   " << p4.area_core_luts << "       " << i4.area_core_luts
     << "          LUTs\n";
  os << "area, 64 entries       " << p64.area_core_luts << "       "
     << i64.area_core_luts << "          LUTs\n";
  return os.str();
}

StatsComparison compare_stats(const CycleStats& parallel,
                              const CycleStats& incremental) {
  StatsComparison c{};
  c.parallel = parallel;
  c.incremental = incremental;
  c.cycle_delta = int64_t(incremental.cycles) - int64_t(parallel.cycles);
  c.bank_conflicts = int64_t(incremental.bank_conflicts);
  c.drain_surplus = int64_t(incremental.broadcast_drain_cycles) -
                    int64_t(parallel.broadcast_drain_cycles);
  c.slack = c.cycle_delta - c.bank_conflicts - c.drain_surplus;
  c.parallel_cost_ns =
      double(parallel.cycles) * *cost_report(SchedulerKind::Parallel, 32, 2).period_ns;
  c.incremental_cost_ns = double(incremental.cycles) *
                          *cost_report(SchedulerKind::Incremental, 32, 2).period_ns;
  return c;
}

std::string comparison_to_text(const StatsComparison& c) {
  std::ostringstream os;
  os << "cycles: parallel=" << c.parallel.cycles
     << " incremental=" << c.incremental.cycles << " delta=" << c.cycle_delta << "\n";
  os << "attributed: bank_conflicts=" << c.bank_conflicts
     << " broadcast_drain_surplus=" << c.drain_surplus << " slack=" << c.slack << "\n";
  os << "cost: parallel=" << c.parallel_cost_ns << " ns"
     << " incremental=" << c.incremental_cost_ns << " ns\n";
  return os.str();
}

std::string comparison_to_json(const StatsComparison& c) {
  nlohmann::ordered_json j;
  j["parallel_cycles"] = c.parallel.cycles;
  j["incremental_cycles"] = c.incremental.cycles;
  j["cycle_delta"] = c.cycle_delta;
  j["bank_conflicts"] = c.bank_conflicts;
  j["broadcast_drain_surplus"] = c.drain_surplus;
  j["slack"] = c.slack;
  j["parallel_cost_ns"] = c.parallel_cost_ns;
  j["incremental_cost_ns"] = c.incremental_cost_ns;
  return j.dump(2);
}

}  // namespace edgesim
