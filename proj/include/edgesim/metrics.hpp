#pragma once
//
// Hardware cost constants for the two scheduler designs plus comparison of
// measured run statistics.
//

#include <optional>
#include <string>

#include "edgesim/core_pipeline.hpp"

namespace edgesim {

struct MetricsError : Error {
  using Error::Error;
};

// FPGA cost figures for a scheduler configuration. These are reported
// constants, not derived by simulation; the simulator's cycle counts can be
// weighted by period_ns for end-to-end comparisons.
struct HardwareCost {
  SchedulerKind kind;
  int window_entries;
  int events_per_cycle;
  int area_core_luts;
  std::optional<int> area_total_luts;
  std::optional<double> period_ns;
  std::optional<double> period_pipelined_ns;
  std::optional<double> area_period_product;  // area_total_luts * period_ns
};

// Known grid: (32 entries, 2 events) full figures for both schedulers,
// (32 entries, 4 events) and (64 entries, 2 events) core area only. Anything
// else throws MetricsError.
HardwareCost cost_report(SchedulerKind kind, int entries, int events_per_cycle);

std::string cost_to_text(const HardwareCost& cost);
std::string cost_to_json(const HardwareCost& cost);
std::string cost_table_text();  // both schedulers, 32 entries / 2 events

// Cycle and stall comparison between two runs of the same program.
struct StatsComparison {
  CycleStats parallel, incremental;
  int64_t cycle_delta;        // incremental - parallel
  int64_t bank_conflicts;     // incremental stalls attributed to bank conflicts
  int64_t drain_surplus;      // incremental drain cycles beyond parallel's flash
  int64_t slack;              // delta not explained by the attributed stalls
  double parallel_cost_ns;    // cycles x period
  double incremental_cost_ns;
};

StatsComparison compare_stats(const CycleStats& parallel, const CycleStats& incremental);

std::string comparison_to_text(const StatsComparison& c);
std::string comparison_to_json(const StatsComparison& c);

}  // namespace edgesim
