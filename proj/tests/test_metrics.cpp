#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "edgesim/assembler.hpp"
#include "edgesim/metrics.hpp"
#include "support/fixtures.hpp"

using namespace edgesim;

TEST_CASE("cost constants for the 32-entry two-event configurations") {
  HardwareCost p = cost_report(SchedulerKind::Parallel, 32, 2);
  CHECK(p.area_core_luts == 288);
  CHECK(p.area_total_luts == 340);
  CHECK(p.period_ns == 5.0);
  CHECK(p.period_pipelined_ns == 2.9);
  CHECK(p.area_period_product == 1700.0);

  HardwareCost i = cost_report(SchedulerKind::Incremental, 32, 2);
  CHECK(i.area_core_luts == 78);
  CHECK(i.area_total_luts == 150);
  CHECK(i.period_ns == 4.3);
  CHECK(i.period_pipelined_ns == 2.5);
  CHECK(i.area_period_product == 645.0);

  // products are exactly area * period
  CHECK(*p.area_period_product == *p.area_total_luts * *p.period_ns);
  CHECK(*i.area_period_product == *i.area_total_luts * *i.period_ns);

  double ratio = *p.area_period_product / *i.area_period_product;
  CHECK(ratio >= 2.6);
  CHECK(ratio <= 2.7);
}

TEST_CASE("scaling corners of the cost grid") {
  CHECK(cost_report(SchedulerKind::Parallel, 64, 2).area_core_luts == 576);
  CHECK(cost_report(SchedulerKind::Incremental, 64, 2).area_core_luts == 130);
  CHECK(cost_report(SchedulerKind::Parallel, 32, 4).area_core_luts == 288);
  CHECK(cost_report(SchedulerKind::Incremental, 32, 4).area_core_luts == 156);
  CHECK_THROWS_AS(cost_report(SchedulerKind::Parallel, 16, 2), MetricsError);
  CHECK_THROWS_AS(cost_report(SchedulerKind::Parallel, 64, 4), MetricsError);
}

TEST_CASE("cost rendering") {
  std::string text = cost_to_text(cost_report(SchedulerKind::Incremental, 32, 2));
  CHECK(text.find("78") != std::string::npos);
  CHECK(text.find("150") != std::string::npos);
  CHECK(text.find("4.3") != std::string::npos);
  CHECK(text.find("645") != std::string::npos);
  std::string table = cost_table_text();
  CHECK(table.find("1700") != std::string::npos);
  CHECK(table.find("645") != std::string::npos);
  CHECK(table.find("flash") != std::string::npos);
}

TEST_CASE("identical stats compare with zero deltas") {
  CycleStats s;
  s.cycles = 100;
  s.issues = 80;
  StatsComparison c = compare_stats(s, s);
  CHECK(c.cycle_delta == 0);
  CHECK(c.drain_surplus == 0);
  CHECK(c.slack == 0);
  CHECK(c.parallel_cost_ns == 100 * 5.0);
  CHECK(c.incremental_cost_ns == 100 * 4.3);
}

TEST_CASE("measured scheduler differences are fully attributed") {
  ArchState st;
  st.regs[1] = 9;

  SUBCASE("dependent chain: identical cycle counts") {
    Program p = assemble(testing::chain_text(8));
    BlockRun par = run_block(p.blocks[0], st, {SchedulerKind::Parallel});
    BlockRun inc = run_block(p.blocks[0], st, {SchedulerKind::Incremental});
    CHECK(par.stats.cycles == inc.stats.cycles);
    StatsComparison c = compare_stats(par.stats, inc.stats);
    CHECK(c.cycle_delta == 0);
    CHECK(c.slack == 0);
  }

  SUBCASE("broadcast fanout: delta explained by drain and slack reported") {
    Program p = assemble(testing::broadcast_fanout_text(8, true));
    BlockRun par = run_block(p.blocks[0], st, {SchedulerKind::Parallel});
    BlockRun inc = run_block(p.blocks[0], st, {SchedulerKind::Incremental});
    StatsComparison c = compare_stats(par.stats, inc.stats);
    CHECK(c.drain_surplus == int64_t(inc.stats.broadcast_drain_cycles));
    CHECK(c.cycle_delta == c.bank_conflicts + c.drain_surplus + c.slack);
    std::string text = comparison_to_text(c);
    CHECK(text.find("slack") != std::string::npos);
  }

  SUBCASE("bank conflict block: delta explained by the stall") {
    Program p = assemble(testing::kBankConflictText);
    BlockRun par = run_block(p.blocks[0], st, {SchedulerKind::Parallel});
    BlockRun inc = run_block(p.blocks[0], st, {SchedulerKind::Incremental});
    StatsComparison c = compare_stats(par.stats, inc.stats);
    CHECK(c.bank_conflicts == 1);
    CHECK(c.cycle_delta == c.bank_conflicts + c.drain_surplus + c.slack);
  }
}
