#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "fairbnp/bench/bench.hpp"
#include "fairbnp/gap/compact.hpp"
#include "fairbnp/select/selection.hpp"

using namespace fairbnp;
using namespace fairbnp::bench;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("fairbnp_bench_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string write_instance(const fs::path& dir, const cvrp::CvrpInstance& inst) {
  auto p = dir / (inst.name + ".vrp");
  std::ofstream out(p);
  cvrp::write_tsplib(out, inst);
  return p.string();
}

std::string tsplib_text(const cvrp::CvrpInstance& inst) {
  std::ostringstream os;
  cvrp::write_tsplib(os, inst);
  return os.str();
}

RunConfig cvrp_config(const std::string& file, cvrp::Formulation f, BranchingScheme b) {
  RunConfig c;
  c.formulation = f;
  c.branching = b;
  c.instance = file;
  c.time_limit = 60.0;
  return c;
}

}  // namespace

TEST(BenchCsv, GoldenHeaders) {
  EXPECT_STREQ(summary_header(),
               "instance,size,formulation,branching,status,solved,time_s,gap_pct,nodes,lower_bound,upper_bound,"
               "delta_pct,error");
  EXPECT_STREQ(trajectory_header(), "time_s,lb,ub");
  EXPECT_STREQ(tsp_header(),
               "instance,budget_pct,tsp_optimal,range_general,range_converted,delta_r_pct,lb_general,lb_tsp,ub_tsp,"
               "delta_lb_pct,delta_ub_pct,gap_pct");
}

TEST(BenchCsv, GoldenRow) {
  SummaryRow r;
  r.instance = "X-n101-k25-n15-01";
  r.size = "15";
  r.formulation = "customer";
  r.branching = "range";
  r.status = "Optimal";
  r.solved = true;
  r.time = 12.3456;
  r.gap = 0.0;
  r.nodes = 42;
  r.lower_bound = 1601.0;
  r.upper_bound = 1601.0;
  r.delta = delta_percent(2170.0, 1601.0);
  EXPECT_EQ(format_row(r), "X-n101-k25-n15-01,15,customer,range,Optimal,1,12.346,0.00,42,1601.0000,1601.0000,26.2,");
  SummaryRow e;
  e.instance = "a,b";
  e.status = "Error";
  e.error = "cannot open \"a,b\"";
  EXPECT_EQ(format_row(e), "\"a,b\",,,,Error,0,0.000,100.00,0,,,,\"cannot open \"\"a,b\"\"\"");
}

TEST(BenchCsv, Delta) {
  ASSERT_TRUE(delta_percent(2170.0, 1601.0));
  EXPECT_NEAR(*delta_percent(2170.0, 1601.0), 100.0 * 569.0 / 2170.0, 1e-12);
  EXPECT_FALSE(delta_percent(0.0, 0.0));
}

TEST(BenchCsv, TrajectoryIsCheckedOnEmission) {
  std::ostringstream ok;
  write_trajectory(ok, {{0.0, 0.0, kInf}, {1.0, 2.0, 9.0}, {2.0, 3.0, 3.0}});
  EXPECT_EQ(ok.str(), "time_s,lb,ub\n0.000,0.0000,\n1.000,2.0000,9.0000\n2.000,3.0000,3.0000\n");
  std::ostringstream bad;
  EXPECT_THROW(write_trajectory(bad, {{0.0, 2.0, 9.0}, {1.0, 1.0, 9.0}}), InconsistencyError);
  EXPECT_THROW(write_trajectory(bad, {{0.0, 2.0, 5.0}, {1.0, 2.0, 9.0}}), InconsistencyError);
}

TEST(BenchConfig, Validation) {
  RunConfig c;
  EXPECT_NO_THROW(validate(c));
  c.branching = BranchingScheme::kOrder;
  EXPECT_THROW(validate(c), ConfigError);
  c.formulation = cvrp::Formulation::kOrder;
  EXPECT_NO_THROW(validate(c));
  c.alpha = 1.0;
  EXPECT_THROW(validate(c), ConfigError);
  RunConfig b;
  b.budget_pct = 99;
  EXPECT_THROW(validate(b), ConfigError);
  RunConfig g;
  g.problem = Problem::kGap;
  g.theta = 1.0;
  EXPECT_THROW(validate(g), ConfigError);
  EXPECT_THROW(parse_problem("tsp"), ConfigError);
}

TEST(BenchDerive, DeterministicSamples) {
  auto base = cvrp::random_instance(30, 5, 1, 100, 10);
  base.name = "base";
  auto a = derive_subinstances(base, {15, 20}, 3, 7);
  auto b = derive_subinstances(base, {15, 20}, 3, 7);
  auto c = derive_subinstances(base, {15, 20}, 3, 8);
  ASSERT_EQ(a.size(), 6u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(tsplib_text(a[i]), tsplib_text(b[i]));
    EXPECT_EQ(a[i].vehicles, 5);
    std::vector<int> d(a[i].demand.begin() + 1, a[i].demand.end());
    EXPECT_EQ(a[i].capacity, cvrp::minimal_capacity(d, 5));
    EXPECT_FALSE(cvrp::packable(d, 5, a[i].capacity - 1));
  }
  EXPECT_EQ(a[0].num_vertices(), 16);
  EXPECT_EQ(a[3].num_vertices(), 21);
  EXPECT_EQ(a[0].name, "base-n15-01");
  EXPECT_NE(tsplib_text(a[0]), tsplib_text(c[0]));
  // every sampled location comes from the base customers
  for (const auto& p : a[0].coords)
    EXPECT_TRUE(std::any_of(base.coords.begin() + 1, base.coords.end(),
                            [&](const cvrp::Point& q) { return q.x == p.x && q.y == p.y; }));
  EXPECT_THROW(derive_subinstances(base, {30}, 1, 7), ConfigError);
}

TEST(BenchMatrix, SelectionExampleUnderEveryScheme) {
  for (auto scheme : {BranchingScheme::kClassical, BranchingScheme::kRange}) {
    SelectionPlugin plugin(example1_instance());
    EngineConfig cfg;
    cfg.chain = make_chain(scheme);
    auto rep = solve(plugin, cfg);
    ASSERT_EQ(rep.status, SolveStatus::kOptimal);
    EXPECT_NEAR(*rep.incumbent, 1.0, 1e-9);
  }
}

TEST(BenchMatrix, AllPairsAgreeOnMicroInstance) {
  auto dir = scratch("micro");
  auto inst = cvrp::random_instance(6, 2, 21, 50, 6);
  inst.name = "micro";
  auto file = write_instance(dir, inst);
  std::vector<RunConfig> cfgs;
  for (auto f : {cvrp::Formulation::kVehicle, cvrp::Formulation::kCustomer})
    for (auto b : {BranchingScheme::kClassical, BranchingScheme::kRange}) cfgs.push_back(cvrp_config(file, f, b));
  // Gini weights on two vehicles are the range weights
  cfgs.push_back(cvrp_config(file, cvrp::Formulation::kOrder, BranchingScheme::kOrder));
  cfgs.push_back(cvrp_config(file, cvrp::Formulation::kOrder, BranchingScheme::kClassical));
  cfgs.push_back(cvrp_config((dir / "missing.vrp").string(), cvrp::Formulation::kCustomer, BranchingScheme::kRange));
  auto rows = run_matrix(cfgs, (dir / "out").string());
  ASSERT_EQ(rows.size(), cfgs.size());
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    EXPECT_TRUE(rows[i].solved) << format_row(rows[i]);
    ASSERT_TRUE(rows[i].upper_bound);
    EXPECT_EQ(*rows[i].upper_bound, *rows[0].upper_bound) << format_row(rows[i]);
    EXPECT_EQ(rows[i].gap, 0.0);
  }
  EXPECT_EQ(rows.back().status, "Error");
  EXPECT_FALSE(rows.back().error.empty());
  std::ifstream summary(dir / "out" / "summary.csv");
  std::string header;
  std::getline(summary, header);
  EXPECT_EQ(header, summary_header());
  EXPECT_TRUE(fs::exists(dir / "out" / "trajectories" / "micro_customer_range.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "solutions" / "micro_customer_range.sol"));
}

TEST(BenchMatrix, DeterministicRowsApartFromTiming) {
  auto dir = scratch("determinism");
  auto inst = cvrp::random_instance(7, 2, 33, 60, 8);
  auto file = write_instance(dir, inst);
  std::vector<RunConfig> cfgs{cvrp_config(file, cvrp::Formulation::kCustomer, BranchingScheme::kRange),
                              cvrp_config(file, cvrp::Formulation::kVehicle, BranchingScheme::kClassical)};
  auto a = run_matrix(cfgs);
  auto b = run_matrix(cfgs);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i].time = b[i].time = 0.0;
    EXPECT_EQ(format_row(a[i]), format_row(b[i]));
  }
}

TEST(BenchMatrix, TimeLimitLeavesAGap) {
  auto dir = scratch("limit");
  auto inst = cvrp::random_instance(40, 5, 2, 100, 10);
  inst.efficient_cost = 100000;  // stands in for an unfinished baseline
  auto file = write_instance(dir, inst);
  auto c = cvrp_config(file, cvrp::Formulation::kCustomer, BranchingScheme::kRange);
  c.time_limit = 0.5;
  auto rows = run_matrix({c});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_TRUE(rows[0].error.empty()) << rows[0].error;
  EXPECT_FALSE(rows[0].solved);
  EXPECT_GT(rows[0].gap, 0.0);
  if (rows[0].upper_bound) {
    EXPECT_LE(*rows[0].lower_bound, *rows[0].upper_bound + 1e-6);
  }
}

TEST(BenchMatrix, AssignmentRunMatchesCompactOracle) {
  for (unsigned long long seed = 40;; ++seed) {
    auto g = gap::generate_gap(2, 7, seed);
    auto best = gap::compact_max_profit(g);
    if (!best) continue;
    RunConfig c;
    c.problem = Problem::kGap;
    c.theta = 0.01;
    auto r = run_gap(c, g);
    g.profit_floor = gap::profit_floor(*best, 0.01);
    auto expect = gap::solve_compact_oracle(g);
    ASSERT_TRUE(expect);
    ASSERT_TRUE(r.row.upper_bound);
    EXPECT_EQ(std::llround(*r.row.upper_bound), expect->range);
    EXPECT_EQ(r.row.size, "2x7");
    break;
  }
}

TEST(BenchTsp, ReorderingShortensRoute) {
  // square: the crossing order 0-1-2-3-0 is longer than 0-1-3-2-0
  auto inst = cvrp::make_instance({{0, 0}, {10, 0}, {0, 10}, {10, 10}, {0, 30}}, {1, 1, 1, 1}, 2, 3, "square");
  SolveReport rep;
  rep.incumbent_columns.push_back(cvrp::route_column(inst, {0, 1, 2, 3, 0}, 0));
  rep.incumbent_columns.push_back(cvrp::route_column(inst, {0, 4, 0}, 1));
  long long before = cvrp::route_distance(inst, {0, 1, 2, 3, 0});
  long long after = cvrp::route_distance(inst, {0, 1, 3, 2, 0});
  ASSERT_LT(after, before);
  const long long single = cvrp::route_distance(inst, {0, 4, 0});
  rep.incumbent = static_cast<double>(std::llabs(before - single));
  rep.lower_bound = 0.0;
  auto row = tsp_row(inst, 110, rep);
  EXPECT_EQ(row.range_general, std::llabs(before - single));
  EXPECT_EQ(row.range_converted, std::llabs(after - single));
  EXPECT_NEAR(row.delta_r, 100.0 * static_cast<double>(row.range_converted - row.range_general) / row.range_converted, 1e-12);
  EXPECT_GT(row.delta_r, 0.0);
  EXPECT_FALSE(row.tsp_optimal);

  rep.lower_bound = static_cast<double>(row.range_converted);
  EXPECT_TRUE(tsp_row(inst, 110, rep).tsp_optimal);
  rep.lower_bound = static_cast<double>(row.range_converted) + 5.0;
  EXPECT_THROW(tsp_row(inst, 110, rep), InconsistencyError);
}

TEST(BenchTsp, AlreadyShortestRoutes) {
  auto inst = cvrp::random_instance(6, 2, 5, 50, 6);
  RunConfig c;
  c.time_limit = 60.0;
  auto row = tsp_report(c, inst, true);
  EXPECT_GE(row.delta_r, 0.0);
  EXPECT_GE(row.range_converted, row.range_general);
  ASSERT_TRUE(row.lb_tsp);
  if (row.range_converted == row.range_general) {
    EXPECT_EQ(row.delta_r, 0.0);
  }
  EXPECT_EQ(row.tsp_optimal, row.gap == 0.0);
}

TEST(BenchSolution, Format) {
  auto inst = cvrp::make_instance({{0, 0}, {3, 4}, {6, 8}}, {1, 1}, 1, 2, "line");
  std::ostringstream os;
  write_cvrp_solution(os, inst, {{0, 1, 2, 0}});
  EXPECT_EQ(os.str(), "Route #1: 1 2 | distance 20\nCost 20\n");
}
