#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "fairbnp/colgen/colgen.hpp"
#include "fairbnp/select/selection.hpp"

using namespace fairbnp;

TEST(Colgen, Example1PreloadedColumns) {
  SelectionPlugin plugin(example1_instance());
  auto restr = NodeRestrictions::root(plugin.layout());
  MasterProblem master(plugin.layout(), restr);
  ColumnPool pool;
  for (const auto& c : plugin.columns()) master.add_column(pool[pool.insert(c).first]);
  Pricer none = [](const PricingRequest&) { return std::vector<Column>{}; };
  auto r = run_colgen(master, pool, none, restr, ColgenOptions{});
  EXPECT_EQ(r.status, ColgenStatus::kOptimal);
  EXPECT_TRUE(r.proven_optimal);
  EXPECT_NEAR(r.objective, 0.0, 1e-6);
}

TEST(Colgen, EmptyPoolEnumeratingPricerMatchesFullLp) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    SelectionInstance inst;
    int n = 3 + static_cast<int>(rng() % 10);
    for (int i = 0; i < n; ++i) inst.payoffs.push_back(static_cast<double>(rng() % 15));
    inst.pick = 1 + static_cast<int>(rng() % n);
    SelectionPlugin plugin(inst);
    auto full = lp::solve(selection_master(plugin).model());
    ASSERT_EQ(full.status, lp::LpStatus::kOptimal);

    auto restr = NodeRestrictions::root(plugin.layout());
    MasterProblem master(plugin.layout(), restr);
    ColumnPool pool;
    Pricer pricer = [&](const PricingRequest& req) { return plugin.price(req); };
    auto r = run_colgen(master, pool, pricer, restr, ColgenOptions{});
    ASSERT_EQ(r.status, ColgenStatus::kOptimal);
    EXPECT_NEAR(r.objective, full.objective, 1e-6) << trial;
    EXPECT_GT(r.columns_added, 0);
  }
}

TEST(Colgen, WindowExcludingSubproblemIsInfeasible) {
  // two agents, two jobs, at-most-one column per agent; agent 1 only owns
  // columns of payoff 5 but its window is [0, 4]
  MasterLayout layout;
  layout.num_elements = 2;
  layout.num_subproblems = 2;
  layout.convexity = ConvexityKind::kPerSubproblemAtMost;
  layout.payoff_cap = 10.0;
  auto restr = NodeRestrictions::root(layout);
  restr.windows[1] = {0.0, 4.0};
  restr.removed[0].set(1);
  std::vector<Column> universe;
  for (int agent = 0; agent < 2; ++agent)
    for (int mask = 0; mask < 4; ++mask) {
      Column c;
      c.subproblem = agent;
      std::vector<int> jobs;
      for (int j = 0; j < 2; ++j)
        if (mask & (1 << j)) jobs.push_back(j);
      c.set_elements(jobs);
      c.payload = jobs;
      c.payoff = agent == 1 && !jobs.empty() ? 5.0 : static_cast<double>(jobs.size());
      universe.push_back(c);
    }
  Pricer pricer = [&](const PricingRequest& req) {
    std::vector<Column> out;
    for (const auto& c : universe)
      if (c.subproblem == req.subproblem && req.window.contains(c.payoff) && (c.covered & req.removed).none() &&
          req.reduced_cost(c) < -kTolOpt)
        out.push_back(c);
    return out;
  };
  MasterProblem master(layout, restr);
  ColumnPool pool;
  auto r = run_colgen(master, pool, pricer, restr, ColgenOptions{});
  EXPECT_EQ(r.status, ColgenStatus::kInfeasible);
}

TEST(AgeAndEvict, Boundaries) {
  ColumnPool pool;
  Column a, b;
  a.payload = {1};
  b.payload = {2};
  int ia = pool.insert(a).first, ib = pool.insert(b).first;
  std::vector<int> ids{ia, ib};
  for (int round = 0; round < 3; ++round) {
    std::vector<std::pair<int, double>> vals{{ia, 1.0}, {ib, 0.0}};
    pool.record_round(vals);
  }
  EXPECT_TRUE(age_and_evict(pool, ids, 4).empty());
  auto ev = age_and_evict(pool, ids, 3);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0], ib);
  EXPECT_TRUE(pool.entry(ib).archived);
  EXPECT_FALSE(pool.entry(ia).archived);
  EXPECT_THROW(age_and_evict(pool, ids, 0), ConfigError);
}

TEST(AgeAndEvict, PinnedNeverEvicted) {
  ColumnPool pool;
  Column a;
  a.payload = {1};
  int ia = pool.insert(a).first;
  pool.set_pinned(ia, true);
  std::vector<std::pair<int, double>> vals{{ia, 0.0}};
  for (int i = 0; i < 5; ++i) pool.record_round(vals);
  std::vector<int> ids{ia};
  EXPECT_TRUE(age_and_evict(pool, ids, 1).empty());
}

TEST(AgeAndEvict, ReconvergedObjectiveUnchanged) {
  SelectionPlugin plugin({{3, 8, 1, 9, 4, 4, 7, 2, 6, 5}, 4, 0.0});
  auto restr = NodeRestrictions::root(plugin.layout());
  Pricer pricer = [&](const PricingRequest& req) { return plugin.price(req); };
  MasterProblem master(plugin.layout(), restr);
  ColumnPool pool;
  auto r0 = run_colgen(master, pool, pricer, restr, ColgenOptions{});
  ASSERT_EQ(r0.status, ColgenStatus::kOptimal);
  // evict everything at value zero, then re-converge
  std::vector<int> zero;
  for (const auto& [id, v] : r0.values)
    if (v <= kTolFeas) zero.push_back(id);
  for (int id : zero) {
    pool.archive(id);
    master.set_active(id, false);
  }
  auto r1 = run_colgen(master, pool, pricer, restr, ColgenOptions{});
  ASSERT_EQ(r1.status, ColgenStatus::kOptimal);
  EXPECT_NEAR(r1.objective, r0.objective, 1e-7);
}

TEST(ColumnPool, DuplicatesSuppressed) {
  ColumnPool pool;
  Column a;
  a.subproblem = 1;
  a.payload = {0, 3, 2, 0};
  auto [id, ins] = pool.insert(a);
  auto [id2, ins2] = pool.insert(a);
  EXPECT_TRUE(ins);
  EXPECT_FALSE(ins2);
  EXPECT_EQ(id, id2);
  a.subproblem = 2;
  EXPECT_TRUE(pool.insert(a).second);
}
