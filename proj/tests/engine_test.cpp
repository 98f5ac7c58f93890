#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "fairbnp/bnp/engine.hpp"
#include "fairbnp/select/selection.hpp"

using namespace fairbnp;

namespace {

double brute_force_selection(const SelectionInstance& inst) {
  const int n = static_cast<int>(inst.payoffs.size());
  double best = kInf;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != inst.pick) continue;
    double lo = kInf, hi = -kInf;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) {
        lo = std::min(lo, inst.payoffs[i]);
        hi = std::max(hi, inst.payoffs[i]);
      }
    best = std::min(best, hi - lo);
  }
  return best;
}

Node node_with(int id, double lb, int depth) {
  Node n;
  n.id = id;
  n.lb = lb;
  n.depth = depth;
  return n;
}

}  // namespace

TEST(Engine, Example1RangeBranching) {
  SelectionPlugin plugin(example1_instance());
  EngineConfig cfg;
  cfg.chain = make_chain(BranchingScheme::kRange, 0.0);
  auto rep = solve(plugin, cfg);
  ASSERT_EQ(rep.status, SolveStatus::kOptimal);
  ASSERT_TRUE(rep.incumbent);
  EXPECT_NEAR(*rep.incumbent, 1.0, 1e-6);
  EXPECT_LE(rep.nodes, 5);
  ASSERT_TRUE(rep.root_lb);
  EXPECT_NEAR(*rep.root_lb, 0.0, 1e-6);
  EXPECT_EQ(rep.nodes, 1 + 2 * rep.branchings);
  EXPECT_EQ(rep.rbf_violations, 0);
  EXPECT_NEAR(rep.gap_pct, 0.0, 1e-9);
}

TEST(Engine, Example1ClassicalBranching) {
  SelectionPlugin plugin(example1_instance());
  EngineConfig cfg;
  cfg.chain = make_chain(BranchingScheme::kClassical);
  auto rep = solve(plugin, cfg);
  ASSERT_EQ(rep.status, SolveStatus::kOptimal);
  EXPECT_NEAR(*rep.incumbent, 1.0, 1e-6);
  EXPECT_NEAR(*rep.root_lb, 0.0, 1e-6);
  EXPECT_EQ(rep.nodes, 1 + 2 * rep.branchings);
}

TEST(Engine, TimeLimitZeroReturnsSeed) {
  SelectionPlugin plugin(example1_instance());
  EngineConfig cfg;
  cfg.time_limit = 0.0;
  cfg.upper_bound = 2.0;
  auto rep = solve(plugin, cfg);
  EXPECT_EQ(rep.status, SolveStatus::kTimeLimit);
  ASSERT_TRUE(rep.incumbent);
  EXPECT_EQ(*rep.incumbent, 2.0);
  EXPECT_EQ(rep.lower_bound, 0.0);
  EXPECT_EQ(rep.nodes, 1);
}

TEST(Engine, TrajectoryIsMonotone) {
  SelectionPlugin plugin({{4, 9, 1, 7, 3, 12, 6}, 3, 0.0});
  for (auto scheme : {BranchingScheme::kClassical, BranchingScheme::kRange}) {
    EngineConfig cfg;
    cfg.chain = make_chain(scheme, 0.0);
    auto rep = solve(plugin, cfg);
    ASSERT_GE(rep.trajectory.size(), 2u);
    for (std::size_t i = 1; i < rep.trajectory.size(); ++i) {
      EXPECT_GE(rep.trajectory[i].lb, rep.trajectory[i - 1].lb);
      EXPECT_LE(rep.trajectory[i].ub, rep.trajectory[i - 1].ub);
      EXPECT_GE(rep.trajectory[i].time, rep.trajectory[i - 1].time);
    }
  }
}

TEST(EngineProperty, SelectionMatchesBruteForce) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 3 + static_cast<int>(rng() % 6);
    SelectionInstance inst;
    for (int i = 0; i < n; ++i) inst.payoffs.push_back(static_cast<double>(rng() % 20));
    inst.pick = 2 + static_cast<int>(rng() % (n - 1));
    double expect = brute_force_selection(inst);
    SelectionPlugin plugin(inst);
    for (auto scheme : {BranchingScheme::kClassical, BranchingScheme::kRange}) {
      for (double alpha : {0.0, 0.1}) {
        EngineConfig cfg;
        cfg.chain = make_chain(scheme, alpha);
        auto rep = solve(plugin, cfg);
        ASSERT_EQ(rep.status, SolveStatus::kOptimal) << trial;
        EXPECT_NEAR(*rep.incumbent, expect, 1e-6) << "trial " << trial << " scheme " << to_string(scheme);
        EXPECT_EQ(rep.nodes, 1 + 2 * rep.branchings);
        if (alpha == 0.0) {
          EXPECT_EQ(rep.rbf_violations, 0);
        }
      }
    }
  }
}

TEST(EngineProperty, ExactTailRestoresRespectingLeaves) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    int n = 4 + static_cast<int>(rng() % 5);
    SelectionInstance inst;
    for (int i = 0; i < n; ++i) inst.payoffs.push_back(static_cast<double>(1 + rng() % 30));
    inst.pick = 2 + static_cast<int>(rng() % (n - 1));
    SelectionPlugin plugin(inst);
    EngineConfig cfg;
    cfg.chain = make_chain(BranchingScheme::kRange, 0.3, true);
    auto rep = solve(plugin, cfg);
    ASSERT_EQ(rep.status, SolveStatus::kOptimal) << trial;
    EXPECT_NEAR(*rep.incumbent, brute_force_selection(inst), 1e-6) << trial;
    EXPECT_GT(rep.rbf_nodes, 0) << trial;
    EXPECT_EQ(rep.rbf_violations, 0) << trial;
  }
}

TEST(SelectNextNode, LowerBoundFirst) {
  Node a = node_with(0, 3.0, 1), b = node_with(1, 5.0, 1);
  std::vector<const Node*> open{&b, &a};
  EXPECT_EQ(open[select_next_node(open)]->id, 0);
}

TEST(SelectNextNode, DeeperOnTies) {
  Node a = node_with(0, 3.0, 2), b = node_with(1, 3.0, 4);
  std::vector<const Node*> open{&a, &b};
  EXPECT_EQ(open[select_next_node(open)]->id, 1);
}

TEST(SelectNextNode, LowerIdOnFullTies) {
  Node a = node_with(7, 3.0, 2), b = node_with(2, 3.0, 2);
  std::vector<const Node*> open{&a, &b};
  EXPECT_EQ(open[select_next_node(open)]->id, 2);
}

TEST(Prune, ToleranceBoundary) {
  EXPECT_FALSE(prune(false, 4.0 - 1e-9, 4.0, false));
  EXPECT_TRUE(prune(false, 4.0 + 1e-9, 4.0, false));
}

TEST(Prune, InfeasibleAndIntegerRounding) {
  EXPECT_TRUE(prune(true, 0.0, std::nullopt, false));
  EXPECT_TRUE(prune(false, 5.2, 6.0, true));
  EXPECT_FALSE(prune(false, 5.2, 6.0, false));
  EXPECT_FALSE(prune(false, 4.0, 6.0, true));
  EXPECT_FALSE(prune(false, 100.0, std::nullopt, true));
}

TEST(Gap, Conventions) {
  EXPECT_DOUBLE_EQ(gap_percent(3.0, 4.0), 25.0);
  EXPECT_DOUBLE_EQ(gap_percent(0.0, 4.0), 100.0);
  EXPECT_DOUBLE_EQ(gap_percent(4.0, 4.0), 0.0);
  EXPECT_DOUBLE_EQ(gap_percent(0.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(gap_percent(1.0, std::nullopt), 100.0);
}
