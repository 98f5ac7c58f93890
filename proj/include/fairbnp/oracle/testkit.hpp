#pragma once

// Brute-force ground truth for small instances: complete column universes,
// exhaustive optima and LP bounds with every column present. Nothing here
// reuses the labeling, knapsack or branching code.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "fairbnp/bnp/plugin.hpp"
#include "fairbnp/colgen/master.hpp"
#include "fairbnp/cvrp/instance.hpp"
#include "fairbnp/gap/instance.hpp"
#include "fairbnp/lp/simplex.hpp"
#include "fairbnp/objective/order_weights.hpp"

namespace fairbnp::oracle {

inline constexpr int kRouteCustomerCap = 9;
inline constexpr int kAssignmentJobCap = 12;

struct UniverseColumn {
  std::vector<int> payload;  // route with depots, or sorted jobs
  int owner = -1;            // agent for assignments, -1 for routes
  std::uint64_t mask = 0;    // covered elements (customer i -> bit i - 1)
  long long cost = 0;
  long long payoff = 0;
};

struct EnumeratedUniverse {
  int elements = 0;
  std::vector<UniverseColumn> columns;
};

/// Every elementary depot-to-depot route with load within capacity, in
/// both orientations.
inline EnumeratedUniverse enumerate_routes(const cvrp::CvrpInstance& inst) {
  const int n = inst.num_customers();
  if (n > kRouteCustomerCap) throw SizeCapError("route enumeration is limited to 9 customers");
  EnumeratedUniverse u;
  u.elements = n;
  std::vector<int> path{0};
  std::vector<bool> used(n + 1, false);
  std::function<void(int, long long, long long, std::uint64_t)> rec = [&](int load, long long c, long long d,
                                                                          std::uint64_t mask) {
    int v = path.back();
    if (v != 0) {
      UniverseColumn col;
      col.payload = path;
      col.payload.push_back(0);
      col.mask = mask;
      col.cost = c + inst.cost[v][0];
      col.payoff = d + inst.dist[v][0];
      u.columns.push_back(std::move(col));
    }
    for (int j = 1; j <= n; ++j) {
      if (used[j] || load + inst.demand[j] > inst.capacity) continue;
      used[j] = true;
      path.push_back(j);
      rec(load + inst.demand[j], c + inst.cost[v][j], d + inst.dist[v][j], mask | (1ULL << (j - 1)));
      path.pop_back();
      used[j] = false;
    }
  };
  rec(0, 0, 0, 0);
  return u;
}

/// Every capacity-feasible job subset of every agent, the empty one included.
inline EnumeratedUniverse enumerate_assignments(const gap::GapInstance& g) {
  if (g.jobs > kAssignmentJobCap) throw SizeCapError("assignment enumeration is limited to 12 jobs");
  EnumeratedUniverse u;
  u.elements = g.jobs;
  for (int i = 0; i < g.agents; ++i)
    for (std::uint64_t s = 0; s < (1ULL << g.jobs); ++s) {
      UniverseColumn col;
      col.owner = i;
      col.mask = s;
      for (int j = 0; j < g.jobs; ++j)
        if (s & (1ULL << j)) {
          col.payload.push_back(j);
          col.cost += g.profit[i][j];
          col.payoff += g.consumption[i][j];
        }
      if (col.payoff <= g.capacity[i]) u.columns.push_back(std::move(col));
    }
  return u;
}

/// Objective over selected payoffs: range by default, v^T z with weights.
struct OracleObjective {
  std::optional<OrderWeights> weights;

  long long operator()(std::vector<long long> payoffs) const {
    if (payoffs.empty()) return 0;
    std::sort(payoffs.begin(), payoffs.end(), std::greater<>());
    if (!weights) return payoffs.front() - payoffs.back();
    if (weights->size() != static_cast<int>(payoffs.size())) throw ConfigError("weight count mismatch");
    double s = 0.0;
    for (int k = 0; k < weights->size(); ++k) s += weights->v[k] * static_cast<double>(payoffs[k]);
    return std::llround(s);
  }
};

struct OracleResult {
  long long objective = 0;
  std::vector<int> witness;  // indices into the universe
};

/// Exact optimum over partitions of the elements into exactly `count`
/// routes with total cost at most `budget` (<= 0: no budget).
inline std::optional<OracleResult> brute_force_routes(const EnumeratedUniverse& u, int count, long long budget,
                                                     const OracleObjective& objective = {}) {
  const std::uint64_t full = u.elements == 64 ? ~0ULL : ((1ULL << u.elements) - 1);
  std::map<std::uint64_t, std::vector<int>> by_mask;
  for (int c = 0; c < static_cast<int>(u.columns.size()); ++c) by_mask[u.columns[c].mask].push_back(c);
  std::optional<OracleResult> best;
  std::vector<int> chosen;
  std::vector<long long> payoffs;
  std::function<void(std::uint64_t, long long)> rec = [&](std::uint64_t covered, long long cost) {
    if (covered == full) {
      if (static_cast<int>(chosen.size()) != count) return;
      long long v = objective(payoffs);
      if (!best || v < best->objective) best = OracleResult{v, chosen};
      return;
    }
    if (static_cast<int>(chosen.size()) == count) return;
    int first = 0;
    while (covered & (1ULL << first)) ++first;
    for (const auto& [mask, cols] : by_mask) {
      if (!(mask & (1ULL << first)) || (mask & covered)) continue;
      for (int c : cols) {
        long long nc = cost + u.columns[c].cost;
        if (budget > 0 && nc > budget) continue;
        chosen.push_back(c);
        payoffs.push_back(u.columns[c].payoff);
        rec(covered | mask, nc);
        chosen.pop_back();
        payoffs.pop_back();
      }
    }
  };
  rec(0, 0);
  return best;
}

/// Exact optimum choosing one column per agent (empty allowed), covering
/// every job once, with total profit (column cost) at least `floor`.
inline std::optional<OracleResult> brute_force_assignments(const EnumeratedUniverse& u, int agents, long long floor,
                                                          const OracleObjective& objective = {}) {
  const std::uint64_t full = (1ULL << u.elements) - 1;
  std::vector<std::vector<int>> of(agents);
  for (int c = 0; c < static_cast<int>(u.columns.size()); ++c) of[u.columns[c].owner].push_back(c);
  std::optional<OracleResult> best;
  std::vector<int> chosen;
  std::vector<long long> payoffs;
  std::function<void(int, std::uint64_t, long long)> rec = [&](int i, std::uint64_t covered, long long profit) {
    if (i == agents) {
      if (covered != full || profit < floor) return;
      long long v = objective(payoffs);
      if (!best || v < best->objective) best = OracleResult{v, chosen};
      return;
    }
    for (int c : of[i]) {
      if (u.columns[c].mask & covered) continue;
      chosen.push_back(c);
      payoffs.push_back(u.columns[c].payoff);
      rec(i + 1, covered | u.columns[c].mask, profit + u.columns[c].cost);
      chosen.pop_back();
      payoffs.pop_back();
    }
  };
  rec(0, 0, 0);
  return best;
}

/// Master column for subproblem k built from a universe entry.
inline Column to_column(const UniverseColumn& uc, int subproblem) {
  Column c;
  c.subproblem = subproblem;
  c.cost = static_cast<double>(uc.cost);
  c.payoff = static_cast<double>(uc.payoff);
  std::vector<int> el;
  for (int e = 0; e < 64; ++e)
    if (uc.mask & (1ULL << e)) el.push_back(e);
  c.set_elements(el);
  c.payload = uc.payload;
  return c;
}

/// LP bound of the plugin's formulation at the root with every universe
/// column copied into every subproblem that admits it. +inf if infeasible.
inline double full_lp_bound(const Plugin& plugin, const EnumeratedUniverse& u) {
  const MasterLayout& layout = plugin.layout();
  NodeRestrictions restr = plugin.root_restrictions();
  MasterProblem master(layout, restr, false);
  int id = 0;
  for (const auto& uc : u.columns)
    for (int k = 0; k < layout.num_subproblems; ++k) {
      if (uc.owner >= 0 && uc.owner != k) continue;
      Column c = to_column(uc, k);
      if (!restr.admits(c) || !plugin.admits(c, restr)) continue;
      c.id = id++;
      master.add_column(c);
    }
  auto sol = lp::solve(master.model());
  if (sol.status == lp::LpStatus::kInfeasible) return kInf;
  if (sol.status != lp::LpStatus::kOptimal) throw InconsistencyError("full LP did not solve");
  return sol.objective;
}

/// Minimum reduced cost over universe columns a subproblem admits.
inline std::optional<double> min_reduced_cost(const PricingRequest& req, const EnumeratedUniverse& u,
                                              const std::function<bool(const Column&)>& admissible) {
  std::optional<double> best;
  for (const auto& uc : u.columns) {
    if (uc.owner >= 0 && uc.owner != req.subproblem) continue;
    Column c = to_column(uc, req.subproblem);
    if (!admissible(c)) continue;
    double rc = req.reduced_cost(c);
    if (!best || rc < *best) best = rc;
  }
  return best;
}

}  // namespace fairbnp::oracle
