#pragma once

// Exact per-route TSP reordering of a finished solution and the budget
// baseline (cost-efficient optimum).

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "fairbnp/bnp/engine.hpp"
#include "fairbnp/cvrp/held_karp.hpp"
#include "fairbnp/cvrp/instance.hpp"
#include "fairbnp/cvrp/labeling.hpp"
#include "fairbnp/cvrp/plugin.hpp"

namespace fairbnp::cvrp {

struct TspPostprocess {
  std::vector<Route> routes;
  std::vector<long long> before;
  std::vector<long long> after;
  std::vector<bool> was_optimal;
  long long range_before = 0;
  long long range_after = 0;
  double delta_r = 0.0;  // % by which the general-route range underestimates
};

inline long long range_of(const std::vector<long long>& d) {
  if (d.empty()) return 0;
  auto [lo, hi] = std::minmax_element(d.begin(), d.end());
  return *hi - *lo;
}

/// Replaces every route with a shortest tour over the same customers. Ties
/// keep the original order.
inline TspPostprocess tsp_postprocess(const CvrpInstance& inst, const std::vector<Route>& routes) {
  TspPostprocess out;
  for (const auto& r : routes) {
    std::vector<int> cust(r.begin() + 1, r.end() - 1);
    long long d0 = route_distance(inst, r);
    Route best = shortest_tour(inst, cust);
    long long d1 = route_distance(inst, best);
    if (d1 > d0) throw InconsistencyError("exact reordering lengthened a route");
    out.was_optimal.push_back(d1 == d0);
    out.routes.push_back(d1 == d0 ? r : best);
    out.before.push_back(d0);
    out.after.push_back(d1);
  }
  out.range_before = range_of(out.before);
  out.range_after = range_of(out.after);
  out.delta_r = out.range_after > 0
                    ? 100.0 * static_cast<double>(out.range_after - out.range_before) / static_cast<double>(out.range_after)
                    : 0.0;
  return out;
}

/// Cost-minimizing baseline run (no budget row, exactly K routes).
inline SolveReport efficient_solution(const CvrpInstance& inst, double time_limit = kInf) {
  CvrpInstance base = inst;
  base.budget = 0;
  CvrpOptions opt;
  opt.formulation = Formulation::kCost;
  CvrpPlugin plugin(base, opt);
  EngineConfig cfg;
  cfg.chain = make_chain(BranchingScheme::kClassical);
  cfg.time_limit = time_limit;
  return solve(plugin, cfg);
}

/// Fills efficient_cost (when unknown) and sets the budget from a percentage.
inline void set_budget(CvrpInstance& inst, int percent, double time_limit = kInf) {
  if (inst.efficient_cost <= 0) {
    auto rep = efficient_solution(inst, time_limit);
    if (rep.status != SolveStatus::kOptimal || !rep.incumbent)
      throw ConfigError("cost-efficient baseline did not finish for " + inst.name);
    inst.efficient_cost = std::llround(*rep.incumbent);
  }
  inst.budget = budget_from_percent(inst.efficient_cost, percent);
}

}  // namespace fairbnp::cvrp
