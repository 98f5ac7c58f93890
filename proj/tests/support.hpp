#pragma once

// Random pricing requests and completion enumeration shared by the CVRP
// tests and the acceptance run.

#include <random>
#include <vector>

#include "fairbnp/cvrp/plugin.hpp"

namespace fairbnp::testing {

using cvrp::CvrpInstance;
using cvrp::CvrpPlugin;

struct Completion {
  int load = 0;
  long long dist = 0;
  double rc = 0.0;
  ElementSet visited;
};

// Elementary completions from v back to the depot over allowed vertices.
inline void completions(const CvrpInstance& inst, const std::vector<std::vector<double>>& arc, int v,
                        const ElementSet& blocked, Completion cur, std::vector<Completion>& out) {
  Completion home = cur;
  home.dist += inst.dist[v][0];
  home.rc += arc[v][0];
  out.push_back(home);
  for (int j = 1; j <= inst.num_customers(); ++j) {
    if (j == v || blocked.test(j) || cur.visited.test(j)) continue;
    Completion nx = cur;
    nx.visited.set(j);
    nx.load += inst.demand[j];
    nx.dist += inst.dist[v][j];
    nx.rc += arc[v][j];
    completions(inst, arc, j, blocked, nx, out);
  }
}

struct RandomPricing {
  PricingRequest req;
  NodeRestrictions restr;
};

inline RandomPricing random_pricing(const CvrpPlugin& p, std::mt19937_64& rng) {
  const auto& inst = p.instance();
  const int n = inst.num_customers();
  std::uniform_real_distribution<double> dual(0.0, 60.0), w(-1.0, 1.0);
  RandomPricing rp;
  rp.restr = p.root_restrictions();
  auto& req = rp.req;
  req.subproblem = static_cast<int>(rng() % p.layout().num_subproblems);
  req.element_duals.resize(n);
  for (auto& d : req.element_duals) d = dual(rng);
  req.cost_weight = std::abs(w(rng));
  req.payoff_weight = w(rng);
  req.constant = -std::abs(w(rng)) * 20.0;
  double lo = 0.0, hi = kInf;
  switch (rng() % 4) {
    case 1: hi = 40.0 + static_cast<double>(rng() % 200); break;
    case 2:
      lo = static_cast<double>(rng() % 150);
      hi = lo + static_cast<double>(rng() % 120);
      break;
    case 3: lo = static_cast<double>(rng() % 150); break;
    default: break;
  }
  req.window = {lo, hi};
  rp.restr.windows[req.subproblem] = req.window;
  req.removed = rp.restr.removed[req.subproblem];
  if (rng() % 3 == 0) {
    int a = static_cast<int>(rng() % (n + 1)), b = static_cast<int>(rng() % (n + 1));
    if (a != b) {
      if (rng() % 2) {
        rp.restr.forbidden_arcs.emplace_back(a, b);
      } else {
        rp.restr.forced_arcs.emplace_back(a, b);
      }
    }
  }
  req.forbidden_arcs = rp.restr.forbidden_arcs;
  req.forced_arcs = rp.restr.forced_arcs;
  req.max_columns = 1;
  return rp;
}

}  // namespace fairbnp::testing
