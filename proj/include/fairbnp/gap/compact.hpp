#pragma once

// Exhaustive solver of the compact F-GAP model over all job-to-agent maps.

#include <algorithm>
#include <optional>
#include <vector>

#include "fairbnp/common.hpp"
#include "fairbnp/gap/instance.hpp"

namespace fairbnp::gap {

inline constexpr int kCompactJobCap = 12;

struct CompactSolution {
  long long range = 0;
  long long profit = 0;
  std::vector<int> agent_of;  // per job
};

namespace detail {

template <class Visit>
void for_each_assignment(const GapInstance& g, Visit&& visit) {
  if (g.jobs > kCompactJobCap) throw SizeCapError("compact oracle is limited to 12 jobs");
  std::vector<int> agent_of(g.jobs, 0);
  std::vector<long long> load(g.agents, 0);
  long long profit = 0;
  auto rec = [&](auto& self, int j) -> void {
    if (j == g.jobs) {
      visit(agent_of, load, profit);
      return;
    }
    for (int i = 0; i < g.agents; ++i) {
      if (load[i] + g.consumption[i][j] > g.capacity[i]) continue;
      agent_of[j] = i;
      load[i] += g.consumption[i][j];
      profit += g.profit[i][j];
      self(self, j + 1);
      load[i] -= g.consumption[i][j];
      profit -= g.profit[i][j];
    }
  };
  rec(rec, 0);
}

}  // namespace detail

/// Minimum load range subject to the profit floor; nullopt if infeasible.
inline std::optional<CompactSolution> solve_compact_oracle(const GapInstance& g) {
  std::optional<CompactSolution> best;
  detail::for_each_assignment(g, [&](const std::vector<int>& agent_of, const std::vector<long long>& load, long long profit) {
    if (profit < g.profit_floor) return;
    auto [lo, hi] = std::minmax_element(load.begin(), load.end());
    long long r = *hi - *lo;
    if (!best || r < best->range) best = CompactSolution{r, profit, agent_of};
  });
  return best;
}

inline std::optional<long long> compact_max_profit(const GapInstance& g) {
  std::optional<long long> best;
  detail::for_each_assignment(g, [&](const std::vector<int>&, const std::vector<long long>&, long long profit) {
    if (!best || profit > *best) best = profit;
  });
  return best;
}

}  // namespace fairbnp::gap
