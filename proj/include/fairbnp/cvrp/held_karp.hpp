#pragma once

// Held-Karp shortest depot tour over a customer set.

#include <cstdint>
#include <limits>
#include <vector>

#include "fairbnp/common.hpp"
#include "fairbnp/cvrp/instance.hpp"

namespace fairbnp::cvrp {

using Route = std::vector<int>;  // vertex sequence, depot at both ends

inline constexpr int kTspCap = 14;

/// Shortest depot tour through `customers` (Held-Karp on distances).
inline Route shortest_tour(const CvrpInstance& inst, const std::vector<int>& customers) {
  const int m = static_cast<int>(customers.size());
  if (m > kTspCap) throw SizeCapError("route too long for exact reordering");
  if (m == 0) return {0, 0};
  const long long inf = std::numeric_limits<long long>::max() / 4;
  const std::uint32_t full = (1u << m) - 1;
  std::vector<std::vector<long long>> f(1u << m, std::vector<long long>(m, inf));
  std::vector<std::vector<int>> from(1u << m, std::vector<int>(m, -1));
  for (int j = 0; j < m; ++j) f[1u << j][j] = inst.dist[0][customers[j]];
  for (std::uint32_t s = 1; s <= full; ++s)
    for (int j = 0; j < m; ++j) {
      if (!(s & (1u << j)) || f[s][j] >= inf) continue;
      for (int k = 0; k < m; ++k) {
        if (s & (1u << k)) continue;
        long long v = f[s][j] + inst.dist[customers[j]][customers[k]];
        std::uint32_t t = s | (1u << k);
        if (v < f[t][k]) {
          f[t][k] = v;
          from[t][k] = j;
        }
      }
    }
  int last = 0;
  for (int j = 1; j < m; ++j)
    if (f[full][j] + inst.dist[customers[j]][0] < f[full][last] + inst.dist[customers[last]][0]) last = j;
  Route r{0};
  std::vector<int> rev;
  for (std::uint32_t s = full; last >= 0;) {
    rev.push_back(customers[last]);
    int p = from[s][last];
    s &= ~(1u << last);
    last = p;
  }
  r.insert(r.end(), rev.rbegin(), rev.rend());
  r.push_back(0);
  return r;
}

}  // namespace fairbnp::cvrp
