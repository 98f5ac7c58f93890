#pragma once

// F-GAP instance: n agents, m jobs, integer profits, consumptions and
// capacities, and a profit floor P.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "fairbnp/common.hpp"

namespace fairbnp::gap {

struct GapInstance {
  std::string name = "gap";
  int agents = 0;
  int jobs = 0;
  std::vector<std::vector<long long>> profit;       // [agent][job]
  std::vector<std::vector<long long>> consumption;  // [agent][job]
  std::vector<long long> capacity;                  // [agent]
  long long profit_floor = 0;
};

inline void validate(const GapInstance& g) {
  if (g.agents < 1 || g.jobs < 1) throw ConfigError("instance needs agents and jobs");
  if (g.jobs > 127) throw SizeCapError("too many jobs");
  if (static_cast<int>(g.profit.size()) != g.agents || static_cast<int>(g.consumption.size()) != g.agents ||
      static_cast<int>(g.capacity.size()) != g.agents)
    throw ConfigError("agent dimension mismatch");
  for (int i = 0; i < g.agents; ++i) {
    if (static_cast<int>(g.profit[i].size()) != g.jobs || static_cast<int>(g.consumption[i].size()) != g.jobs)
      throw ConfigError("job dimension mismatch");
    if (g.capacity[i] < 0) throw ConfigError("negative capacity");
    for (int j = 0; j < g.jobs; ++j)
      if (g.consumption[i][j] < 0) throw ConfigError("negative consumption");
  }
}

/// "n m", then n*m profits, n*m consumptions and n capacities.
inline GapInstance read_gap(std::istream& in) {
  GapInstance g;
  if (!(in >> g.agents >> g.jobs)) throw ConfigError("missing GAP header");
  if (g.agents < 1 || g.jobs < 1) throw ConfigError("bad GAP header");
  auto matrix = [&](std::vector<std::vector<long long>>& m) {
    m.assign(g.agents, std::vector<long long>(g.jobs));
    for (auto& row : m)
      for (auto& v : row)
        if (!(in >> v)) throw ConfigError("truncated GAP matrix");
  };
  matrix(g.profit);
  matrix(g.consumption);
  g.capacity.resize(g.agents);
  for (auto& c : g.capacity)
    if (!(in >> c)) throw ConfigError("truncated GAP capacities");
  validate(g);
  return g;
}

inline GapInstance read_gap_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  auto g = read_gap(in);
  g.name = std::filesystem::path(path).stem().string();
  return g;
}

inline void write_gap(std::ostream& out, const GapInstance& g) {
  out << g.agents << " " << g.jobs << "\n";
  for (const auto* m : {&g.profit, &g.consumption})
    for (const auto& row : *m) {
      for (int j = 0; j < g.jobs; ++j) out << (j ? " " : "") << row[j];
      out << "\n";
    }
  for (int i = 0; i < g.agents; ++i) out << (i ? " " : "") << g.capacity[i];
  out << "\n";
}

/// Random instance in the style of the classic class C generator:
/// consumptions in [5, 25], profits in [10, 50], capacities at 80% of the
/// average agent load.
inline GapInstance generate_gap(int agents, int jobs, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long long> cons(5, 25), prof(10, 50);
  GapInstance g;
  g.name = "gap-" + std::to_string(agents) + "x" + std::to_string(jobs) + "-s" + std::to_string(seed);
  g.agents = agents;
  g.jobs = jobs;
  g.profit.assign(agents, std::vector<long long>(jobs));
  g.consumption.assign(agents, std::vector<long long>(jobs));
  for (int i = 0; i < agents; ++i)
    for (int j = 0; j < jobs; ++j) {
      g.consumption[i][j] = cons(rng);
      g.profit[i][j] = prof(rng);
    }
  g.capacity.assign(agents, 0);
  for (int i = 0; i < agents; ++i) {
    long long s = 0;
    for (int j = 0; j < jobs; ++j) s += g.consumption[i][j];
    g.capacity[i] = (8 * s) / (10 * agents);
  }
  validate(g);
  return g;
}

/// ceil((1 - theta) * best_profit) with a guard against representation
/// noise in theta.
inline long long profit_floor(long long best_profit, double theta) {
  if (theta < 0.0 || theta >= 1.0) throw ConfigError("theta must lie in [0, 1)");
  return static_cast<long long>(std::ceil((1.0 - theta) * static_cast<double>(best_profit) - 1e-9));
}

}  // namespace fairbnp::gap
