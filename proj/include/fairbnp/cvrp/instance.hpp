#pragma once

// F-CVRP instance: vertex 0 is the depot, customers are 1..n.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <numeric>
#include <random>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fairbnp/common.hpp"

namespace fairbnp::cvrp {

inline constexpr int kMaxCustomers = 120;

struct Point {
  long long x = 0;
  long long y = 0;
};

struct CvrpInstance {
  std::string name;
  std::vector<Point> coords;  // [0] is the depot
  std::vector<int> demand;    // demand[0] = 0
  int capacity = 0;
  int vehicles = 0;
  std::vector<std::vector<long long>> cost;
  std::vector<std::vector<long long>> dist;
  long long budget = 0;           // 0: no budget row
  long long efficient_cost = 0;   // cost-efficient optimum when known

  int num_customers() const { return static_cast<int>(coords.size()) - 1; }
  int num_vertices() const { return static_cast<int>(coords.size()); }
  long long total_demand() const { return std::accumulate(demand.begin(), demand.end(), 0LL); }
};

inline long long rounded_euclidean(const Point& a, const Point& b) {
  double dx = static_cast<double>(a.x - b.x), dy = static_cast<double>(a.y - b.y);
  return std::llround(std::sqrt(dx * dx + dy * dy));
}

/// Demands fit into `bins` bins of size `cap`.
inline bool packable(std::vector<int> items, int bins, int cap) {
  if (bins <= 0) return items.empty();
  std::sort(items.rbegin(), items.rend());
  if (!items.empty() && items.front() > cap) return false;
  std::vector<int> load(bins, 0);
  std::function<bool(std::size_t)> place = [&](std::size_t i) {
    if (i == items.size()) return true;
    for (int b = 0; b < bins; ++b) {
      if (load[b] + items[i] > cap) continue;
      // identical loads are interchangeable
      bool seen = false;
      for (int c = 0; c < b; ++c)
        if (load[c] == load[b]) seen = true;
      if (seen) continue;
      load[b] += items[i];
      if (place(i + 1)) return true;
      load[b] -= items[i];
      if (load[b] == 0) break;
    }
    return false;
  };
  return place(0);
}

/// Smallest capacity >= ceil(total demand / K) that admits a K-packing.
inline int minimal_capacity(const std::vector<int>& customer_demands, int vehicles) {
  if (vehicles <= 0) throw ConfigError("vehicle count must be positive");
  long long total = std::accumulate(customer_demands.begin(), customer_demands.end(), 0LL);
  int q = static_cast<int>((total + vehicles - 1) / vehicles);
  for (int d : customer_demands) q = std::max(q, d);
  while (!packable(customer_demands, vehicles, q)) ++q;
  return q;
}

inline void fill_matrices(CvrpInstance& inst) {
  const int n = inst.num_vertices();
  inst.dist.assign(n, std::vector<long long>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inst.dist[i][j] = i == j ? 0 : rounded_euclidean(inst.coords[i], inst.coords[j]);
  inst.cost = inst.dist;
}

inline void validate(const CvrpInstance& inst) {
  const int n = inst.num_customers();
  if (n < 1) throw ConfigError("instance has no customers");
  if (n > kMaxCustomers) throw SizeCapError("too many customers");
  if (static_cast<int>(inst.demand.size()) != n + 1) throw ConfigError("demand vector size mismatch");
  if (inst.demand[0] != 0) throw ConfigError("depot demand must be zero");
  for (int i = 1; i <= n; ++i)
    if (inst.demand[i] <= 0) throw ConfigError("customer demands must be positive");
  if (inst.capacity <= 0) throw ConfigError("capacity must be positive");
  if (inst.vehicles <= 0) throw ConfigError("vehicle count must be positive");
  if (inst.vehicles > n) throw ConfigError("more vehicles than customers");
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      if (inst.dist[i][j] < 0 || inst.cost[i][j] < 0) throw ConfigError("negative arc length");
      if (inst.dist[i][j] != inst.dist[j][i]) throw ConfigError("distances must be symmetric");
    }
}

/// Builds an instance with rounded Euclidean distances and c = p. A zero
/// capacity selects the minimal feasible one.
inline CvrpInstance make_instance(std::vector<Point> coords, std::vector<int> customer_demands, int vehicles,
                                  int capacity = 0, std::string name = "cvrp") {
  CvrpInstance inst;
  inst.name = std::move(name);
  inst.coords = std::move(coords);
  inst.demand.push_back(0);
  inst.demand.insert(inst.demand.end(), customer_demands.begin(), customer_demands.end());
  inst.vehicles = vehicles;
  inst.capacity = capacity > 0 ? capacity : minimal_capacity(customer_demands, vehicles);
  fill_matrices(inst);
  validate(inst);
  return inst;
}

/// Uniform points on a grid with demands in [1, max_demand] and the minimal
/// feasible capacity.
inline CvrpInstance random_instance(int customers, int vehicles, unsigned long long seed, int grid = 100,
                                    int max_demand = 10) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long long> coord(0, grid);
  std::uniform_int_distribution<int> dem(1, max_demand);
  std::vector<Point> pts;
  for (int i = 0; i <= customers; ++i) pts.push_back({coord(rng), coord(rng)});
  std::vector<int> d;
  for (int i = 0; i < customers; ++i) d.push_back(dem(rng));
  return make_instance(std::move(pts), std::move(d), vehicles, 0,
                       "rand-n" + std::to_string(customers) + "-k" + std::to_string(vehicles) + "-s" + std::to_string(seed));
}

/// TSPLIB/CVRPLIB reader. Extra keys VEHICLES, BUDGET and EFFICIENT_COST
/// are understood; the depot is moved to vertex 0.
inline CvrpInstance read_tsplib(std::istream& in) {
  std::map<std::string, std::string> header;
  std::vector<std::pair<int, Point>> nodes;
  std::map<int, int> demands;
  std::vector<int> depots;
  std::string line;
  std::string section;
  while (std::getline(in, line)) {
    std::string trimmed = line;
    trimmed.erase(0, trimmed.find_first_not_of(" \t\r"));
    trimmed.erase(trimmed.find_last_not_of(" \t\r") + 1);
    if (trimmed.empty()) continue;
    if (trimmed == "EOF") break;
    if (trimmed.find("_SECTION") != std::string::npos) {
      section = trimmed.substr(0, trimmed.find("_SECTION"));
      continue;
    }
    auto colon = trimmed.find(':');
    if (colon != std::string::npos && !std::isdigit(static_cast<unsigned char>(trimmed[0])) && trimmed[0] != '-') {
      std::string key = trimmed.substr(0, colon), value = trimmed.substr(colon + 1);
      key.erase(key.find_last_not_of(" \t") + 1);
      value.erase(0, value.find_first_not_of(" \t"));
      header[key] = value;
      section.clear();
      continue;
    }
    std::istringstream ls(trimmed);
    if (section == "NODE_COORD") {
      int id;
      double x, y;
      if (!(ls >> id >> x >> y)) throw ConfigError("bad coordinate line: " + trimmed);
      nodes.push_back({id, Point{std::llround(x), std::llround(y)}});
    } else if (section == "DEMAND") {
      int id, d;
      if (!(ls >> id >> d)) throw ConfigError("bad demand line: " + trimmed);
      demands[id] = d;
    } else if (section == "DEPOT") {
      int id;
      while (ls >> id)
        if (id >= 0) depots.push_back(id);
    } else {
      throw ConfigError("unexpected line: " + trimmed);
    }
  }
  if (!header.count("DIMENSION")) throw ConfigError("missing DIMENSION");
  if (!header.count("CAPACITY")) throw ConfigError("missing CAPACITY");
  if (header.count("EDGE_WEIGHT_TYPE") && header["EDGE_WEIGHT_TYPE"] != "EUC_2D")
    throw ConfigError("only EUC_2D instances are supported");
  const int dim = std::stoi(header["DIMENSION"]);
  if (static_cast<int>(nodes.size()) != dim) throw ConfigError("coordinate count does not match DIMENSION");
  int depot = depots.empty() ? nodes.front().first : depots.front();

  CvrpInstance inst;
  inst.name = header.count("NAME") ? header["NAME"] : "cvrp";
  std::vector<int> order{depot};
  for (const auto& [id, p] : nodes)
    if (id != depot) order.push_back(id);
  std::map<int, Point> by_id(nodes.begin(), nodes.end());
  for (int id : order) {
    if (!by_id.count(id)) throw ConfigError("depot id not among the nodes");
    inst.coords.push_back(by_id[id]);
    inst.demand.push_back(id == depot ? 0 : demands.count(id) ? demands[id] : 0);
  }
  inst.capacity = std::stoi(header["CAPACITY"]);
  if (header.count("VEHICLES")) inst.vehicles = std::stoi(header["VEHICLES"]);
  if (header.count("BUDGET")) inst.budget = std::stoll(header["BUDGET"]);
  if (header.count("EFFICIENT_COST")) inst.efficient_cost = std::stoll(header["EFFICIENT_COST"]);
  if (inst.vehicles == 0) {
    // CVRPLIB names carry the fleet size as -kK
    auto k = inst.name.rfind("-k");
    if (k != std::string::npos) inst.vehicles = std::stoi(inst.name.substr(k + 2));
  }
  fill_matrices(inst);
  validate(inst);
  return inst;
}

inline CvrpInstance read_tsplib_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  return read_tsplib(in);
}

inline void write_tsplib(std::ostream& out, const CvrpInstance& inst) {
  out << "NAME : " << inst.name << "\n";
  out << "TYPE : CVRP\n";
  out << "DIMENSION : " << inst.num_vertices() << "\n";
  out << "EDGE_WEIGHT_TYPE : EUC_2D\n";
  out << "CAPACITY : " << inst.capacity << "\n";
  out << "VEHICLES : " << inst.vehicles << "\n";
  if (inst.budget > 0) out << "BUDGET : " << inst.budget << "\n";
  if (inst.efficient_cost > 0) out << "EFFICIENT_COST : " << inst.efficient_cost << "\n";
  out << "NODE_COORD_SECTION\n";
  for (int i = 0; i < inst.num_vertices(); ++i) out << i + 1 << " " << inst.coords[i].x << " " << inst.coords[i].y << "\n";
  out << "DEMAND_SECTION\n";
  for (int i = 0; i < inst.num_vertices(); ++i) out << i + 1 << " " << inst.demand[i] << "\n";
  out << "DEPOT_SECTION\n1\n-1\nEOF\n";
}

/// Budget as ceil(percent / 100 * efficient cost), in integers.
inline long long budget_from_percent(long long efficient_cost, int percent) {
  if (percent < 100) throw ConfigError("budget percentage below 100");
  return (efficient_cost * percent + 99) / 100;
}

}  // namespace fairbnp::cvrp
