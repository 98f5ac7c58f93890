#pragma once

// ESPPRC labeling for route pricing: ng-path memory, optional bidirectional
// extension with a merge at half capacity, and distance windows.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "fairbnp/colgen/column.hpp"
#include "fairbnp/common.hpp"
#include "fairbnp/cvrp/held_karp.hpp"
#include "fairbnp/cvrp/instance.hpp"

namespace fairbnp::cvrp {

inline long long route_distance(const CvrpInstance& inst, const Route& r) {
  long long s = 0;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) s += inst.dist[r[i]][r[i + 1]];
  return s;
}

inline long long route_cost(const CvrpInstance& inst, const Route& r) {
  long long s = 0;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) s += inst.cost[r[i]][r[i + 1]];
  return s;
}

inline int route_load(const CvrpInstance& inst, const Route& r) {
  int q = 0;
  for (int v : r) q += inst.demand[v];
  return q;
}

inline bool is_elementary(const Route& r) {
  std::vector<int> c(r.begin() + 1, r.end() - 1);
  std::sort(c.begin(), c.end());
  return std::adjacent_find(c.begin(), c.end()) == c.end();
}

/// Route as a master column; elements are customers shifted to 0-based.
inline Column route_column(const CvrpInstance& inst, const Route& r, int subproblem) {
  if (r.size() < 3 || r.front() != 0 || r.back() != 0) throw ConfigError("route must leave and return to the depot");
  std::vector<int> visited;
  for (std::size_t i = 1; i + 1 < r.size(); ++i) {
    if (r[i] <= 0 || r[i] > inst.num_customers()) throw ConfigError("route visits an unknown vertex");
    visited.push_back(r[i] - 1);
  }
  Column c;
  c.subproblem = subproblem;
  c.cost = static_cast<double>(route_cost(inst, r));
  c.payoff = static_cast<double>(route_distance(inst, r));
  c.set_elements(visited);
  c.payload = r;
  return c;
}

/// ng neighbourhoods: each customer with its nearest customers, `size` in
/// total (the customer itself included).
inline std::vector<ElementSet> ng_neighbourhoods(const CvrpInstance& inst, int size) {
  const int n = inst.num_customers();
  std::vector<ElementSet> ng(n + 1);
  for (int i = 1; i <= n; ++i) {
    std::vector<int> others;
    for (int j = 1; j <= n; ++j)
      if (j != i) others.push_back(j);
    std::stable_sort(others.begin(), others.end(), [&](int a, int b) { return inst.dist[i][a] < inst.dist[i][b]; });
    ng[i].set(i);
    for (int t = 0; t < std::min<int>(size - 1, static_cast<int>(others.size())); ++t) ng[i].set(others[t]);
  }
  return ng;
}

struct Label {
  int v = 0;
  double c = 0.0;
  int q = 0;
  long long d = 0;
  ElementSet pi;  // ng memory (vertex ids)
  int pred = -1;
  bool forward = true;
};

/// Label dominance under the payoff window [lo, hi]: vertex, load, reduced
/// cost and memory as usual, plus the distance clause of the active window.
inline bool dominates(const Label& a, const Label& b, const Window& window) {
  if (a.v != b.v || a.q > b.q || a.c > b.c) return false;
  if (!is_subset(a.pi, b.pi)) return false;
  const bool lower = window.lo > 0.0;
  const bool upper = std::isfinite(window.hi);
  if (!lower && upper) return a.d <= b.d;
  if (lower && !upper) return a.d >= b.d;
  if (lower && upper) return a.d == b.d;
  return true;
}

/// Arc structure of one pricing problem.
struct PricingGraph {
  std::vector<std::vector<char>> allowed;  // allowed[i][j]
  std::vector<double> dual;                // per vertex, 0 at the depot
  double cost_weight = 0.0;
  double payoff_weight = 0.0;
  double constant = 0.0;
  Window window{0.0, kInf};

  double arc(const CvrpInstance& inst, int i, int j) const {
    return cost_weight * static_cast<double>(inst.cost[i][j]) + payoff_weight * static_cast<double>(inst.dist[i][j]) -
           dual[j];
  }
};

struct LabelingOptions {
  bool bidirectional = true;
  bool tsp_optimal = false;  // only routes that are shortest for their customer set
  int max_columns = 20;
  double tol = kTolOpt;
  std::size_t label_limit = 5'000'000;
  std::optional<Clock::time_point> deadline;
};

struct PricedRoute {
  double rc = 0.0;
  Route route;
};

namespace detail {

inline std::vector<long long> shortest_to_depot(const CvrpInstance& inst) {
  const int n = inst.num_vertices();
  auto sp = inst.dist;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) sp[i][j] = std::min(sp[i][j], sp[i][k] + sp[k][j]);
  std::vector<long long> out(n);
  for (int i = 0; i < n; ++i) out[i] = std::min(sp[i][0], sp[0][i]);
  return out;
}

class LabelStore {
 public:
  LabelStore(int vertices, int capacity) : at_(vertices), buckets_(capacity + 1) {}

  std::vector<Label> labels;
  std::vector<char> alive;

  // Inserts unless dominated; removes labels the new one dominates.
  int insert(const Label& l, const Window& w, bool tsp) {
    auto& bucket = at_[l.v];
    for (int idx : bucket)
      if (alive[idx] && dom(labels[idx], l, w, tsp)) return -1;
    int id = static_cast<int>(labels.size());
    labels.push_back(l);
    alive.push_back(1);
    std::size_t keep = 0;
    for (int idx : bucket) {
      if (alive[idx] && dom(l, labels[idx], w, tsp)) alive[idx] = 0;
      if (alive[idx]) bucket[keep++] = idx;
    }
    bucket.resize(keep);
    bucket.push_back(id);
    buckets_[l.q].push_back(id);
    return id;
  }

  const std::vector<int>& bucket(int q) const { return buckets_[q]; }
  const std::vector<int>& at(int v) const { return at_[v]; }
  int capacity() const { return static_cast<int>(buckets_.size()) - 1; }

 private:
  static bool dom(const Label& a, const Label& b, const Window& w, bool tsp) {
    if (!tsp) return dominates(a, b, w);
    if (a.v != b.v || a.pi != b.pi) return false;
    return a.d < b.d || (a.d == b.d && a.c <= b.c);
  }

  std::vector<std::vector<int>> at_;
  std::vector<std::vector<int>> buckets_;
};

inline Route trace(const std::vector<Label>& labels, int id) {
  Route r;
  for (; id >= 0; id = labels[id].pred) r.push_back(labels[id].v);
  return r;
}

// Runs one direction. Backward labels describe suffixes read in reverse.
inline void extend_all(const CvrpInstance& inst, const PricingGraph& g, const std::vector<ElementSet>& ng,
                       const std::vector<long long>& sp0, bool forward, int load_limit, bool tsp, LabelStore& store,
                       const LabelingOptions& opt) {
  const int n = inst.num_customers();
  const double hi = g.window.hi;
  Label root;
  root.forward = forward;
  store.insert(root, g.window, tsp);
  for (int q = 0; q <= store.capacity(); ++q) {
    for (std::size_t b = 0; b < store.bucket(q).size(); ++b) {
      int id = store.bucket(q)[b];
      if (!store.alive[id]) continue;
      Label l = store.labels[id];
      if (l.q > load_limit) continue;
      for (int j = 1; j <= n; ++j) {
        if (!(forward ? g.allowed[l.v][j] : g.allowed[j][l.v])) continue;
        if (l.pi.test(j)) continue;
        int nq = l.q + inst.demand[j];
        if (nq > inst.capacity) continue;
        long long nd = l.d + (forward ? inst.dist[l.v][j] : inst.dist[j][l.v]);
        if (static_cast<double>(nd + sp0[j]) > hi) continue;
        Label e;
        e.v = j;
        e.q = nq;
        e.d = nd;
        e.c = l.c + (forward ? g.arc(inst, l.v, j) : g.arc(inst, j, l.v));
        e.pi = tsp ? l.pi : (l.pi & ng[j]);
        e.pi.set(j);
        e.pred = id;
        e.forward = forward;
        store.insert(e, g.window, tsp);
        if (store.labels.size() > opt.label_limit) throw SizeCapError("labeling exceeded its label limit");
        if (opt.deadline && (store.labels.size() & 1023) == 0 && Clock::now() >= *opt.deadline) throw PricingTimeout();
      }
    }
  }
}

inline void keep_best(std::vector<PricedRoute>& out, std::unordered_set<std::string>& seen, double rc, Route r) {
  std::string key;
  for (int v : r) key += std::to_string(v) + ',';
  if (!seen.insert(key).second) return;
  out.push_back({rc, std::move(r)});
}

}  // namespace detail

/// Routes with reduced cost below -tol, best first, at most max_columns.
/// With `all_negative` the cap is ignored (used by tests).
inline std::vector<PricedRoute> run_labeling(const CvrpInstance& inst, const PricingGraph& g,
                                             const std::vector<ElementSet>& ng, const LabelingOptions& opt,
                                             bool all_negative = false) {
  const auto sp0 = detail::shortest_to_depot(inst);
  const int n = inst.num_customers();
  const double lo = g.window.lo, hi = g.window.hi;
  std::vector<PricedRoute> found;
  std::unordered_set<std::string> seen;
  auto accept = [&](double rc, long long d) {
    double dd = static_cast<double>(d);
    return rc < -opt.tol && dd >= lo - 1e-9 && dd <= hi + 1e-9;
  };

  const bool bidir = opt.bidirectional && !opt.tsp_optimal;
  detail::LabelStore fw(n + 1, inst.capacity);
  detail::extend_all(inst, g, ng, sp0, true, bidir ? inst.capacity / 2 : inst.capacity, opt.tsp_optimal, fw, opt);

  if (opt.tsp_optimal) {
    // shortest completion per customer set decides which routes qualify
    struct Best {
      long long d;
      std::vector<std::pair<double, Route>> routes;
    };
    std::vector<std::pair<ElementSet, Best>> by_set;
    auto find = [&](const ElementSet& s) -> Best* {
      for (auto& [k, b] : by_set)
        if (k == s) return &b;
      return nullptr;
    };
    for (int v = 1; v <= n; ++v) {
      if (!g.allowed[v][0]) continue;
      for (int id : fw.at(v)) {
        if (!fw.alive[id]) continue;
        const Label& l = fw.labels[id];
        long long d = l.d + inst.dist[v][0];
        double rc = g.constant + l.c + g.arc(inst, v, 0);
        Route r = detail::trace(fw.labels, id);
        std::reverse(r.begin(), r.end());
        r.push_back(0);
        Best* b = find(l.pi);
        if (!b) {
          by_set.push_back({l.pi, Best{d, {}}});
          b = &by_set.back().second;
        }
        if (d < b->d) {
          b->d = d;
          b->routes.clear();
        }
        if (d == b->d) b->routes.emplace_back(rc, std::move(r));
      }
    }
    // arc fixings may hide the true shortest order, so check it directly
    for (auto& [s, b] : by_set) {
      if (b.routes.empty()) continue;
      std::vector<int> cust(b.routes.front().second.begin() + 1, b.routes.front().second.end() - 1);
      if (route_distance(inst, shortest_tour(inst, cust)) < b.d) continue;
      for (auto& [rc, r] : b.routes)
        if (accept(rc, b.d)) detail::keep_best(found, seen, rc, std::move(r));
    }
  } else if (!bidir) {
    for (int v = 1; v <= n; ++v) {
      if (!g.allowed[v][0]) continue;
      for (int id : fw.at(v)) {
        if (!fw.alive[id]) continue;
        const Label& l = fw.labels[id];
        double rc = g.constant + l.c + g.arc(inst, v, 0);
        if (!accept(rc, l.d + inst.dist[v][0])) continue;
        Route r = detail::trace(fw.labels, id);
        std::reverse(r.begin(), r.end());
        r.push_back(0);
        detail::keep_best(found, seen, rc, std::move(r));
      }
    }
  } else {
    detail::LabelStore bw(n + 1, inst.capacity);
    detail::extend_all(inst, g, ng, sp0, false, inst.capacity / 2, false, bw, opt);
    for (int i = 0; i <= n; ++i) {
      if (opt.deadline && Clock::now() >= *opt.deadline) throw PricingTimeout();
      for (int fid : fw.at(i)) {
        if (!fw.alive[fid]) continue;
        const Label& f = fw.labels[fid];
        for (int j = 0; j <= n; ++j) {
          if (i == j || !g.allowed[i][j]) continue;
          for (int bid : bw.at(j)) {
            if (!bw.alive[bid]) continue;
            const Label& b = bw.labels[bid];
            if (f.q + b.q > inst.capacity) continue;
            if ((f.pi & b.pi).any()) continue;
            double rc = g.constant + f.c + g.arc(inst, i, j) + b.c;
            if (!accept(rc, f.d + inst.dist[i][j] + b.d)) continue;
            Route r = detail::trace(fw.labels, fid);
            std::reverse(r.begin(), r.end());
            Route tail = detail::trace(bw.labels, bid);
            r.insert(r.end(), tail.begin(), tail.end());
            if (r.size() < 3) continue;
            detail::keep_best(found, seen, rc, std::move(r));
          }
        }
      }
    }
  }
  std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.rc < b.rc; });
  if (!all_negative && static_cast<int>(found.size()) > opt.max_columns) found.resize(opt.max_columns);
  return found;
}

}  // namespace fairbnp::cvrp
