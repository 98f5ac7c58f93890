#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "fairbnp/bnp/decision.hpp"
#include "fairbnp/bnp/range_order.hpp"
#include "fairbnp/colgen/column.hpp"
#include "fairbnp/colgen/master.hpp"
#include "fairbnp/common.hpp"
#include "fairbnp/objective/order_weights.hpp"

namespace fairbnp {

/// Optimal restricted-master point of a node, in pool terms.
struct NodeSolution {
  const ColumnPool* pool = nullptr;
  std::vector<std::pair<int, double>> support;  // (pool id, value > tol)
  double objective = 0.0;
  double eta = 0.0;
  double gamma = 0.0;
  std::vector<double> z;

  const Column& column(int id) const { return (*pool)[id]; }
};

/// Problem-specific part of a branch-and-price run.
class Plugin {
 public:
  virtual ~Plugin() = default;

  virtual const MasterLayout& layout() const = 0;
  virtual std::vector<Column> initial_columns() const { return {}; }
  virtual NodeRestrictions root_restrictions() const { return NodeRestrictions::root(layout()); }

  /// Columns of request.subproblem with negative reduced cost (may be empty).
  /// Called concurrently for distinct subproblems.
  virtual std::vector<Column> price(const PricingRequest& req) const = 0;

  /// Admission beyond windows and element sets (arc fixings).
  virtual bool admits(const Column&, const NodeRestrictions&) const { return true; }

  virtual void apply(const Decision& d, NodeRestrictions&) const {
    throw InconsistencyError("plugin cannot apply " + describe(d));
  }

  /// Problem-specific branching; nullopt only if the solution is integral.
  virtual std::optional<ChildDecisions> branch(const NodeSolution&, const NodeRestrictions&) const = 0;

  virtual bool is_integral(const NodeSolution& sol) const {
    return std::all_of(sol.support.begin(), sol.support.end(),
                       [](const auto& p) { return std::abs(p.second - 1.0) <= kTolIntegral || p.second <= kTolIntegral; });
  }

  virtual bool integer_payoffs() const { return true; }
  virtual bool integer_costs() const { return true; }

  /// Lower bound reported before the root is solved.
  virtual double trivial_lower_bound() const {
    return layout().objective == ObjectiveKind::kColumnCost ? -kInf : 0.0;
  }
};

inline bool integer_objective(const Plugin& plugin) {
  const auto& l = plugin.layout();
  if (l.objective == ObjectiveKind::kColumnCost) return plugin.integer_costs();
  if (l.objective == ObjectiveKind::kOrder && !l.weights.integral()) return false;
  return plugin.integer_payoffs();
}

/// Payoff of every subproblem (or of every selected column for the
/// total-count layout) in an integral selection.
inline std::vector<double> selection_payoffs(const MasterLayout& layout, const std::vector<const Column*>& cols) {
  std::vector<double> payoffs;
  if (layout.convexity == ConvexityKind::kTotalCount) {
    for (const Column* c : cols) payoffs.push_back(c->payoff);
    return payoffs;
  }
  payoffs.assign(layout.num_subproblems, 0.0);
  for (const Column* c : cols) payoffs[c->subproblem] += c->payoff;
  return payoffs;
}

/// True objective of an integral selection, recomputed from the columns.
inline double selection_objective(const MasterLayout& layout, const std::vector<const Column*>& cols) {
  if (layout.objective == ObjectiveKind::kColumnCost) {
    double s = 0.0;
    for (const Column* c : cols) s += layout.cost_sign * c->cost;
    return s;
  }
  auto payoffs = selection_payoffs(layout, cols);
  if (payoffs.empty()) return 0.0;
  if (layout.objective == ObjectiveKind::kOrder) return evaluate(layout.weights, payoffs);
  auto [lo, hi] = std::minmax_element(payoffs.begin(), payoffs.end());
  return *hi - *lo;
}

inline RangeView range_view(const NodeSolution& sol, double tol = kTolFeas) {
  RangeView v;
  v.eta = sol.eta;
  v.gamma = sol.gamma;
  for (const auto& [id, x] : sol.support)
    if (x > tol) v.support.push_back(sol.column(id).payoff);
  return v;
}

inline OrderView order_view(const NodeSolution& sol, int positions, double tol = kTolFeas) {
  OrderView v;
  v.y.resize(positions);
  v.z = sol.z;
  for (const auto& [id, x] : sol.support)
    if (x > tol) v.y[sol.column(id).subproblem].emplace_back(sol.column(id).payoff, x);
  return v;
}

}  // namespace fairbnp
