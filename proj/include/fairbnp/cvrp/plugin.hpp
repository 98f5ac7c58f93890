#pragma once

// F-CVRP branch-and-price plugin. Formulations:
//   vehicle   one pricing problem per vehicle, exact min/max rows
//   customer  one pricing problem per last customer, big-M min rows
//   order     one pricing problem per order position
//   cost      cost-minimizing baseline keyed on the last customer

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairbnp/bnp/plugin.hpp"
#include "fairbnp/cvrp/instance.hpp"
#include "fairbnp/cvrp/labeling.hpp"

namespace fairbnp::cvrp {

enum class Formulation { kVehicle, kCustomer, kOrder, kCost };

inline Formulation parse_formulation(const std::string& s) {
  if (s == "vehicle") return Formulation::kVehicle;
  if (s == "customer") return Formulation::kCustomer;
  if (s == "order") return Formulation::kOrder;
  if (s == "cost") return Formulation::kCost;
  throw ConfigError("unknown formulation: " + s);
}

inline const char* to_string(Formulation f) {
  switch (f) {
    case Formulation::kVehicle: return "vehicle";
    case Formulation::kCustomer: return "customer";
    case Formulation::kOrder: return "order";
    case Formulation::kCost: return "cost";
  }
  return "?";
}

struct CvrpOptions {
  Formulation formulation = Formulation::kCustomer;
  OrderWeights weights;  // order formulation; empty selects range weights
  bool bidirectional = true;
  bool tsp_optimal = false;
  bool symmetry_breaking = true;
  int ng_size = 8;
  double fractional_tol = kTolFeas;
};

/// Payoff bound M: the budget when costs equal distances, otherwise the
/// longest conceivable elementary route.
inline double payoff_bound(const CvrpInstance& inst) {
  if (inst.budget > 0 && inst.cost == inst.dist) return static_cast<double>(inst.budget);
  long long s = 0;
  for (int i = 0; i <= inst.num_customers(); ++i)
    s += *std::max_element(inst.dist[i].begin(), inst.dist[i].end());
  return static_cast<double>(s);
}

class CvrpPlugin : public Plugin {
 public:
  CvrpPlugin(CvrpInstance inst, CvrpOptions opt) : inst_(std::move(inst)), opt_(std::move(opt)) {
    validate(inst_);
    const int n = inst_.num_customers();
    const int K = inst_.vehicles;
    if (n > static_cast<int>(ElementSet{}.size()) - 1) throw SizeCapError("too many customers for the label memory");
    if (inst_.total_demand() > static_cast<long long>(K) * inst_.capacity) infeasible_ = true;
    layout_.num_elements = n;
    if (inst_.budget > 0 && opt_.formulation != Formulation::kCost)
      layout_.side = {true, lp::RowSense::kLessEqual, static_cast<double>(inst_.budget)};
    switch (opt_.formulation) {
      case Formulation::kVehicle:
        layout_.num_subproblems = K;
        layout_.convexity = ConvexityKind::kPerSubproblemEqual;
        layout_.objective = ObjectiveKind::kRange;
        layout_.gamma_form = GammaForm::kExact;
        layout_.payoff_cap = payoff_bound(inst_);
        break;
      case Formulation::kCustomer:
        layout_.num_subproblems = n;
        layout_.convexity = ConvexityKind::kTotalCount;
        layout_.total_count = K;
        layout_.objective = ObjectiveKind::kRange;
        layout_.gamma_form = GammaForm::kBigM;
        layout_.payoff_cap = payoff_bound(inst_);
        break;
      case Formulation::kOrder:
        layout_.num_subproblems = K;
        layout_.convexity = ConvexityKind::kPerSubproblemEqual;
        layout_.objective = ObjectiveKind::kOrder;
        layout_.payoff_cap = payoff_bound(inst_);
        layout_.weights = opt_.weights.size() == 0 ? range_weights(K) : opt_.weights;
        if (layout_.weights.size() != K) throw ConfigError("order weights need one entry per vehicle");
        break;
      case Formulation::kCost:
        layout_.num_subproblems = n;
        layout_.convexity = ConvexityKind::kTotalCount;
        layout_.total_count = K;
        layout_.objective = ObjectiveKind::kColumnCost;
        layout_.payoff_cap = kInf;
        {
          // serving every customer on its own trip bounds any solution cost
          double out_and_back = 0.0;
          for (int i = 1; i <= n; ++i) out_and_back += static_cast<double>(inst_.cost[0][i] + inst_.cost[i][0]);
          layout_.artificial_penalty = 10.0 * std::max(1.0, out_and_back);
        }
        break;
    }
    ng_ = ng_neighbourhoods(inst_, opt_.ng_size);
  }

  const CvrpInstance& instance() const { return inst_; }
  const CvrpOptions& options() const { return opt_; }
  const MasterLayout& layout() const override { return layout_; }

  bool keyed_on_last_customer() const {
    return opt_.formulation == Formulation::kCustomer || opt_.formulation == Formulation::kCost;
  }

  NodeRestrictions root_restrictions() const override {
    auto r = NodeRestrictions::root(layout_);
    if (infeasible_) r.eta = {1.0, 0.0};
    if (opt_.formulation == Formulation::kVehicle && opt_.symmetry_breaking)
      for (int k = 0; k < layout_.num_subproblems; ++k)
        for (int e = 0; e < k; ++e) r.removed[k].set(e);
    return r;
  }

  /// Customer i (1-based) behind element i - 1 may serve subproblem k.
  bool arc_allowed(int i, int j, int subproblem, const std::vector<std::pair<int, int>>& forbidden,
                   const std::vector<std::pair<int, int>>& forced) const {
    if (i == j) return false;
    if (keyed_on_last_customer()) {
      int last = subproblem + 1;
      if (i == 0 && j > last) return false;
      if (j == 0 && i != last) return false;
    }
    for (const auto& [a, b] : forbidden)
      if (a == i && b == j) return false;
    for (const auto& [a, b] : forced) {
      if (a == i && b == j) continue;
      if (a != 0 && a == i) return false;
      if (b != 0 && b == j) return false;
    }
    return true;
  }

  PricingGraph graph(const PricingRequest& req) const {
    const int n = inst_.num_customers();
    PricingGraph g;
    g.allowed.assign(n + 1, std::vector<char>(n + 1, 0));
    for (int i = 0; i <= n; ++i) {
      if (i > 0 && req.removed.test(i - 1)) continue;
      for (int j = 0; j <= n; ++j) {
        if (j > 0 && req.removed.test(j - 1)) continue;
        g.allowed[i][j] = arc_allowed(i, j, req.subproblem, req.forbidden_arcs, req.forced_arcs);
      }
    }
    g.dual.assign(n + 1, 0.0);
    for (int i = 1; i <= n; ++i) g.dual[i] = req.element_duals[i - 1];
    g.cost_weight = req.cost_weight;
    g.payoff_weight = req.payoff_weight;
    g.constant = req.constant;
    g.window = req.window;
    return g;
  }

  LabelingOptions labeling_options(int max_columns, std::optional<Clock::time_point> deadline = std::nullopt) const {
    LabelingOptions o;
    o.deadline = deadline;
    o.bidirectional = opt_.bidirectional;
    o.tsp_optimal = opt_.tsp_optimal;
    o.max_columns = max_columns;
    return o;
  }

  std::vector<Column> price(const PricingRequest& req) const override {
    if (req.required.any()) throw InconsistencyError("route pricing does not pre-pack customers");
    auto routes = run_labeling(inst_, graph(req), ng_, labeling_options(req.max_columns, req.deadline));
    std::vector<Column> out;
    for (auto& pr : routes) out.push_back(route_column(inst_, pr.route, req.subproblem));
    return out;
  }

  bool admits(const Column& c, const NodeRestrictions& r) const override {
    const auto& p = c.payload;
    for (std::size_t t = 0; t + 1 < p.size(); ++t)
      if (!arc_allowed(p[t], p[t + 1], c.subproblem, r.forbidden_arcs, r.forced_arcs)) return false;
    if (route_load(inst_, p) > inst_.capacity) return false;
    return true;
  }

  void apply(const Decision& d, NodeRestrictions& r) const override {
    if (const auto* cv = std::get_if<CustomerVehicle>(&d)) {
      if (cv->forced) {
        for (int k = 0; k < layout_.num_subproblems; ++k)
          if (k != cv->vehicle) r.removed[k].set(cv->customer - 1);
      } else {
        r.removed[cv->vehicle].set(cv->customer - 1);
      }
    } else if (const auto* lc = std::get_if<LastCustomer>(&d)) {
      apply_generic_decision(SubproblemUse{lc->customer - 1, lc->forced}, r);
    } else if (const auto* a = std::get_if<Arc>(&d)) {
      (a->forced ? r.forced_arcs : r.forbidden_arcs).emplace_back(a->from, a->to);
    } else {
      throw InconsistencyError("route plugin cannot apply " + describe(d));
    }
  }

  std::optional<ChildDecisions> branch(const NodeSolution& sol, const NodeRestrictions&) const override {
    const int n = inst_.num_customers();
    const double tol = opt_.fractional_tol;
    auto fractional = [tol](double v) { return v > tol && v < 1.0 - tol; };

    if (keyed_on_last_customer()) {
      std::vector<double> last(n + 1, 0.0);
      for (const auto& [id, x] : sol.support) last[sol.column(id).subproblem + 1] += x;
      int best = -1;
      for (int i = 1; i <= n; ++i)
        if (fractional(last[i]) && (best < 0 || std::abs(last[i] - 0.5) < std::abs(last[best] - 0.5))) best = i;
      if (best > 0) return ChildDecisions{{LastCustomer{best, false}}, {LastCustomer{best, true}}};
    } else {
      const int K = layout_.num_subproblems;
      std::vector<std::vector<double>> agg(n + 1, std::vector<double>(K, 0.0));
      for (const auto& [id, x] : sol.support) {
        const Column& c = sol.column(id);
        for (const auto& [e, m] : c.elements) agg[e + 1][c.subproblem] += m * x;
      }
      int bi = -1, bk = -1;
      double bd = kInf;
      for (int i = 1; i <= n; ++i)
        for (int k = 0; k < K; ++k)
          if (fractional(agg[i][k]) && std::abs(agg[i][k] - 0.5) < bd) {
            bd = std::abs(agg[i][k] - 0.5);
            bi = i;
            bk = k;
          }
      if (bi > 0) return ChildDecisions{{CustomerVehicle{bi, bk, false}}, {CustomerVehicle{bi, bk, true}}};
    }

    std::map<std::pair<int, int>, double> flow;
    for (const auto& [id, x] : sol.support) {
      const auto& p = sol.column(id).payload;
      for (std::size_t t = 0; t + 1 < p.size(); ++t) flow[{p[t], p[t + 1]}] += x;
    }
    std::pair<int, int> best{-1, -1};
    double bd = kInf;
    for (const auto& [a, f] : flow)
      if (fractional(f) && std::abs(f - 0.5) < bd) {
        bd = std::abs(f - 0.5);
        best = a;
      }
    if (best.first >= 0)
      return ChildDecisions{{Arc{best.first, best.second, false}}, {Arc{best.first, best.second, true}}};
    if (!is_integral(sol)) throw InconsistencyError("fractional route solution without a fractional customer or arc");
    return std::nullopt;
  }

  bool integer_payoffs() const override { return true; }
  bool integer_costs() const override { return true; }

 private:
  CvrpInstance inst_;
  CvrpOptions opt_;
  MasterLayout layout_;
  std::vector<ElementSet> ng_;
  bool infeasible_ = false;
};

/// Routes of an integral node selection.
inline std::vector<Route> routes_of(const std::vector<Column>& cols) {
  std::vector<Route> out;
  for (const auto& c : cols) out.push_back(c.payload);
  return out;
}

}  // namespace fairbnp::cvrp
