#pragma once

// F-GAP branch-and-price plugin: one knapsack pricing problem per agent,
// payoff = resource consumption, side row = profit floor.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairbnp/bnp/engine.hpp"
#include "fairbnp/bnp/plugin.hpp"
#include "fairbnp/gap/instance.hpp"
#include "fairbnp/gap/knapsack.hpp"

namespace fairbnp::gap {

enum class GapMode { kRange, kMaxProfit };

inline Column assignment_column(const GapInstance& g, int agent, std::vector<int> jobs) {
  std::sort(jobs.begin(), jobs.end());
  Column c;
  c.subproblem = agent;
  for (int j : jobs) {
    c.cost += static_cast<double>(g.profit[agent][j]);
    c.payoff += static_cast<double>(g.consumption[agent][j]);
  }
  c.set_elements(jobs);
  c.payload = std::move(jobs);
  return c;
}

class GapPlugin : public Plugin {
 public:
  explicit GapPlugin(GapInstance inst, GapMode mode = GapMode::kRange) : g_(std::move(inst)), mode_(mode) {
    validate(g_);
    layout_.num_elements = g_.jobs;
    layout_.num_subproblems = g_.agents;
    layout_.convexity = ConvexityKind::kPerSubproblemAtMost;
    if (mode_ == GapMode::kRange) {
      layout_.side = {true, lp::RowSense::kGreaterEqual, static_cast<double>(g_.profit_floor)};
      layout_.objective = ObjectiveKind::kRange;
      layout_.gamma_form = GammaForm::kExact;
      layout_.payoff_cap = static_cast<double>(*std::max_element(g_.capacity.begin(), g_.capacity.end()));
    } else {
      layout_.objective = ObjectiveKind::kColumnCost;
      layout_.cost_sign = -1.0;
      layout_.payoff_cap = kInf;
    }
  }

  const GapInstance& instance() const { return g_; }
  const MasterLayout& layout() const override { return layout_; }

  std::vector<Column> initial_columns() const override {
    std::vector<Column> cols;
    for (int i = 0; i < g_.agents; ++i) cols.push_back(assignment_column(g_, i, {}));
    return cols;
  }

  /// The DP behind one pricing call, exposed for tests.
  std::optional<Column> best_assignment(const PricingRequest& req) const {
    const int i = req.subproblem;
    std::vector<int> fixed;
    long long fixed_weight = 0;
    double fixed_value = 0.0;
    std::vector<KnapsackItem> items;
    for (int j = 0; j < g_.jobs; ++j) {
      double v = req.element_duals[j] - req.cost_weight * static_cast<double>(g_.profit[i][j]) -
                 req.payoff_weight * static_cast<double>(g_.consumption[i][j]);
      if (req.required.test(j)) {
        fixed.push_back(j);
        fixed_weight += g_.consumption[i][j];
        fixed_value += v;
      } else if (!req.removed.test(j)) {
        items.push_back({j, g_.consumption[i][j], v});
      }
    }
    double hi = std::min(req.window.hi, static_cast<double>(g_.capacity[i]));
    long long u = static_cast<long long>(std::floor(hi + 1e-9)) - fixed_weight;
    long long l = static_cast<long long>(std::ceil(req.window.lo - 1e-9)) - fixed_weight;
    if (u < 0 || l > u) return std::nullopt;
    DpTable dp(items, u);
    auto w = dp.best_weight(l, u);
    if (!w) return std::nullopt;
    std::vector<int> jobs = dp.items_at(*w);
    jobs.insert(jobs.end(), fixed.begin(), fixed.end());
    Column c = assignment_column(g_, i, jobs);
    return c;
  }

  std::vector<Column> price(const PricingRequest& req) const override {
    auto c = best_assignment(req);
    if (!c || req.reduced_cost(*c) >= -kTolOpt) return {};
    return {*c};
  }

  bool admits(const Column& c, const NodeRestrictions&) const override {
    return c.payoff <= static_cast<double>(g_.capacity[c.subproblem]) && c.elementary();
  }

  void apply(const Decision& d, NodeRestrictions& r) const override {
    const auto* ja = std::get_if<JobAgent>(&d);
    if (!ja) throw InconsistencyError("assignment plugin cannot apply " + describe(d));
    if (ja->forced) {
      r.required[ja->agent].set(ja->job);
      for (int k = 0; k < g_.agents; ++k)
        if (k != ja->agent) r.removed[k].set(ja->job);
    } else {
      r.removed[ja->agent].set(ja->job);
    }
  }

  /// Empty assignments carry no decision, so their values are ignored.
  bool is_integral(const NodeSolution& sol) const override {
    for (const auto& [id, x] : sol.support) {
      if (sol.column(id).payload.empty()) continue;
      if (x > kTolIntegral && x < 1.0 - kTolIntegral) return false;
    }
    return true;
  }

  std::optional<ChildDecisions> branch(const NodeSolution& sol, const NodeRestrictions&) const override {
    std::vector<std::vector<double>> agg(g_.agents, std::vector<double>(g_.jobs, 0.0));
    for (const auto& [id, x] : sol.support) {
      const Column& c = sol.column(id);
      for (int j : c.payload) agg[c.subproblem][j] += x;
    }
    int bi = -1, bj = -1;
    double bd = kInf;
    for (int i = 0; i < g_.agents; ++i)
      for (int j = 0; j < g_.jobs; ++j) {
        double v = agg[i][j];
        if (v > kTolFeas && v < 1.0 - kTolFeas && std::abs(v - 0.5) < bd) {
          bd = std::abs(v - 0.5);
          bi = i;
          bj = j;
        }
      }
    if (bi >= 0) return ChildDecisions{{JobAgent{bj, bi, false}}, {JobAgent{bj, bi, true}}};
    if (!is_integral(sol)) throw InconsistencyError("fractional assignment solution without a fractional job");
    return std::nullopt;
  }

 private:
  GapInstance g_;
  GapMode mode_;
  MasterLayout layout_;
};

/// Best total profit over complete feasible assignments, by branch and price.
inline std::optional<long long> max_profit(const GapInstance& g, double time_limit = kInf) {
  GapPlugin plugin(g, GapMode::kMaxProfit);
  EngineConfig cfg;
  cfg.chain = make_chain(BranchingScheme::kClassical);
  cfg.time_limit = time_limit;
  auto rep = solve(plugin, cfg);
  if (rep.status != SolveStatus::kOptimal || !rep.incumbent) return std::nullopt;
  return std::llround(-*rep.incumbent);
}

}  // namespace fairbnp::gap
