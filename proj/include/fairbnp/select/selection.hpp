#pragma once

// Selection problems over an explicit column list: pick exactly K of N
// columns. Example 1's three-column instance is the canonical case.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "fairbnp/bnp/plugin.hpp"
#include "fairbnp/colgen/master.hpp"
#include "fairbnp/common.hpp"

namespace fairbnp {

struct SelectionInstance {
  std::vector<double> payoffs;
  int pick = 0;
  double payoff_cap = 0.0;  // M; 0: max payoff
};

inline SelectionInstance example1_instance() { return {{1.0, 2.0, 3.0}, 2, 3.0}; }

/// Column i alone forms subproblem i, so the big-M min/max rows are per
/// column; the valid inequality eta >= gamma is included.
class SelectionPlugin : public Plugin {
 public:
  explicit SelectionPlugin(SelectionInstance inst) : inst_(std::move(inst)) {
    const int n = static_cast<int>(inst_.payoffs.size());
    if (inst_.pick < 1 || inst_.pick > n) throw ConfigError("pick must lie in [1, N]");
    double m = inst_.payoff_cap;
    for (double p : inst_.payoffs) {
      if (p < 0) throw ConfigError("payoffs must be nonnegative");
      if (inst_.payoff_cap <= 0) m = std::max(m, p);
    }
    for (double p : inst_.payoffs)
      if (p > m) throw ConfigError("payoff exceeds the cap");
    layout_.num_subproblems = n;
    layout_.convexity = ConvexityKind::kTotalCount;
    layout_.total_count = inst_.pick;
    layout_.objective = ObjectiveKind::kRange;
    layout_.gamma_form = GammaForm::kBigM;
    layout_.payoff_cap = m;
    layout_.eta_ge_gamma_row = true;
    layout_.column_upper = 1.0;
    for (int i = 0; i < n; ++i) {
      Column c;
      c.id = i;
      c.subproblem = i;
      c.payoff = inst_.payoffs[i];
      c.payload = {i};
      columns_.push_back(c);
    }
  }

  const MasterLayout& layout() const override { return layout_; }
  const std::vector<Column>& columns() const { return columns_; }

  std::vector<Column> price(const PricingRequest& req) const override {
    const Column& c = columns_[req.subproblem];
    if (!req.window.contains(c.payoff)) return {};
    if (req.reduced_cost(c) < -kTolOpt) return {c};
    return {};
  }

  std::optional<ChildDecisions> branch(const NodeSolution& sol, const NodeRestrictions&) const override {
    int best = -1;
    double best_dist = 1.0;
    for (const auto& [id, v] : sol.support) {
      double dist = std::abs(v - 0.5);
      if (v > kTolIntegral && v < 1.0 - kTolIntegral && dist < best_dist) {
        best_dist = dist;
        best = sol.column(id).subproblem;
      }
    }
    if (best < 0) return std::nullopt;
    return ChildDecisions{{SubproblemUse{best, false}}, {SubproblemUse{best, true}}};
  }

  bool integer_payoffs() const override {
    for (double p : inst_.payoffs)
      if (!is_integer_value(p)) return false;
    return true;
  }

 private:
  SelectionInstance inst_;
  MasterLayout layout_;
  std::vector<Column> columns_;
};

/// The full LP relaxation (all columns, no artificials).
inline MasterProblem selection_master(const SelectionPlugin& plugin) {
  MasterProblem m(plugin.layout(), NodeRestrictions::root(plugin.layout()), false);
  for (const auto& c : plugin.columns()) m.add_column(c);
  return m;
}

}  // namespace fairbnp
