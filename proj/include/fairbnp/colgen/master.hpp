#pragma once

// Restricted master problem shared by all fairness applications.
//
// Rows, in order: optional side row (budget / profit floor), one cover row
// per element, convexity rows, then the objective-linking rows:
//   range:  sum p x - eta <= 0 and sum p x - gamma >= 0 per subproblem
//           (or the big-M form sum (p - M) x - gamma >= -M)
//   order:  sum p y - z_k = 0 per position and z_k - z_{k+1} >= 0
// Artificial columns keep every restricted master feasible.

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <utility>
#include <optional>
#include <vector>

#include "fairbnp/colgen/column.hpp"
#include "fairbnp/common.hpp"
#include "fairbnp/lp/simplex.hpp"
#include "fairbnp/objective/order_weights.hpp"

namespace fairbnp {

enum class ConvexityKind {
  kPerSubproblemEqual,   // sum_{r in R_k} x_r = 1
  kPerSubproblemAtMost,  // sum_{a in A_i} x_a <= 1
  kTotalCount,           // sum_r x_r = K
};

enum class ObjectiveKind { kRange, kOrder, kColumnCost };

enum class GammaForm {
  kExact,  // every subproblem selects exactly one column
  kBigM,   // at most one column per subproblem
};

struct SideConstraint {
  bool present = false;
  lp::RowSense sense = lp::RowSense::kLessEqual;
  double rhs = 0.0;
};

struct MasterLayout {
  int num_elements = 0;
  int num_subproblems = 0;
  SideConstraint side;
  ConvexityKind convexity = ConvexityKind::kPerSubproblemEqual;
  int total_count = 0;
  ObjectiveKind objective = ObjectiveKind::kRange;
  GammaForm gamma_form = GammaForm::kExact;
  double payoff_cap = 0.0;  // M
  OrderWeights weights;     // order objective, one weight per subproblem
  double cost_sign = 1.0;   // column-cost objective: minimize cost_sign * cost
  bool eta_ge_gamma_row = false;
  double artificial_penalty = 0.0;  // 0: derived from the objective scale
  double column_upper = kInf;
};

/// Per-node restrictions accumulated along the root-to-node path.
struct NodeRestrictions {
  Window eta{0.0, kInf};
  Window gamma{0.0, kInf};
  std::vector<Window> z;        // per order position
  std::vector<Window> windows;  // per subproblem payoff window
  std::vector<ElementSet> removed;   // per subproblem: elements forbidden
  std::vector<ElementSet> required;  // per subproblem: elements pre-packed
  std::vector<int> usage;  // per subproblem: 1 must be used, -1 disabled, 0 free
  std::vector<std::pair<int, int>> forbidden_arcs;
  std::vector<std::pair<int, int>> forced_arcs;

  static NodeRestrictions root(const MasterLayout& layout) {
    NodeRestrictions r;
    double m = layout.payoff_cap;
    r.eta = {0.0, m};
    r.gamma = {0.0, m};
    if (layout.objective == ObjectiveKind::kOrder) r.z.assign(layout.num_subproblems, Window{0.0, m});
    r.windows.assign(layout.num_subproblems, Window{0.0, m});
    r.removed.assign(layout.num_subproblems, ElementSet{});
    r.required.assign(layout.num_subproblems, ElementSet{});
    r.usage.assign(layout.num_subproblems, 0);
    return r;
  }

  bool has_empty_domain() const {
    if (eta.empty() || gamma.empty()) return true;
    for (const auto& w : z)
      if (w.empty()) return true;
    return false;
  }

  /// Window, element removals and pre-packing; arcs are checked by plugins.
  bool admits(const Column& c) const {
    std::size_t s = static_cast<std::size_t>(c.subproblem);
    if (usage[s] < 0) return false;
    if (!windows[s].contains(c.payoff)) return false;
    if ((c.covered & removed[s]).any()) return false;
    if (!is_subset(required[s], c.covered)) return false;
    return true;
  }
};

/// Input to one pricing subproblem. The reduced cost of a column is
///   constant + cost_weight * cost + payoff_weight * payoff
///            - sum_e element_duals[e] * multiplicity(e).
struct PricingRequest {
  int subproblem = 0;
  bool disabled = false;  // subproblem may not contribute at this node
  double constant = 0.0;
  std::vector<double> element_duals;
  double cost_weight = 0.0;
  double payoff_weight = 0.0;
  Window window;
  ElementSet removed;
  ElementSet required;
  std::vector<std::pair<int, int>> forbidden_arcs;
  std::vector<std::pair<int, int>> forced_arcs;
  int max_columns = 1;
  std::optional<Clock::time_point> deadline;

  double reduced_cost(const Column& c) const {
    double rc = constant + cost_weight * c.cost + payoff_weight * c.payoff;
    for (const auto& [e, m] : c.elements) rc -= element_duals[e] * m;
    return rc;
  }
};

class MasterProblem {
 public:
  MasterProblem(const MasterLayout& layout, const NodeRestrictions& restr, bool with_artificials = true)
      : layout_(layout) {
    using lp::RowSense;
    const int S = layout.num_subproblems;
    const double m = layout.payoff_cap;
    if (layout.side.present) side_row_ = model_.add_row({layout.side.sense, layout.side.rhs, "side"});
    for (int e = 0; e < layout.num_elements; ++e)
      cover_rows_.push_back(model_.add_row({RowSense::kEqual, 1.0, "cover" + std::to_string(e)}));
    if (layout.convexity == ConvexityKind::kTotalCount) {
      count_row_ = model_.add_row({RowSense::kEqual, static_cast<double>(layout.total_count), "count"});
    } else {
      RowSense s = layout.convexity == ConvexityKind::kPerSubproblemEqual ? RowSense::kEqual : RowSense::kLessEqual;
      for (int k = 0; k < S; ++k) conv_rows_.push_back(model_.add_row({s, 1.0, "conv" + std::to_string(k)}));
    }
    use_rows_.assign(S, -1);
    for (int k = 0; k < S; ++k)
      if (restr.usage[k] > 0) use_rows_[k] = model_.add_row({RowSense::kGreaterEqual, 1.0, "use" + std::to_string(k)});

    if (layout.objective == ObjectiveKind::kRange) {
      for (int k = 0; k < S; ++k)
        eta_rows_.push_back(model_.add_row({RowSense::kLessEqual, 0.0, "eta" + std::to_string(k)}));
      double grhs = layout.gamma_form == GammaForm::kBigM ? -m : 0.0;
      for (int k = 0; k < S; ++k)
        gamma_rows_.push_back(model_.add_row({RowSense::kGreaterEqual, grhs, "gamma" + std::to_string(k)}));
      int eg = -1;
      if (layout.eta_ge_gamma_row) eg = model_.add_row({RowSense::kGreaterEqual, 0.0, "eta_ge_gamma"});
      lp::ColSpec eta{1.0, restr.eta.lo, restr.eta.hi, {}, "eta"};
      lp::ColSpec gamma{-1.0, restr.gamma.lo, restr.gamma.hi, {}, "gamma"};
      for (int r : eta_rows_) eta.coefs.emplace_back(r, -1.0);
      for (int r : gamma_rows_) gamma.coefs.emplace_back(r, -1.0);
      if (eg >= 0) {
        eta.coefs.emplace_back(eg, 1.0);
        gamma.coefs.emplace_back(eg, -1.0);
      }
      eta_col_ = push_structural(std::move(eta));
      gamma_col_ = push_structural(std::move(gamma));
    } else if (layout.objective == ObjectiveKind::kOrder) {
      if (layout.weights.size() != S) throw ConfigError("order weights must have one entry per position");
      for (int k = 0; k < S; ++k)
        z_rows_.push_back(model_.add_row({RowSense::kEqual, 0.0, "zval" + std::to_string(k)}));
      std::vector<int> order_rows;
      for (int k = 0; k + 1 < S; ++k)
        order_rows.push_back(model_.add_row({RowSense::kGreaterEqual, 0.0, "zord" + std::to_string(k)}));
      for (int k = 0; k < S; ++k) {
        lp::ColSpec z{layout.weights.v[k], restr.z[k].lo, restr.z[k].hi, {{z_rows_[k], -1.0}}, "z" + std::to_string(k)};
        if (k + 1 < S) z.coefs.emplace_back(order_rows[k], 1.0);
        if (k > 0) z.coefs.emplace_back(order_rows[k - 1], -1.0);
        z_cols_.push_back(push_structural(std::move(z)));
      }
    }
    if (with_artificials) add_artificials();
  }

  const MasterLayout& layout() const { return layout_; }
  const lp::LpModel& model() const { return model_; }
  lp::LpModel& model() { return model_; }

  /// Adds a pool column to the LP; returns its LP id.
  int add_column(const Column& c) {
    double obj = layout_.objective == ObjectiveKind::kColumnCost ? layout_.cost_sign * c.cost : 0.0;
    int j = model_.add_column({phase_ == 1 ? 0.0 : obj, 0.0, layout_.column_upper, coefficients(c), "c" + std::to_string(c.id)});
    objective_.push_back(obj);
    is_artificial_.push_back(false);
    pool_of_.resize(j + 1, -1);
    pool_of_[j] = c.id;
    lp_of_[c.id] = j;
    return j;
  }

  int lp_id(int pool_id) const {
    auto it = lp_of_.find(pool_id);
    return it == lp_of_.end() ? -1 : it->second;
  }
  int pool_id(int lp_col) const { return lp_col < static_cast<int>(pool_of_.size()) ? pool_of_[lp_col] : -1; }
  bool contains(int pool_id) const { return lp_of_.count(pool_id) > 0; }

  /// Pool ids of the columns currently active in the LP.
  std::vector<int> active_pool_ids() const {
    std::vector<int> ids;
    for (int j = 0; j < model_.num_cols(); ++j)
      if (pool_of_[j] >= 0 && model_.is_active(j)) ids.push_back(pool_of_[j]);
    return ids;
  }
  void set_active(int pool_id, bool active) {
    int j = lp_id(pool_id);
    if (j >= 0) model_.set_active(j, active);
  }
  bool is_active(int pool_id) const {
    int j = lp_id(pool_id);
    return j >= 0 && model_.is_active(j);
  }

  const std::vector<int>& artificial_columns() const { return artificials_; }
  double artificial_mass(const lp::LpSolution& sol) const {
    double s = 0.0;
    for (int a : artificials_)
      if (model_.is_active(a)) s += sol.primal[a];
    return s;
  }

  /// Phase 1 minimizes the artificial mass only. Phase 2 restores the
  /// objective; with `drop_artificials` the artificials are deactivated.
  void set_phase(int phase, bool drop_artificials = false) {
    phase_ = phase;
    for (int j = 0; j < model_.num_cols(); ++j) {
      if (is_artificial_[j]) {
        model_.set_objective(j, phase == 1 ? 1.0 : penalty());
        model_.set_active(j, !(phase == 2 && drop_artificials));
      } else {
        model_.set_objective(j, phase == 1 ? 0.0 : objective_[j]);
      }
    }
  }
  int phase() const { return phase_; }

  PricingRequest request(int subproblem, const std::vector<double>& y, const NodeRestrictions& restr,
                         int max_columns) const {
    PricingRequest req;
    req.subproblem = subproblem;
    req.max_columns = max_columns;
    req.disabled = restr.usage[subproblem] < 0;
    req.window = restr.windows[subproblem];
    req.removed = restr.removed[subproblem];
    req.required = restr.required[subproblem];
    req.forbidden_arcs = restr.forbidden_arcs;
    req.forced_arcs = restr.forced_arcs;
    req.element_duals.resize(layout_.num_elements);
    for (int e = 0; e < layout_.num_elements; ++e) req.element_duals[e] = y[cover_rows_[e]];
    double obj = (phase_ == 2 && layout_.objective == ObjectiveKind::kColumnCost) ? layout_.cost_sign : 0.0;
    req.cost_weight = obj - (side_row_ >= 0 ? y[side_row_] : 0.0);
    req.constant = -(count_row_ >= 0 ? y[count_row_] : y[conv_rows_[subproblem]]);
    if (use_rows_[subproblem] >= 0) req.constant -= y[use_rows_[subproblem]];
    if (layout_.objective == ObjectiveKind::kRange) {
      double ye = y[eta_rows_[subproblem]];
      double yg = y[gamma_rows_[subproblem]];
      req.payoff_weight = -(ye + yg);
      if (layout_.gamma_form == GammaForm::kBigM) req.constant += layout_.payoff_cap * yg;
    } else if (layout_.objective == ObjectiveKind::kOrder) {
      req.payoff_weight = -y[z_rows_[subproblem]];
    }
    return req;
  }

  int eta_col() const { return eta_col_; }
  int gamma_col() const { return gamma_col_; }
  const std::vector<int>& z_cols() const { return z_cols_; }
  int side_row() const { return side_row_; }
  int count_row() const { return count_row_; }
  const std::vector<int>& cover_rows() const { return cover_rows_; }
  const std::vector<int>& convexity_rows() const { return conv_rows_; }
  const std::vector<int>& eta_rows() const { return eta_rows_; }
  const std::vector<int>& gamma_rows() const { return gamma_rows_; }
  const std::vector<int>& z_rows() const { return z_rows_; }

  double penalty() const {
    if (layout_.artificial_penalty > 0) return layout_.artificial_penalty;
    double scale = std::isfinite(layout_.payoff_cap) ? std::max(1.0, layout_.payoff_cap) : 1.0;
    if (layout_.objective == ObjectiveKind::kOrder) {
      double w = 0.0;
      for (double v : layout_.weights.v) w += std::abs(v);
      scale *= std::max(1.0, w);
    }
    if (layout_.objective == ObjectiveKind::kColumnCost) scale = std::max(scale, std::abs(layout_.side.rhs));
    return 10.0 * scale;
  }

 private:
  std::vector<std::pair<int, double>> coefficients(const Column& c) const {
    std::vector<std::pair<int, double>> coefs;
    if (side_row_ >= 0 && c.cost != 0.0) coefs.emplace_back(side_row_, c.cost);
    for (const auto& [e, mult] : c.elements) coefs.emplace_back(cover_rows_[e], static_cast<double>(mult));
    coefs.emplace_back(count_row_ >= 0 ? count_row_ : conv_rows_[c.subproblem], 1.0);
    if (use_rows_[c.subproblem] >= 0) coefs.emplace_back(use_rows_[c.subproblem], 1.0);
    if (layout_.objective == ObjectiveKind::kRange) {
      if (c.payoff != 0.0) coefs.emplace_back(eta_rows_[c.subproblem], c.payoff);
      double g = layout_.gamma_form == GammaForm::kBigM ? c.payoff - layout_.payoff_cap : c.payoff;
      if (g != 0.0) coefs.emplace_back(gamma_rows_[c.subproblem], g);
    } else if (layout_.objective == ObjectiveKind::kOrder) {
      if (c.payoff != 0.0) coefs.emplace_back(z_rows_[c.subproblem], c.payoff);
    }
    return coefs;
  }

  int push_structural(lp::ColSpec spec) {
    double obj = spec.cost;
    int j = model_.add_column(std::move(spec));
    objective_.push_back(obj);
    is_artificial_.push_back(false);
    pool_of_.push_back(-1);
    return j;
  }

  void add_artificials() {
    double pen = penalty();
    for (int i = 0; i < model_.num_rows(); ++i) {
      const auto& r = model_.row(i);
      if (r.sense != lp::RowSense::kLessEqual && r.rhs > 0) push_artificial(i, 1.0, pen);
      if (r.sense != lp::RowSense::kGreaterEqual && r.rhs < 0) push_artificial(i, -1.0, pen);
    }
  }

  void push_artificial(int row, double sign, double pen) {
    int j = model_.add_column({pen, 0.0, kInf, {{row, sign}}, "art" + std::to_string(row)});
    artificials_.push_back(j);
    objective_.push_back(pen);
    is_artificial_.push_back(true);
    pool_of_.push_back(-1);
  }

  MasterLayout layout_;
  lp::LpModel model_;
  int side_row_ = -1;
  int count_row_ = -1;
  std::vector<int> cover_rows_, conv_rows_, use_rows_, eta_rows_, gamma_rows_, z_rows_;
  int eta_col_ = -1;
  int gamma_col_ = -1;
  std::vector<int> z_cols_;
  std::vector<int> artificials_;
  std::vector<double> objective_;
  std::vector<bool> is_artificial_;
  std::vector<int> pool_of_;
  std::unordered_map<int, int> lp_of_;
  int phase_ = 2;
};

}  // namespace fairbnp
