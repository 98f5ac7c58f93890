#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fairbnp/bnp/decision.hpp"
#include "fairbnp/bnp/plugin.hpp"
#include "fairbnp/bnp/range_order.hpp"
#include "fairbnp/bnp/rules.hpp"
#include "fairbnp/colgen/colgen.hpp"
#include "fairbnp/colgen/master.hpp"
#include "fairbnp/common.hpp"

namespace fairbnp {

enum class SolveStatus { kOptimal, kFeasible, kInfeasible, kTimeLimit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "Optimal";
    case SolveStatus::kFeasible: return "Feasible";
    case SolveStatus::kInfeasible: return "Infeasible";
    case SolveStatus::kTimeLimit: return "TimeLimit";
  }
  return "?";
}

enum class NodeStatus { kOpen, kBranched, kPrunedBound, kPrunedInfeasible, kIntegral };

struct Node {
  int id = 0;
  int parent = -1;
  int depth = 0;
  std::vector<Decision> decisions;  // the decisions that created this node
  double lb = -kInf;
  bool rbf_lineage = false;  // this node or an ancestor is RBF
  NodeStatus status = NodeStatus::kOpen;
  NodeRestrictions restr;
};

struct TrajectoryPoint {
  double time = 0.0;
  double lb = 0.0;
  double ub = kInf;
};

struct EngineConfig {
  double time_limit = kInf;  // seconds
  BranchingChain chain = make_chain(BranchingScheme::kRange);
  std::optional<double> upper_bound;        // seeded incumbent value
  std::vector<Column> upper_bound_solution;  // its columns, if known
  long max_nodes = 0;                        // processed-node cap, 0: none
  ColgenOptions colgen;
  std::function<void(const std::string&)> log;
};

struct SolveReport {
  SolveStatus status = SolveStatus::kTimeLimit;
  std::optional<double> incumbent;
  std::vector<Column> incumbent_columns;
  double lower_bound = 0.0;
  double gap_pct = 100.0;
  long nodes = 0;  // created, including the root
  long nodes_processed = 0;
  long branchings = 0;
  double wall_time = 0.0;
  std::vector<TrajectoryPoint> trajectory;
  std::optional<double> root_lb;
  long rbf_nodes = 0;
  long rbf_violations = 0;
  std::optional<double> all_rbf_lb;  // global lb once every open leaf has an RBF ancestor
  long colgen_rounds = 0;
  long columns_generated = 0;
  std::vector<RoundTrace> root_trace;
};

/// Relative gap in percent: (ub - lb) / ub * 100, 0 when ub = lb and 100
/// when lb <= 0 < ub or no incumbent exists.
inline double gap_percent(double lb, std::optional<double> ub) {
  if (!ub) return 100.0;
  if (std::abs(*ub - lb) <= 1e-9) return 0.0;
  if (*ub > 0.0) return lb <= 0.0 ? 100.0 : std::max(0.0, (*ub - lb) / *ub * 100.0);
  return std::abs(*ub - lb) / std::max(std::abs(*ub), 1e-9) * 100.0;
}

inline constexpr double kPruneTol = 1e-10;
inline constexpr double kIntegerPruneTol = 1e-6;

/// Bound-based pruning. With integer objective values a node whose bound
/// rounds up to the incumbent cannot improve it.
inline bool prune(bool infeasible, double lb, std::optional<double> incumbent, bool integer_objective) {
  if (infeasible) return true;
  if (!incumbent) return false;
  if (lb >= *incumbent - kPruneTol) return true;
  return integer_objective && lb >= *incumbent - 1.0 + kIntegerPruneTol;
}

/// Best-first by bound, then deeper first, then lower id. Returns the index
/// into `open`.
inline std::size_t select_next_node(std::span<const Node* const> open) {
  if (open.empty()) throw InconsistencyError("select_next_node on an empty open set");
  std::size_t best = 0;
  for (std::size_t i = 1; i < open.size(); ++i) {
    const Node& a = *open[i];
    const Node& b = *open[best];
    if (a.lb < b.lb || (a.lb == b.lb && (a.depth > b.depth || (a.depth == b.depth && a.id < b.id)))) best = i;
  }
  return best;
}

class Engine {
 public:
  Engine(const Plugin& plugin, EngineConfig config) : plugin_(plugin), cfg_(std::move(config)) {
    if (cfg_.chain.empty()) throw ConfigError("empty branching chain");
    if (cfg_.time_limit < 0) throw ConfigError("negative time limit");
    integer_obj_ = integer_objective(plugin_);
  }

  SolveReport solve() {
    start_ = Clock::now();
    report_ = {};
    nodes_.clear();
    pool_ = ColumnPool{};
    incumbent_ = cfg_.upper_bound;
    if (incumbent_) report_.incumbent_columns = cfg_.upper_bound_solution;
    for (auto& c : plugin_.initial_columns()) pool_.insert(std::move(c));
    for (const auto& c : cfg_.upper_bound_solution) pool_.insert(c);

    Node root;
    root.restr = plugin_.root_restrictions();
    root.lb = plugin_.trivial_lower_bound();
    nodes_.push_back(std::move(root));
    report_.nodes = 1;
    lb_ = plugin_.trivial_lower_bound();
    push_trajectory(true);

    ColgenOptions cg = cfg_.colgen;
    if (std::isfinite(cfg_.time_limit))
      cg.deadline = start_ + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(cfg_.time_limit));

    bool timed_out = false;
    bool node_limit = false;
    for (;;) {
      std::vector<const Node*> open = open_nodes();
      if (open.empty()) break;
      if (elapsed() >= cfg_.time_limit) {
        timed_out = true;
        break;
      }
      if (cfg_.max_nodes > 0 && report_.nodes_processed >= cfg_.max_nodes) {
        node_limit = true;
        break;
      }
      int id = open[select_next_node(open)]->id;
      if (prune(false, nodes_[id].lb, incumbent_, integer_obj_)) {
        nodes_[id].status = NodeStatus::kPrunedBound;
        update_bound();
        continue;
      }
      if (!process(id, cg)) {
        timed_out = true;
        break;
      }
      update_bound();
    }

    update_bound();
    report_.incumbent = incumbent_;
    report_.wall_time = elapsed();
    if (timed_out || node_limit) {
      report_.status = (node_limit && incumbent_) ? SolveStatus::kFeasible : SolveStatus::kTimeLimit;
    } else {
      report_.status = incumbent_ ? SolveStatus::kOptimal : SolveStatus::kInfeasible;
      if (incumbent_) lb_ = *incumbent_;
      if (!report_.all_rbf_lb && has_fairness_alpha0() && incumbent_) report_.all_rbf_lb = lb_;
    }
    report_.lower_bound = lb_;
    report_.gap_pct = gap_percent(lb_, incumbent_);
    push_trajectory(false);
    return report_;
  }

  const std::vector<Node>& nodes() const { return nodes_; }
  const ColumnPool& pool() const { return pool_; }

 private:
  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

  std::vector<const Node*> open_nodes() const {
    std::vector<const Node*> open;
    for (const auto& n : nodes_)
      if (n.status == NodeStatus::kOpen) open.push_back(&n);
    return open;
  }

  bool has_fairness_alpha0() const { return cfg_.chain.front()->fairness() && cfg_.chain.front()->exact_rbf(); }

  void log(const std::string& s) const {
    if (cfg_.log) cfg_.log(s);
  }

  void update_bound() {
    double m = kInf;
    bool all_rbf = true;
    bool any_open = false;
    for (const auto& n : nodes_) {
      if (n.status != NodeStatus::kOpen) continue;
      any_open = true;
      m = std::min(m, n.lb);
      all_rbf = all_rbf && n.rbf_lineage;
    }
    if (incumbent_) m = std::min(m, *incumbent_);
    if (!any_open && !incumbent_) m = lb_;
    if (std::isfinite(m) || m == -kInf) {
      if (m > lb_) lb_ = m;
    }
    if (any_open && all_rbf && !report_.all_rbf_lb && has_fairness_alpha0()) report_.all_rbf_lb = lb_;
    push_trajectory(false);
  }

  void push_trajectory(bool force) {
    double ub = incumbent_ ? *incumbent_ : kInf;
    auto& t = report_.trajectory;
    if (!force && !t.empty() && t.back().lb == lb_ && t.back().ub == ub) return;
    if (!t.empty() && (lb_ < t.back().lb - 1e-9 || ub > t.back().ub + 1e-9))
      throw InconsistencyError("bound trajectory is not monotone: lb " + std::to_string(lb_) + " ub " + std::to_string(ub) +
                               " after lb " + std::to_string(t.back().lb) + " ub " + std::to_string(t.back().ub));
    t.push_back({elapsed(), lb_, ub});
  }

  void set_incumbent(double value, std::vector<Column> cols) {
    if (incumbent_ && value >= *incumbent_ - 1e-9) return;
    incumbent_ = value;
    if (lb_ > value) {
      if (lb_ > value + 1e-6 * std::max(1.0, std::abs(value)))
        throw InconsistencyError("incumbent below the proven lower bound");
      lb_ = value;
    }
    report_.incumbent_columns = std::move(cols);
    log("incumbent " + std::to_string(value));
  }

  NodeSolution make_solution(const ColgenResult& r) const {
    NodeSolution s;
    s.pool = &pool_;
    s.objective = r.objective;
    s.eta = r.eta;
    s.gamma = r.gamma;
    s.z = r.z;
    for (const auto& [id, v] : r.values)
      if (v > kTolFeas) s.support.emplace_back(id, v);
    return s;
  }

  // Returns false when the time limit interrupted the node.
  bool process(int id, const ColgenOptions& cg) {
    Node& node = nodes_[id];
    if (node.restr.has_empty_domain()) {
      node.status = NodeStatus::kPrunedInfeasible;
      return true;
    }
    const MasterLayout& layout = plugin_.layout();
    MasterProblem master(layout, node.restr);
    for (int c = 0; c < pool_.size(); ++c) {
      const auto& e = pool_.entry(c);
      if (e.archived) continue;
      if (!node.restr.admits(e.column) || !plugin_.admits(e.column, node.restr)) continue;
      master.add_column(e.column);
    }
    const NodeRestrictions& restr = node.restr;
    Pricer pricer = [this](const PricingRequest& req) { return plugin_.price(req); };
    ColumnFilter filter = [this, &restr](const Column& c) { return plugin_.admits(c, restr); };
    ColgenResult r = run_colgen(master, pool_, pricer, restr, cg, filter);
    report_.colgen_rounds += r.rounds;
    report_.columns_generated += r.columns_added;
    if (id == 0) report_.root_trace = r.trace;
    ++report_.nodes_processed;

    if (r.status == ColgenStatus::kTimeLimit) {
      --report_.nodes_processed;
      return false;
    }
    if (r.status == ColgenStatus::kNumerical) throw std::runtime_error("LP trouble while solving node " + std::to_string(id));
    Node& n = nodes_[id];
    if (r.status == ColgenStatus::kInfeasible) {
      n.status = NodeStatus::kPrunedInfeasible;
      log("node " + std::to_string(id) + " infeasible");
      return true;
    }
    n.lb = std::max(n.lb, r.objective);
    if (id == 0) report_.root_lb = r.objective;
    log("node " + std::to_string(id) + " depth " + std::to_string(n.depth) + " lb " + std::to_string(n.lb));
    if (prune(false, n.lb, incumbent_, integer_obj_)) {
      n.status = NodeStatus::kPrunedBound;
      return true;
    }

    NodeSolution sol = make_solution(r);
    const bool integral = plugin_.is_integral(sol);
    double true_obj = kInf;
    if (integral) {
      std::vector<const Column*> sel;
      std::vector<Column> cols;
      for (const auto& [cid, v] : sol.support)
        if (v > 0.5) {
          sel.push_back(&pool_[cid]);
          cols.push_back(pool_[cid]);
        }
      true_obj = selection_objective(layout, sel);
      set_incumbent(true_obj, std::move(cols));
    }

    std::optional<ChildDecisions> children;
    bool rbf = false;
    for (const auto& rule : cfg_.chain) {
      if (integral && !rule->fairness()) break;
      children = rule->try_branch(plugin_, sol, n.restr);
      if (children) break;
      if (rule->fairness() && &rule == &cfg_.chain.front()) {
        rbf = true;
        ++report_.rbf_nodes;
        if (rule->exact_rbf()) {
          bool ok = layout.objective == ObjectiveKind::kOrder ? order_view(sol, layout.num_subproblems).respecting()
                                                               : range_view(sol).respecting();
          if (!ok) ++report_.rbf_violations;
        }
      }
    }
    Node& m = nodes_[id];
    if (rbf) m.rbf_lineage = true;
    if (!children) {
      if (!integral) throw InconsistencyError("no branching candidate in a fractional node");
      if (true_obj > m.lb + 1e-6)
        throw InconsistencyError("integral node with LP value below its true objective");
      m.status = NodeStatus::kIntegral;
      return true;
    }
    branch(id, *children);
    return true;
  }

  void branch(int id, const ChildDecisions& ch) {
    nodes_[id].status = NodeStatus::kBranched;
    ++report_.branchings;
    for (const auto* side : {&ch.left, &ch.right}) {
      const Node& parent = nodes_[id];
      Node c;
      c.id = static_cast<int>(nodes_.size());
      c.parent = id;
      c.depth = parent.depth + 1;
      c.lb = parent.lb;
      c.rbf_lineage = parent.rbf_lineage;
      c.decisions = *side;
      c.restr = parent.restr;
      for (const auto& d : *side) {
        if (is_generic_decision(d))
          apply_generic_decision(d, c.restr);
        else
          plugin_.apply(d, c.restr);
      }
      if (c.restr.has_empty_domain()) c.status = NodeStatus::kPrunedInfeasible;
      nodes_.push_back(std::move(c));
      ++report_.nodes;
    }
  }

  const Plugin& plugin_;
  EngineConfig cfg_;
  bool integer_obj_ = true;
  Clock::time_point start_;
  SolveReport report_;
  std::vector<Node> nodes_;
  ColumnPool pool_;
  std::optional<double> incumbent_;
  double lb_ = 0.0;
};

inline SolveReport solve(const Plugin& plugin, EngineConfig config) {
  Engine e(plugin, std::move(config));
  return e.solve();
}

}  // namespace fairbnp
