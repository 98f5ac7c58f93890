#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fairbnp/bnp/plugin.hpp"
#include "fairbnp/bnp/range_order.hpp"

namespace fairbnp {

/// One link of the branching chain. The engine asks the rules in order and
/// uses the first that returns children.
class BranchingRule {
 public:
  virtual ~BranchingRule() = default;
  virtual std::string name() const = 0;
  /// Range/order rules: a node where such a rule returns nothing is RBF.
  virtual bool fairness() const { return false; }
  virtual double alpha() const { return 0.0; }
  /// True when "no opportunity" certifies an exactly range-respecting node.
  virtual bool exact_rbf() const { return alpha() == 0.0; }
  virtual std::optional<ChildDecisions> try_branch(const Plugin& plugin, const NodeSolution& sol,
                                                   const NodeRestrictions& restr) const = 0;
};

class RangeBranching : public BranchingRule {
 public:
  /// exact_tail: once no alpha-relaxed violation is left, retry with alpha = 0.
  explicit RangeBranching(double alpha = 0.0, bool exact_tail = false) : alpha_(alpha), exact_tail_(exact_tail) {
    if (alpha < 0.0 || alpha >= 1.0) throw ConfigError("alpha must lie in [0, 1)");
  }
  std::string name() const override { return "range"; }
  bool fairness() const override { return true; }
  double alpha() const override { return alpha_; }
  bool exact_rbf() const override { return alpha_ == 0.0 || exact_tail_; }
  std::optional<ChildDecisions> try_branch(const Plugin& plugin, const NodeSolution& sol,
                                           const NodeRestrictions&) const override {
    auto c = detect_range_violation(range_view(sol), alpha_, plugin.integer_payoffs());
    if (!c && exact_tail_ && alpha_ > 0.0) c = detect_range_violation(range_view(sol), 0.0, plugin.integer_payoffs());
    if (!c) return std::nullopt;
    return make_range_children(*c);
  }

 private:
  double alpha_;
  bool exact_tail_;
};

class OrderBranching : public BranchingRule {
 public:
  /// exact_tail: once no alpha-relaxed violation is left, retry with alpha = 0.
  explicit OrderBranching(double alpha = 0.0, bool exact_tail = false) : alpha_(alpha), exact_tail_(exact_tail) {
    if (alpha < 0.0 || alpha >= 1.0) throw ConfigError("alpha must lie in [0, 1)");
  }
  std::string name() const override { return "order"; }
  bool fairness() const override { return true; }
  double alpha() const override { return alpha_; }
  bool exact_rbf() const override { return alpha_ == 0.0 || exact_tail_; }
  std::optional<ChildDecisions> try_branch(const Plugin& plugin, const NodeSolution& sol,
                                           const NodeRestrictions&) const override {
    auto view = order_view(sol, plugin.layout().num_subproblems);
    auto c = detect_order_violation(view, alpha_, plugin.integer_payoffs());
    if (!c && exact_tail_ && alpha_ > 0.0) c = detect_order_violation(view, 0.0, plugin.integer_payoffs());
    if (!c) return std::nullopt;
    return make_order_children(*c);
  }

 private:
  double alpha_;
  bool exact_tail_;
};

class ProblemBranching : public BranchingRule {
 public:
  std::string name() const override { return "problem"; }
  std::optional<ChildDecisions> try_branch(const Plugin& plugin, const NodeSolution& sol,
                                           const NodeRestrictions& restr) const override {
    return plugin.branch(sol, restr);
  }
};

enum class BranchingScheme { kClassical, kRange, kOrder };

inline BranchingScheme parse_branching(const std::string& s) {
  if (s == "classical") return BranchingScheme::kClassical;
  if (s == "range") return BranchingScheme::kRange;
  if (s == "order") return BranchingScheme::kOrder;
  throw ConfigError("unknown branching scheme: " + s);
}

inline const char* to_string(BranchingScheme b) {
  switch (b) {
    case BranchingScheme::kClassical: return "classical";
    case BranchingScheme::kRange: return "range";
    case BranchingScheme::kOrder: return "order";
  }
  return "?";
}

using BranchingChain = std::vector<std::shared_ptr<const BranchingRule>>;

inline BranchingChain make_chain(BranchingScheme scheme, double alpha = 0.0, bool exact_tail = false) {
  BranchingChain chain;
  if (scheme == BranchingScheme::kRange) chain.push_back(std::make_shared<RangeBranching>(alpha, exact_tail));
  if (scheme == BranchingScheme::kOrder) chain.push_back(std::make_shared<OrderBranching>(alpha, exact_tail));
  chain.push_back(std::make_shared<ProblemBranching>());
  return chain;
}

}  // namespace fairbnp
