#pragma once

// Detection of range-/order-violating LP points and construction of the
// corresponding child decisions.

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "fairbnp/bnp/decision.hpp"
#include "fairbnp/common.hpp"

namespace fairbnp {

inline constexpr double kTolViolation = 1e-6;

struct RangeView {
  std::vector<double> support;  // payoffs of columns with positive value
  double eta = 0.0;
  double gamma = 0.0;

  bool empty() const { return support.empty(); }
  double p_max() const { return *std::max_element(support.begin(), support.end()); }
  double p_min() const { return *std::min_element(support.begin(), support.end()); }
  bool respecting(double tol = kTolViolation) const {
    return empty() || (eta >= p_max() - tol && gamma <= p_min() + tol);
  }
};

enum class RangeSide { kMax, kMin };

/// `cutoff` is the raw threshold inside the violated interval; the child
/// bounds carry the integer tightening when payoffs are integral.
///   max side: left eta <= left_bound, right eta >= right_bound
///   min side: left gamma >= left_bound, right gamma <= right_bound
struct RangeCandidate {
  RangeSide side;
  double cutoff;
  double left_bound;
  double right_bound;
};

inline std::optional<RangeCandidate> detect_range_violation(const RangeView& view, double alpha,
                                                            bool integer_payoffs) {
  if (alpha < 0.0 || alpha >= 1.0) throw ConfigError("alpha must lie in [0, 1)");
  if (view.empty()) return std::nullopt;
  const double pmax = view.p_max();
  const double pmin = view.p_min();
  const double u_alpha = (1.0 + alpha) * view.eta;
  const double l_alpha = (1.0 - alpha) * view.gamma;
  const bool max_viol = pmax > u_alpha + kTolViolation;
  const bool min_viol = pmin < l_alpha - kTolViolation;
  if (!max_viol && !min_viol) return std::nullopt;

  bool use_max = max_viol;
  if (max_viol && min_viol) {
    double rmax = (pmax - view.eta) / std::max(1.0, std::abs(view.eta));
    double rmin = (view.gamma - pmin) / std::max(1.0, std::abs(view.gamma));
    use_max = rmax >= rmin;
  }
  RangeCandidate c{};
  if (use_max) {
    c.side = RangeSide::kMax;
    c.cutoff = alpha > 0.0 && u_alpha > view.eta + kTolViolation ? u_alpha : 0.5 * (view.eta + pmax);
    if (integer_payoffs) {
      c.left_bound = std::floor(c.cutoff + 1e-9);
      c.right_bound = c.left_bound + 1.0;
    } else {
      c.left_bound = c.right_bound = c.cutoff;
    }
  } else {
    c.side = RangeSide::kMin;
    bool relaxed = alpha > 0.0 && l_alpha < view.gamma - kTolViolation;
    c.cutoff = relaxed ? l_alpha : 0.5 * (view.gamma + pmin);
    if (integer_payoffs) {
      c.right_bound = relaxed ? std::ceil(c.cutoff - 1e-9) - 1.0 : std::floor(c.cutoff + 1e-9);
      c.left_bound = c.right_bound + 1.0;
    } else {
      c.left_bound = c.right_bound = c.cutoff;
    }
  }
  return c;
}

struct ChildDecisions {
  std::vector<Decision> left;
  std::vector<Decision> right;
};

inline ChildDecisions make_range_children(const RangeCandidate& c) {
  if (c.side == RangeSide::kMax) return {{EtaUpper{c.left_bound}}, {EtaLower{c.right_bound}}};
  return {{GammaLower{c.left_bound}}, {GammaUpper{c.right_bound}}};
}

/// y[k] holds (payoff, value) pairs of the columns at order position k.
struct OrderView {
  std::vector<std::vector<std::pair<double, double>>> y;
  std::vector<double> z;

  int size() const { return static_cast<int>(z.size()); }

  double p_minus(int k, double tol = kTolFeas) const {
    double m = kInf;
    for (int j = 0; j <= k; ++j)
      for (const auto& [p, v] : y[j])
        if (v > tol) m = std::min(m, p);
    return m;
  }
  double p_plus(int k, double tol = kTolFeas) const {
    double m = -kInf;
    for (int j = k; j < size(); ++j)
      for (const auto& [p, v] : y[j])
        if (v > tol) m = std::max(m, p);
    return m;
  }
  bool respecting(double tol = kTolViolation) const {
    for (int k = 0; k < size(); ++k)
      if (std::abs(z[k] - p_minus(k)) > tol || std::abs(z[k] - p_plus(k)) > tol) return false;
    return true;
  }
};

/// Left: z_k <= left_bound (payoff > left_bound forbidden at positions >= k).
/// Right: z_k >= right_bound (payoff < right_bound forbidden at positions <= k).
struct OrderCandidate {
  int k;
  bool too_high;  // z_k > p^k_-; otherwise z_k < p^k_+
  double cutoff;
  double left_bound;
  double right_bound;
};

/// Largest absolute violation wins, ties to the smallest position. With
/// alpha > 0 violations below alpha * max(1, |z_k|) are ignored.
inline std::optional<OrderCandidate> detect_order_violation(const OrderView& view, double alpha,
                                                            bool integer_payoffs) {
  if (alpha < 0.0 || alpha >= 1.0) throw ConfigError("alpha must lie in [0, 1)");
  if (view.size() < 2) throw ConfigError("order branching needs K >= 2");
  std::optional<OrderCandidate> best;
  double best_amount = 0.0;
  for (int k = 0; k < view.size(); ++k) {
    const double zk = view.z[k];
    const double thresh = std::max(kTolViolation, alpha * std::max(1.0, std::abs(zk)));
    const double lo = view.p_minus(k);
    const double hi = view.p_plus(k);
    const std::pair<bool, double> sides[2] = {{true, zk - lo}, {false, hi - zk}};
    for (const auto& [high, amount] : sides) {
      if (amount <= thresh || amount <= best_amount) continue;
      double cut = high ? 0.5 * (lo + zk) : 0.5 * (zk + hi);
      OrderCandidate c{k, high, cut, cut, cut};
      if (integer_payoffs) {
        c.left_bound = std::floor(cut + 1e-9);
        c.right_bound = c.left_bound + 1.0;
      }
      best = c;
      best_amount = amount;
    }
  }
  return best;
}

inline ChildDecisions make_order_children(const OrderCandidate& c) {
  return {{OrderCut{c.k, c.left_bound, true}}, {OrderCut{c.k, c.right_bound, false}}};
}

}  // namespace fairbnp
