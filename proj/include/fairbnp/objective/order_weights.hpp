#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "fairbnp/common.hpp"

namespace fairbnp {

/// Weights v over the payoffs sorted non-increasingly.
struct OrderWeights {
  std::vector<double> v;

  int size() const { return static_cast<int>(v.size()); }
  bool integral() const {
    return std::all_of(v.begin(), v.end(), [](double w) { return is_integer_value(w); });
  }
  bool is_range() const {
    if (v.size() < 2 || v.front() != 1.0 || v.back() != -1.0) return false;
    return std::all_of(v.begin() + 1, v.end() - 1, [](double w) { return w == 0.0; });
  }
};

/// (1, 0, ..., 0, -1)
inline OrderWeights range_weights(int k) {
  if (k < 2) throw ConfigError("range weights need K >= 2");
  OrderWeights w{std::vector<double>(k, 0.0)};
  w.v.front() = 1.0;
  w.v.back() = -1.0;
  return w;
}

/// v_k = K - 2k + 1; v^T z equals the sum of pairwise absolute differences.
inline OrderWeights gini_weights(int k) {
  if (k < 2) throw ConfigError("Gini weights need K >= 2");
  OrderWeights w{std::vector<double>(k)};
  for (int i = 1; i <= k; ++i) w.v[i - 1] = static_cast<double>(k - 2 * i + 1);
  return w;
}

/// Sorts `payoffs` non-increasingly (stable, so equal payoffs keep their
/// input order) and returns v^T z.
inline double evaluate(const OrderWeights& w, std::span<const double> payoffs) {
  if (static_cast<int>(payoffs.size()) != w.size())
    throw ConfigError("evaluate: expected exactly K payoffs");
  std::vector<double> z(payoffs.begin(), payoffs.end());
  std::stable_sort(z.begin(), z.end(), std::greater<>());
  double s = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) s += w.v[k] * z[k];
  return s;
}

}  // namespace fairbnp
