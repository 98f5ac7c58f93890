#pragma once

// Exact-weight 0/1 knapsack: entry (k, c) is the best value of items
// 1..k with total weight exactly c.

#include <limits>
#include <optional>
#include <vector>

#include "fairbnp/common.hpp"

namespace fairbnp::gap {

struct KnapsackItem {
  int id = 0;
  long long weight = 0;
  double value = 0.0;
};

class DpTable {
 public:
  DpTable(const std::vector<KnapsackItem>& items, long long capacity)
      : items_(items), cap_(capacity < 0 ? -1 : capacity) {
    const std::size_t k = items.size();
    const std::size_t w = static_cast<std::size_t>(cap_ + 1);
    value_.assign(k + 1, std::vector<double>(w, kUnreachable));
    count_.assign(k + 1, std::vector<int>(w, 0));
    if (cap_ < 0) return;
    value_[0][0] = 0.0;
    for (std::size_t t = 1; t <= k; ++t) {
      const auto& it = items[t - 1];
      for (std::size_t c = 0; c < w; ++c) {
        value_[t][c] = value_[t - 1][c];
        count_[t][c] = count_[t - 1][c];
        if (static_cast<long long>(c) < it.weight) continue;
        std::size_t prev = c - static_cast<std::size_t>(it.weight);
        if (value_[t - 1][prev] == kUnreachable) continue;
        double v = value_[t - 1][prev] + it.value;
        int n = count_[t - 1][prev] + 1;
        if (value_[t][c] == kUnreachable || v > value_[t][c] || (v == value_[t][c] && n < count_[t][c])) {
          value_[t][c] = v;
          count_[t][c] = n;
        }
      }
    }
  }

  static constexpr double kUnreachable = -std::numeric_limits<double>::infinity();

  long long capacity() const { return cap_; }
  bool reachable(std::size_t k, long long c) const {
    return c >= 0 && c <= cap_ && value_[k][static_cast<std::size_t>(c)] != kUnreachable;
  }
  double value(std::size_t k, long long c) const { return value_[k][static_cast<std::size_t>(c)]; }
  int count(std::size_t k, long long c) const { return count_[k][static_cast<std::size_t>(c)]; }

  /// Best weight within [lo, hi]; ties go to fewer items, then lower weight.
  std::optional<long long> best_weight(long long lo, long long hi) const {
    const std::size_t k = items_.size();
    std::optional<long long> best;
    for (long long c = std::max(0LL, lo); c <= std::min(hi, cap_); ++c) {
      if (!reachable(k, c)) continue;
      if (!best || value(k, c) > value(k, *best) || (value(k, c) == value(k, *best) && count(k, c) < count(k, *best)))
        best = c;
    }
    return best;
  }

  /// Item ids of an optimal subset at exact weight c.
  std::vector<int> items_at(long long c) const {
    std::vector<int> out;
    for (std::size_t t = items_.size(); t > 0; --t) {
      auto cu = static_cast<std::size_t>(c);
      if (value_[t][cu] == value_[t - 1][cu] && count_[t][cu] == count_[t - 1][cu]) continue;
      out.push_back(items_[t - 1].id);
      c -= items_[t - 1].weight;
    }
    if (c != 0) throw InconsistencyError("knapsack backtrack did not reach weight zero");
    return out;
  }

 private:
  std::vector<KnapsackItem> items_;
  long long cap_;
  std::vector<std::vector<double>> value_;
  std::vector<std::vector<int>> count_;
};

}  // namespace fairbnp::gap
