#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fairbnp/common.hpp"

namespace fairbnp {

/// A priced master variable: a route (CVRP), an assignment (GAP) or an
/// explicit column of a small selection problem.
struct Column {
  int id = -1;
  int subproblem = 0;
  // Quantity entering the side constraint: route cost c_r or assignment
  // profit p_a. In cost-oriented runs it is also the objective coefficient.
  double cost = 0.0;
  double payoff = 0.0;
  // (element, multiplicity); multiplicity > 1 only for ng-relaxed routes.
  std::vector<std::pair<int, int>> elements;
  ElementSet covered;
  // Route vertex sequence including both depot visits, or sorted job list.
  std::vector<int> payload;

  int multiplicity(int e) const {
    for (const auto& [el, m] : elements)
      if (el == e) return m;
    return 0;
  }
  bool elementary() const {
    return std::all_of(elements.begin(), elements.end(), [](const auto& p) { return p.second == 1; });
  }

  /// Fills `elements` and `covered` from a list of visited elements.
  void set_elements(std::span<const int> visited) {
    elements.clear();
    covered.reset();
    std::vector<int> sorted(visited.begin(), visited.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();) {
      std::size_t j = i;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      elements.emplace_back(sorted[i], static_cast<int>(j - i));
      covered.set(static_cast<std::size_t>(sorted[i]));
      i = j;
    }
  }

  std::string key() const {
    std::string k = std::to_string(subproblem) + ':';
    for (int v : payload) {
      k += std::to_string(v);
      k += ',';
    }
    return k;
  }
};

/// All columns ever generated. Evicted columns stay in the archive so that
/// re-pricing them revives the original id.
class ColumnPool {
 public:
  struct Entry {
    Column column;
    int inactive_rounds = 0;
    bool archived = false;
    bool pinned = false;
  };

  /// Returns (id, inserted). A duplicate payload returns the existing id.
  std::pair<int, bool> insert(Column col) {
    std::string k = col.key();
    if (auto it = index_.find(k); it != index_.end()) return {it->second, false};
    int id = static_cast<int>(entries_.size());
    col.id = id;
    entries_.push_back(Entry{std::move(col)});
    index_.emplace(std::move(k), id);
    return {id, true};
  }

  int find(const Column& col) const {
    auto it = index_.find(col.key());
    return it == index_.end() ? -1 : it->second;
  }

  const Column& operator[](int id) const { return entries_[id].column; }
  Entry& entry(int id) { return entries_[id]; }
  const Entry& entry(int id) const { return entries_[id]; }
  int size() const { return static_cast<int>(entries_.size()); }

  void archive(int id) { entries_[id].archived = true; }
  void revive(int id) {
    entries_[id].archived = false;
    entries_[id].inactive_rounds = 0;
  }
  void set_pinned(int id, bool pinned) { entries_[id].pinned = pinned; }

  /// Updates inactivity counters for the columns present in the master.
  void record_round(std::span<const std::pair<int, double>> values, double tol = kTolFeas) {
    for (const auto& [id, v] : values) {
      auto& e = entries_[id];
      e.inactive_rounds = v <= tol ? e.inactive_rounds + 1 : 0;
    }
  }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, int> index_;
};

/// Archives non-pinned columns inactive for at least `threshold` consecutive
/// rounds among `candidates`; returns the evicted ids.
inline std::vector<int> age_and_evict(ColumnPool& pool, std::span<const int> candidates, int threshold) {
  if (threshold < 1) throw ConfigError("eviction threshold must be >= 1");
  std::vector<int> evicted;
  for (int id : candidates) {
    auto& e = pool.entry(id);
    if (e.archived || e.pinned) continue;
    if (e.inactive_rounds >= threshold) {
      pool.archive(id);
      evicted.push_back(id);
    }
  }
  return evicted;
}

}  // namespace fairbnp
