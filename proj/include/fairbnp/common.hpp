#pragma once

#include <bitset>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace fairbnp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Primal feasibility and dual (reduced-cost) tolerances shared by the LP and
// the column generation layer.
inline constexpr double kTolFeas = 1e-7;
inline constexpr double kTolOpt = 1e-6;

// Tolerance used when testing master variables against {0, 1}.
inline constexpr double kTolIntegral = 1e-6;

inline constexpr std::size_t kMaxElements = 128;

/// Customers (CVRP) or jobs (GAP) covered by a column.
using ElementSet = std::bitset<kMaxElements>;

inline bool is_subset(const ElementSet& a, const ElementSet& b) {
  return (a & ~b).none();
}

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an internal invariant is violated (never for bad input).
class InconsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Thrown by a pricer that ran past its deadline.
class PricingTimeout : public std::runtime_error {
 public:
  PricingTimeout() : std::runtime_error("pricing ran past the deadline") {}
};

using Clock = std::chrono::steady_clock;

/// Thrown by brute-force oracles when an instance exceeds their size cap.
class SizeCapError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Closed payoff interval [lo, hi] imposed on a subproblem's columns.
struct Window {
  double lo = 0.0;
  double hi = kInf;

  bool contains(double payoff, double tol = kTolFeas) const {
    return payoff >= lo - tol && payoff <= hi + tol;
  }
  bool empty() const { return lo > hi + kTolFeas; }
  bool has_lower() const { return lo > 0.0; }
  bool has_upper() const { return hi < kInf; }

  Window intersect(const Window& o) const {
    return {std::max(lo, o.lo), std::min(hi, o.hi)};
  }
  friend bool operator==(const Window&, const Window&) = default;
};

inline bool is_integer_value(double v, double tol = 1e-9) {
  return std::abs(v - std::round(v)) <= tol;
}

}  // namespace fairbnp
