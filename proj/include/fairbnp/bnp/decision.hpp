#pragma once

#include <algorithm>
#include <sstream>
#include <string>
#include <variant>

#include "fairbnp/colgen/master.hpp"
#include "fairbnp/common.hpp"

namespace fairbnp {

// eta <= bound; columns with payoff > bound are fixed to zero.
struct EtaUpper {
  double bound;
};
// eta >= bound.
struct EtaLower {
  double bound;
};
// gamma >= bound; columns with payoff < bound are fixed to zero.
struct GammaLower {
  double bound;
};
// gamma <= bound.
struct GammaUpper {
  double bound;
};
// z_k <= bound with payoff > bound forbidden at positions >= k, or
// z_k >= bound with payoff < bound forbidden at positions <= k.
struct OrderCut {
  int k;
  double bound;
  bool upper;
};
// Subproblem must contribute a column (used) or may not contribute any.
struct SubproblemUse {
  int subproblem;
  bool used;
};
struct CustomerVehicle {
  int customer;
  int vehicle;
  bool forced;
};
// LastCustomer(i) is CustomerVehicle with the subproblem of customer i.
struct LastCustomer {
  int customer;
  bool forced;
};
struct Arc {
  int from;
  int to;
  bool forced;
};
struct JobAgent {
  int job;
  int agent;
  bool forced;
};

using Decision =
    std::variant<EtaUpper, EtaLower, GammaLower, GammaUpper, OrderCut, SubproblemUse, CustomerVehicle, LastCustomer, Arc, JobAgent>;

inline bool is_fairness_decision(const Decision& d) { return d.index() <= 4; }
inline bool is_generic_decision(const Decision& d) { return d.index() <= 5; }

inline std::string describe(const Decision& d) {
  std::ostringstream os;
  std::visit(
      [&os](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, EtaUpper>) os << "eta<=" << v.bound;
        else if constexpr (std::is_same_v<T, EtaLower>) os << "eta>=" << v.bound;
        else if constexpr (std::is_same_v<T, GammaLower>) os << "gamma>=" << v.bound;
        else if constexpr (std::is_same_v<T, GammaUpper>) os << "gamma<=" << v.bound;
        else if constexpr (std::is_same_v<T, OrderCut>) os << "z" << v.k << (v.upper ? "<=" : ">=") << v.bound;
        else if constexpr (std::is_same_v<T, SubproblemUse>) os << (v.used ? "" : "!") << "use" << v.subproblem;
        else if constexpr (std::is_same_v<T, CustomerVehicle>)
          os << "cust" << v.customer << (v.forced ? "@" : "!@") << "veh" << v.vehicle;
        else if constexpr (std::is_same_v<T, LastCustomer>) os << (v.forced ? "" : "!") << "last" << v.customer;
        else if constexpr (std::is_same_v<T, Arc>) os << (v.forced ? "" : "!") << "arc" << v.from << "-" << v.to;
        else os << "job" << v.job << (v.forced ? "@" : "!@") << "agent" << v.agent;
      },
      d);
  return os.str();
}

/// Applies a range, order or subproblem-use decision. Problem decisions are
/// left to plugins.
inline void apply_generic_decision(const Decision& d, NodeRestrictions& r) {
  if (const auto* v = std::get_if<EtaUpper>(&d)) {
    r.eta.hi = std::min(r.eta.hi, v->bound);
    for (auto& w : r.windows) w.hi = std::min(w.hi, v->bound);
  } else if (const auto* v = std::get_if<EtaLower>(&d)) {
    r.eta.lo = std::max(r.eta.lo, v->bound);
  } else if (const auto* v = std::get_if<GammaLower>(&d)) {
    r.gamma.lo = std::max(r.gamma.lo, v->bound);
    for (auto& w : r.windows) w.lo = std::max(w.lo, v->bound);
  } else if (const auto* v = std::get_if<GammaUpper>(&d)) {
    r.gamma.hi = std::min(r.gamma.hi, v->bound);
  } else if (const auto* v = std::get_if<OrderCut>(&d)) {
    auto& zk = r.z.at(v->k);
    int n = static_cast<int>(r.windows.size());
    if (v->upper) {
      zk.hi = std::min(zk.hi, v->bound);
      for (int j = v->k; j < n; ++j) r.windows[j].hi = std::min(r.windows[j].hi, v->bound);
    } else {
      zk.lo = std::max(zk.lo, v->bound);
      for (int j = 0; j <= v->k; ++j) r.windows[j].lo = std::max(r.windows[j].lo, v->bound);
    }
  } else if (const auto* v = std::get_if<SubproblemUse>(&d)) {
    r.usage.at(v->subproblem) = v->used ? 1 : -1;
  } else {
    throw InconsistencyError("not a generic decision: " + describe(d));
  }
}

}  // namespace fairbnp
