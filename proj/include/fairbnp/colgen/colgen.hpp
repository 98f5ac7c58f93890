#pragma once

#include <chrono>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "fairbnp/colgen/column.hpp"
#include "fairbnp/colgen/master.hpp"
#include "fairbnp/common.hpp"
#include "fairbnp/lp/simplex.hpp"

namespace fairbnp {


/// Pricing callback: returns columns of request.subproblem, ideally with
/// negative reduced cost. Must be safe to call concurrently for distinct
/// subproblems.
using Pricer = std::function<std::vector<Column>(const PricingRequest&)>;

/// Extra node-level admission test (arc fixings and the like).
using ColumnFilter = std::function<bool(const Column&)>;

struct ColgenOptions {
  int max_columns = 20;
  int eviction_threshold = 20;
  int max_rounds = 100000;
  double tol_opt = kTolOpt;
  int threads = 1;
  std::optional<Clock::time_point> deadline;
};

enum class ColgenStatus { kOptimal, kInfeasible, kTimeLimit, kNumerical };

inline const char* to_string(ColgenStatus s) {
  switch (s) {
    case ColgenStatus::kOptimal: return "Optimal";
    case ColgenStatus::kInfeasible: return "Infeasible";
    case ColgenStatus::kTimeLimit: return "TimeLimit";
    case ColgenStatus::kNumerical: return "Numerical";
  }
  return "?";
}

struct RoundTrace {
  int round = 0;
  int phase = 2;
  double objective = 0.0;
  int columns_added = 0;
};

struct ColgenResult {
  ColgenStatus status = ColgenStatus::kNumerical;
  bool proven_optimal = false;
  double objective = 0.0;
  std::vector<double> duals;
  std::vector<std::pair<int, double>> values;  // (pool id, value) of active columns
  double eta = 0.0;
  double gamma = 0.0;
  std::vector<double> z;
  int rounds = 0;
  int columns_added = 0;
  std::vector<RoundTrace> trace;
  lp::Basis basis;
};

/// Threads for within-node pricing: FAIRBNP_THREADS, default 1.
inline int pricing_threads_from_env() {
  const char* v = std::getenv("FAIRBNP_THREADS");
  if (v == nullptr) return 1;
  int n = std::atoi(v);
  return n >= 1 ? n : 1;
}

namespace detail {

inline std::vector<Column> price_one(const PricingRequest& req, const Pricer& pricer) {
  if (req.disabled) return {};
  if (req.deadline && Clock::now() >= *req.deadline) throw PricingTimeout();
  return pricer(req);
}

inline std::vector<std::vector<Column>> price_all(const std::vector<PricingRequest>& reqs, const Pricer& pricer,
                                                  int threads) {
  std::vector<std::vector<Column>> out(reqs.size());
  int n = static_cast<int>(reqs.size());
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) out[i] = price_one(reqs[i], pricer);
    return out;
  }
  int t = std::min(threads, n);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(t);
  for (int w = 0; w < t; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += t) out[i] = price_one(reqs[i], pricer);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace detail

/// Column generation at one node. Loads nothing itself: the caller adds the
/// admissible pool columns to `master` beforehand.
inline ColgenResult run_colgen(MasterProblem& master, ColumnPool& pool, const Pricer& pricer,
                               const NodeRestrictions& restr, const ColgenOptions& opt,
                               const ColumnFilter& filter = {}) {
  ColgenResult res;
  const int S = master.layout().num_subproblems;
  lp::Basis basis;
  bool tried_phase1 = false;
  const double art_tol = 1e-6;

  for (int round = 1;; ++round) {
    if (round > opt.max_rounds) {
      res.status = ColgenStatus::kNumerical;
      return res;
    }
    if (opt.deadline && Clock::now() >= *opt.deadline) {
      res.status = ColgenStatus::kTimeLimit;
      return res;
    }
    lp::LpSolution sol = lp::solve(master.model(), basis.empty() ? nullptr : &basis);
    res.rounds = round;
    if (sol.status == lp::LpStatus::kInfeasible) {
      res.status = ColgenStatus::kInfeasible;
      return res;
    }
    if (sol.status != lp::LpStatus::kOptimal) {
      res.status = ColgenStatus::kNumerical;
      return res;
    }
    basis = sol.basis;

    std::vector<std::pair<int, double>> values;
    std::vector<int> nonbasic;
    for (int id : master.active_pool_ids()) {
      int j = master.lp_id(id);
      values.emplace_back(id, sol.primal[j]);
      if (sol.basis.cols[j] != lp::VarState::kBasic) nonbasic.push_back(id);
    }
    pool.record_round(values);
    for (int id : age_and_evict(pool, nonbasic, opt.eviction_threshold)) master.set_active(id, false);

    std::vector<PricingRequest> reqs;
    reqs.reserve(S);
    for (int k = 0; k < S; ++k) {
      reqs.push_back(master.request(k, sol.duals, restr, opt.max_columns));
      reqs.back().deadline = opt.deadline;
    }
    std::vector<std::vector<Column>> priced;
    try {
      priced = detail::price_all(reqs, pricer, opt.threads);
    } catch (const PricingTimeout&) {
      res.status = ColgenStatus::kTimeLimit;
      return res;
    }

    int added = 0;
    for (int k = 0; k < S; ++k) {
      for (auto& col : priced[k]) {
        if (col.subproblem != k) throw InconsistencyError("pricer returned a column of another subproblem");
        if (reqs[k].reduced_cost(col) >= -opt.tol_opt) continue;
        if (!restr.admits(col) || (filter && !filter(col)))
          throw InconsistencyError("pricer returned a column violating node restrictions");
        auto [id, inserted] = pool.insert(std::move(col));
        if (master.contains(id)) {
          if (master.is_active(id)) continue;
          master.set_active(id, true);
        } else {
          master.add_column(pool[id]);
        }
        pool.revive(id);
        ++added;
      }
    }
    res.trace.push_back({round, master.phase(), sol.objective, added});
    res.columns_added += added;
    if (added > 0) continue;

    double mass = master.artificial_mass(sol);
    if (master.phase() == 2 && mass > art_tol && !tried_phase1) {
      tried_phase1 = true;
      master.set_phase(1);
      continue;
    }
    if (master.phase() == 1) {
      if (sol.objective > art_tol) {
        res.status = ColgenStatus::kInfeasible;
        return res;
      }
      master.set_phase(2, true);
      basis = {};
      continue;
    }
    if (mass > art_tol) {
      res.status = ColgenStatus::kInfeasible;
      return res;
    }

    res.status = ColgenStatus::kOptimal;
    res.proven_optimal = true;
    res.objective = sol.objective;
    res.duals = sol.duals;
    res.values.clear();
    for (const auto& [id, v] : values)
      if (master.is_active(id) || v > kTolFeas) res.values.emplace_back(id, v);
    if (master.eta_col() >= 0) res.eta = sol.primal[master.eta_col()];
    if (master.gamma_col() >= 0) res.gamma = sol.primal[master.gamma_col()];
    for (int c : master.z_cols()) res.z.push_back(sol.primal[c]);
    res.basis = sol.basis;
    return res;
  }
}

}  // namespace fairbnp
