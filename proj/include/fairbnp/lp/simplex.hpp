#pragma once

// Bounded-variable revised simplex for restricted master problems.
//
// Every row i is turned into an equality  a_i x - r_i = 0  where the row
// activity r_i carries the row bounds, so all constraints become variable
// bounds. Phase 1 minimizes the sum of artificial variables added only for
// rows whose activity starts outside its bounds.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "fairbnp/common.hpp"

namespace fairbnp::lp {

enum class RowSense { kLessEqual, kGreaterEqual, kEqual };

struct RowSpec {
  RowSense sense = RowSense::kEqual;
  double rhs = 0.0;
  std::string name;
};

struct ColSpec {
  double cost = 0.0;
  double lo = 0.0;
  double hi = kInf;
  std::vector<std::pair<int, double>> coefs;  // (row, value)
  std::string name;
};

class LpModel {
 public:
  int add_row(RowSpec row) {
    if (!std::isfinite(row.rhs)) throw ConfigError("row rhs must be finite");
    rows_.push_back(std::move(row));
    return static_cast<int>(rows_.size()) - 1;
  }

  /// Appends a column. Ids are dense and stable for the model's lifetime.
  int add_column(ColSpec col) {
    if (!std::isfinite(col.cost)) throw ConfigError("non-finite objective coefficient");
    if (col.lo > col.hi) throw ConfigError("column lower bound exceeds upper bound");
    if (std::isnan(col.lo) || std::isnan(col.hi) || col.lo == kInf || col.hi == -kInf)
      throw ConfigError("invalid column bounds");
    for (const auto& [r, v] : col.coefs) {
      if (r < 0 || r >= num_rows()) throw ConfigError("coefficient references unknown row");
      if (!std::isfinite(v)) throw ConfigError("non-finite constraint coefficient");
    }
    cols_.push_back(std::move(col));
    active_.push_back(true);
    return static_cast<int>(cols_.size()) - 1;
  }

  void set_variable_bounds(int col, double lo, double hi) {
    check_col(col);
    if (lo > hi) throw ConfigError("set_variable_bounds: lo > hi");
    cols_[col].lo = lo;
    cols_[col].hi = hi;
  }

  void set_objective(int col, double cost) {
    check_col(col);
    if (!std::isfinite(cost)) throw ConfigError("non-finite objective coefficient");
    cols_[col].cost = cost;
  }

  void set_rhs(int row, double rhs) {
    if (row < 0 || row >= num_rows()) throw ConfigError("unknown row");
    rows_[row].rhs = rhs;
  }

  /// Inactive columns are ignored by the solver (treated as absent).
  void set_active(int col, bool active) {
    check_col(col);
    active_[col] = active;
  }
  bool is_active(int col) const { return active_[col]; }

  int num_rows() const { return static_cast<int>(rows_.size()); }
  int num_cols() const { return static_cast<int>(cols_.size()); }
  const RowSpec& row(int i) const { return rows_[i]; }
  const ColSpec& col(int j) const { return cols_[j]; }

 private:
  void check_col(int col) const {
    if (col < 0 || col >= num_cols()) throw ConfigError("unknown column");
  }

  std::vector<RowSpec> rows_;
  std::vector<ColSpec> cols_;
  std::vector<bool> active_;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "Optimal";
    case LpStatus::kInfeasible: return "Infeasible";
    case LpStatus::kUnbounded: return "Unbounded";
    case LpStatus::kIterationLimit: return "IterationLimit";
  }
  return "?";
}

enum class VarState : unsigned char { kBasic, kAtLower, kAtUpper, kFreeZero };

/// Basis over model columns and row activities; usable as a warm start.
struct Basis {
  std::vector<VarState> cols;
  std::vector<VarState> rows;
  bool empty() const { return cols.empty() && rows.empty(); }
};

struct LpSolution {
  LpStatus status = LpStatus::kIterationLimit;
  double objective = 0.0;
  std::vector<double> primal;         // per model column (0 for inactive)
  std::vector<double> duals;          // per row
  std::vector<double> reduced_costs;  // per model column
  std::vector<double> row_activity;
  Basis basis;
  int iterations = 0;
  bool warm_started = false;
};

struct SimplexOptions {
  double tol_feas = kTolFeas;
  double tol_opt = kTolOpt;
  long max_iterations = 0;  // 0: 100 * (rows + cols)
  int bland_after_degenerate = 50;
  int refactor_every = 64;
};

namespace detail {

class Simplex {
 public:
  Simplex(const LpModel& model, const SimplexOptions& opt) : model_(model), opt_(opt) {
    m_ = model.num_rows();
    col_map_.assign(model.num_cols(), -1);
    for (int j = 0; j < model.num_cols(); ++j) {
      if (!model.is_active(j)) continue;
      const auto& c = model.col(j);
      col_map_[j] = add_var(c.lo, c.hi, c.cost, c.coefs, j);
    }
    num_struct_ = static_cast<int>(lo_.size());
    row_var_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      const auto& r = model.row(i);
      double lo = -kInf, hi = kInf;
      if (r.sense == RowSense::kLessEqual) hi = r.rhs;
      if (r.sense == RowSense::kGreaterEqual) lo = r.rhs;
      if (r.sense == RowSense::kEqual) lo = hi = r.rhs;
      row_var_[i] = add_var(lo, hi, 0.0, {{i, -1.0}}, -1);
    }
    num_real_ = static_cast<int>(lo_.size());
  }

  LpSolution run(const Basis* warm) {
    LpSolution sol;
    long cap = opt_.max_iterations > 0 ? opt_.max_iterations
                                       : 100L * (m_ + std::max(1, num_struct_));
    iteration_cap_ = cap;

    bool warm_ok = false;
    if (warm != nullptr && !warm->empty()) warm_ok = load_warm(*warm);
    sol.warm_started = warm_ok;

    if (!warm_ok) {
      cold_start();
      if (!artificials_.empty()) {
        set_phase1_costs();
        LpStatus st = iterate();
        if (st != LpStatus::kOptimal) {
          sol.status = st == LpStatus::kUnbounded ? LpStatus::kIterationLimit : st;
          sol.iterations = static_cast<int>(iterations_);
          return sol;
        }
        double infeas = 0.0;
        for (int a : artificials_) infeas += std::max(0.0, x_[a]);
        if (infeas > opt_.tol_feas * std::max(1.0, static_cast<double>(m_))) {
          sol.status = LpStatus::kInfeasible;
          sol.iterations = static_cast<int>(iterations_);
          return sol;
        }
        for (int a : artificials_) {
          hi_[a] = 0.0;
          if (state_[a] != VarState::kBasic) {
            state_[a] = VarState::kAtLower;
            x_[a] = 0.0;
          }
        }
        drive_out_artificials();
        if (!factorize()) {
          sol.status = LpStatus::kIterationLimit;
          return sol;
        }
        compute_basic_values();
      }
    }
    set_phase2_costs();
    LpStatus st = iterate();
    sol.status = st;
    sol.iterations = static_cast<int>(iterations_);
    if (st != LpStatus::kOptimal) return sol;

    if (!factorize()) {
      sol.status = LpStatus::kIterationLimit;
      return sol;
    }
    compute_basic_values();
    extract(sol);
    return sol;
  }

 private:
  int add_var(double lo, double hi, double cost, std::vector<std::pair<int, double>> col,
              int model_id) {
    lo_.push_back(lo);
    hi_.push_back(hi);
    real_cost_.push_back(cost);
    a_.push_back(std::move(col));
    model_id_.push_back(model_id);
    return static_cast<int>(lo_.size()) - 1;
  }

  static double initial_value(double lo, double hi) {
    if (std::isfinite(lo)) return lo;
    if (std::isfinite(hi)) return hi;
    return 0.0;
  }
  static VarState initial_state(double lo, double hi) {
    if (std::isfinite(lo)) return VarState::kAtLower;
    if (std::isfinite(hi)) return VarState::kAtUpper;
    return VarState::kFreeZero;
  }

  void cold_start() {
    int n = num_real_;
    lo_.resize(n);
    hi_.resize(n);
    real_cost_.resize(n);
    a_.resize(n);
    model_id_.resize(n);
    artificials_.clear();
    state_.assign(n, VarState::kAtLower);
    x_.assign(n, 0.0);
    std::vector<double> act(m_, 0.0);
    for (int j = 0; j < num_struct_; ++j) {
      state_[j] = initial_state(lo_[j], hi_[j]);
      x_[j] = initial_value(lo_[j], hi_[j]);
      if (x_[j] != 0.0)
        for (const auto& [r, v] : a_[j]) act[r] += v * x_[j];
    }
    head_.assign(m_, -1);
    for (int i = 0; i < m_; ++i) {
      int rv = row_var_[i];
      if (act[i] >= lo_[rv] - opt_.tol_feas && act[i] <= hi_[rv] + opt_.tol_feas) {
        state_[rv] = VarState::kBasic;
        x_[rv] = act[i];
        head_[i] = rv;
        continue;
      }
      double target = act[i] < lo_[rv] ? lo_[rv] : hi_[rv];
      state_[rv] = act[i] < lo_[rv] ? VarState::kAtLower : VarState::kAtUpper;
      x_[rv] = target;
      double sigma = target - act[i] > 0 ? 1.0 : -1.0;
      int av = add_var(0.0, kInf, 0.0, {{i, sigma}}, -1);
      state_.push_back(VarState::kBasic);
      x_.push_back(std::abs(target - act[i]));
      artificials_.push_back(av);
      head_[i] = av;
    }
    factorize();
  }

  bool load_warm(const Basis& b) {
    if (static_cast<int>(b.cols.size()) != model_.num_cols() ||
        static_cast<int>(b.rows.size()) != m_)
      return false;
    state_.assign(num_real_, VarState::kAtLower);
    x_.assign(num_real_, 0.0);
    head_.clear();
    for (int j = 0; j < model_.num_cols(); ++j) {
      int v = col_map_[j];
      if (v < 0) continue;
      state_[v] = b.cols[j];
    }
    for (int i = 0; i < m_; ++i) state_[row_var_[i]] = b.rows[i];
    for (int v = 0; v < num_real_; ++v) {
      switch (state_[v]) {
        case VarState::kBasic: head_.push_back(v); break;
        case VarState::kAtLower:
          if (!std::isfinite(lo_[v])) return false;
          x_[v] = lo_[v];
          break;
        case VarState::kAtUpper:
          if (!std::isfinite(hi_[v])) return false;
          x_[v] = hi_[v];
          break;
        case VarState::kFreeZero:
          if (std::isfinite(lo_[v]) || std::isfinite(hi_[v])) return false;
          x_[v] = 0.0;
          break;
      }
    }
    if (static_cast<int>(head_.size()) != m_) return false;
    if (!factorize()) return false;
    compute_basic_values();
    for (int v : head_)
      if (x_[v] < lo_[v] - opt_.tol_feas || x_[v] > hi_[v] + opt_.tol_feas) return false;
    return true;
  }

  void set_phase1_costs() {
    cost_.assign(lo_.size(), 0.0);
    for (int a : artificials_) cost_[a] = 1.0;
  }
  void set_phase2_costs() {
    cost_ = real_cost_;
    for (int a : artificials_) cost_[a] = 0.0;
  }

  bool factorize() {
    // Gauss-Jordan inversion of the dense basis matrix with partial pivoting.
    std::vector<double> B(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int k = 0; k < m_; ++k)
      for (const auto& [r, v] : a_[head_[k]]) B[r * m_ + k] = v;
    binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) binv_[i * m_ + i] = 1.0;
    for (int c = 0; c < m_; ++c) {
      int piv = -1;
      double best = 1e-11;
      for (int r = c; r < m_; ++r) {
        double v = std::abs(B[r * m_ + c]);
        if (v > best) {
          best = v;
          piv = r;
        }
      }
      if (piv < 0) return false;
      if (piv != c) {
        for (int k = 0; k < m_; ++k) {
          std::swap(B[piv * m_ + k], B[c * m_ + k]);
          std::swap(binv_[piv * m_ + k], binv_[c * m_ + k]);
        }
      }
      double d = B[c * m_ + c];
      for (int k = 0; k < m_; ++k) {
        B[c * m_ + k] /= d;
        binv_[c * m_ + k] /= d;
      }
      for (int r = 0; r < m_; ++r) {
        if (r == c) continue;
        double f = B[r * m_ + c];
        if (f == 0.0) continue;
        for (int k = 0; k < m_; ++k) {
          B[r * m_ + k] -= f * B[c * m_ + k];
          binv_[r * m_ + k] -= f * binv_[c * m_ + k];
        }
      }
    }
    // Rows of binv_ now correspond to basis positions: binv_ = B^{-1}.
    pivots_since_refactor_ = 0;
    return true;
  }

  void compute_basic_values() {
    std::vector<double> rhs(m_, 0.0);
    std::vector<bool> basic(lo_.size(), false);
    for (int v : head_) basic[v] = true;
    for (std::size_t v = 0; v < lo_.size(); ++v) {
      if (basic[v] || x_[v] == 0.0) continue;
      for (const auto& [r, c] : a_[v]) rhs[r] -= c * x_[v];
    }
    for (int k = 0; k < m_; ++k) {
      double s = 0.0;
      const double* row = &binv_[k * m_];
      for (int i = 0; i < m_; ++i) s += row[i] * rhs[i];
      x_[head_[k]] = s;
    }
  }

  std::vector<double> duals() const {
    std::vector<double> y(m_, 0.0);
    for (int k = 0; k < m_; ++k) {
      double cb = cost_[head_[k]];
      if (cb == 0.0) continue;
      const double* row = &binv_[k * m_];
      for (int i = 0; i < m_; ++i) y[i] += cb * row[i];
    }
    return y;
  }

  double reduced_cost(int v, const std::vector<double>& y) const {
    double d = cost_[v];
    for (const auto& [r, c] : a_[v]) d -= y[r] * c;
    return d;
  }

  std::vector<double> ftran(int v) const {
    std::vector<double> alpha(m_, 0.0);
    for (const auto& [r, c] : a_[v])
      for (int k = 0; k < m_; ++k) alpha[k] += binv_[k * m_ + r] * c;
    return alpha;
  }

  void pivot_update(int row, const std::vector<double>& alpha) {
    double p = alpha[row];
    double* prow = &binv_[row * m_];
    for (int i = 0; i < m_; ++i) prow[i] /= p;
    for (int k = 0; k < m_; ++k) {
      if (k == row || alpha[k] == 0.0) continue;
      double f = alpha[k];
      double* krow = &binv_[k * m_];
      for (int i = 0; i < m_; ++i) krow[i] -= f * prow[i];
    }
  }

  LpStatus iterate() {
    int degenerate_run = 0;
    while (true) {
      if (iterations_ >= iteration_cap_) return LpStatus::kIterationLimit;
      std::vector<double> y = duals();
      bool bland = degenerate_run >= opt_.bland_after_degenerate;

      int enter = -1;
      double enter_d = 0.0;
      double best_score = 0.0;
      for (std::size_t v = 0; v < lo_.size(); ++v) {
        VarState s = state_[v];
        if (s == VarState::kBasic) continue;
        if (lo_[v] == hi_[v]) continue;
        double d = reduced_cost(static_cast<int>(v), y);
        bool eligible = (s == VarState::kAtLower && d < -opt_.tol_opt) ||
                        (s == VarState::kAtUpper && d > opt_.tol_opt) ||
                        (s == VarState::kFreeZero && std::abs(d) > opt_.tol_opt);
        if (!eligible) continue;
        if (bland) {
          enter = static_cast<int>(v);
          enter_d = d;
          break;
        }
        if (std::abs(d) > best_score) {
          best_score = std::abs(d);
          enter = static_cast<int>(v);
          enter_d = d;
        }
      }
      if (enter < 0) return LpStatus::kOptimal;

      double dir = enter_d < 0 ? 1.0 : -1.0;
      std::vector<double> alpha = ftran(enter);

      // Ratio test; basic k moves by -dir * alpha_k per unit step.
      double t_best = kInf;
      int leave_row = -1;
      bool leave_to_upper = false;
      if (std::isfinite(lo_[enter]) && std::isfinite(hi_[enter])) t_best = hi_[enter] - lo_[enter];
      constexpr double kPivTol = 1e-9;
      double best_alpha = 0.0;
      for (int k = 0; k < m_; ++k) {
        double rate = -dir * alpha[k];
        if (std::abs(rate) <= kPivTol) continue;
        int b = head_[k];
        double t;
        bool to_upper;
        if (rate < 0) {
          if (!std::isfinite(lo_[b])) continue;
          t = (x_[b] - lo_[b]) / (-rate);
          to_upper = false;
        } else {
          if (!std::isfinite(hi_[b])) continue;
          t = (hi_[b] - x_[b]) / rate;
          to_upper = true;
        }
        if (t < 0) t = 0;
        bool better;
        if (t < t_best - 1e-12) {
          better = true;
        } else if (t <= t_best + 1e-12 && leave_row >= 0) {
          better = bland ? head_[k] < head_[leave_row] : std::abs(alpha[k]) > best_alpha;
        } else if (t <= t_best + 1e-12 && leave_row < 0 && std::isfinite(t_best)) {
          // Prefer a basis change over a bound flip on ties.
          better = true;
        } else {
          better = false;
        }
        if (better) {
          t_best = t;
          leave_row = k;
          leave_to_upper = to_upper;
          best_alpha = std::abs(alpha[k]);
        }
      }
      if (!std::isfinite(t_best)) return LpStatus::kUnbounded;

      ++iterations_;
      degenerate_run = t_best < 1e-12 ? degenerate_run + 1 : 0;

      x_[enter] += dir * t_best;
      for (int k = 0; k < m_; ++k)
        if (alpha[k] != 0.0) x_[head_[k]] -= dir * t_best * alpha[k];

      if (leave_row < 0) {
        // Bound flip of the entering variable.
        state_[enter] = dir > 0 ? VarState::kAtUpper : VarState::kAtLower;
        x_[enter] = dir > 0 ? hi_[enter] : lo_[enter];
        continue;
      }
      int leaving = head_[leave_row];
      state_[leaving] = leave_to_upper ? VarState::kAtUpper : VarState::kAtLower;
      x_[leaving] = leave_to_upper ? hi_[leaving] : lo_[leaving];
      state_[enter] = VarState::kBasic;
      head_[leave_row] = enter;
      pivot_update(leave_row, alpha);
      if (++pivots_since_refactor_ >= opt_.refactor_every) {
        if (!factorize()) return LpStatus::kIterationLimit;
        compute_basic_values();
      }
    }
  }

  void drive_out_artificials() {
    for (int k = 0; k < m_; ++k) {
      int b = head_[k];
      if (b < num_real_) continue;
      for (int v = 0; v < num_real_; ++v) {
        if (state_[v] == VarState::kBasic) continue;
        std::vector<double> alpha = ftran(v);
        if (std::abs(alpha[k]) < 1e-7) continue;
        // Degenerate pivot: the artificial sits at zero.
        state_[b] = VarState::kAtLower;
        x_[b] = 0.0;
        state_[v] = VarState::kBasic;
        head_[k] = v;
        pivot_update(k, alpha);
        break;
      }
    }
  }

  void extract(LpSolution& sol) {
    int ncols = model_.num_cols();
    sol.primal.assign(ncols, 0.0);
    sol.reduced_costs.assign(ncols, 0.0);
    std::vector<double> y = duals();
    sol.duals = y;
    double obj = 0.0;
    for (int j = 0; j < ncols; ++j) {
      int v = col_map_[j];
      if (v < 0) continue;
      sol.primal[j] = x_[v];
      sol.reduced_costs[j] = state_[v] == VarState::kBasic ? 0.0 : reduced_cost(v, y);
      obj += real_cost_[v] * x_[v];
    }
    sol.objective = obj;
    sol.row_activity.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) sol.row_activity[i] = x_[row_var_[i]];

    bool exportable = true;
    for (int v : head_)
      if (v >= num_real_) exportable = false;
    if (exportable) {
      sol.basis.cols.assign(ncols, VarState::kAtLower);
      sol.basis.rows.assign(m_, VarState::kAtLower);
      for (int j = 0; j < ncols; ++j) {
        int v = col_map_[j];
        if (v < 0) {
          const auto& c = model_.col(j);
          sol.basis.cols[j] = initial_state(c.lo, c.hi);
        } else {
          sol.basis.cols[j] = state_[v];
        }
      }
      for (int i = 0; i < m_; ++i) sol.basis.rows[i] = state_[row_var_[i]];
    }
  }

  const LpModel& model_;
  SimplexOptions opt_;
  int m_ = 0;
  int num_struct_ = 0;
  int num_real_ = 0;
  long iterations_ = 0;
  long iteration_cap_ = 0;
  int pivots_since_refactor_ = 0;

  std::vector<double> lo_, hi_, real_cost_, cost_, x_;
  std::vector<std::vector<std::pair<int, double>>> a_;
  std::vector<int> model_id_;
  std::vector<VarState> state_;
  std::vector<int> col_map_, row_var_, head_, artificials_;
  std::vector<double> binv_;
};

}  // namespace detail

/// Solves min c^T x over the model's rows and bounds.
inline LpSolution solve(const LpModel& model, const Basis* warm_start = nullptr,
                        const SimplexOptions& options = {}) {
  detail::Simplex simplex(model, options);
  return simplex.run(warm_start);
}

/// Dual objective b^T y plus bound terms of the structural reduced costs.
/// Equals the primal objective at an optimal basis.
inline double dual_objective(const LpModel& model, const LpSolution& sol) {
  double v = 0.0;
  for (int i = 0; i < model.num_rows(); ++i) v += model.row(i).rhs * sol.duals[i];
  for (int j = 0; j < model.num_cols(); ++j) {
    if (!model.is_active(j)) continue;
    double d = sol.reduced_costs[j];
    if (d == 0.0) continue;
    v += d * sol.primal[j];
  }
  // Row activities sitting strictly inside their bounds have zero duals, so
  // b^T y only counts rows at their rhs.
  return v;
}

/// Plain-text LP dump, one constraint per line.
inline void write_lp(std::ostream& os, const LpModel& model) {
  auto term = [&os](double v, const std::string& name, bool first) {
    if (v < 0)
      os << (first ? "-" : " - ");
    else if (!first)
      os << " + ";
    os << std::abs(v) << ' ' << name;
  };
  auto col_name = [&model](int j) {
    const auto& n = model.col(j).name;
    return n.empty() ? "x" + std::to_string(j) : n;
  };
  os << "Minimize\n obj:";
  bool first = true;
  for (int j = 0; j < model.num_cols(); ++j) {
    if (!model.is_active(j) || model.col(j).cost == 0.0) continue;
    os << ' ';
    term(model.col(j).cost, col_name(j), first);
    first = false;
  }
  if (first) os << " 0";
  os << "\nSubject To\n";
  std::vector<std::vector<std::pair<int, double>>> rows(model.num_rows());
  for (int j = 0; j < model.num_cols(); ++j) {
    if (!model.is_active(j)) continue;
    for (const auto& [r, v] : model.col(j).coefs) rows[r].emplace_back(j, v);
  }
  for (int i = 0; i < model.num_rows(); ++i) {
    const auto& r = model.row(i);
    os << ' ' << (r.name.empty() ? "r" + std::to_string(i) : r.name) << ':';
    bool f = true;
    for (const auto& [j, v] : rows[i]) {
      os << ' ';
      term(v, col_name(j), f);
      f = false;
    }
    if (f) os << " 0";
    os << (r.sense == RowSense::kLessEqual ? " <= " : r.sense == RowSense::kGreaterEqual ? " >= " : " = ")
       << r.rhs << '\n';
  }
  os << "Bounds\n";
  for (int j = 0; j < model.num_cols(); ++j) {
    if (!model.is_active(j)) continue;
    const auto& c = model.col(j);
    os << ' ';
    if (std::isfinite(c.lo)) os << c.lo; else os << "-inf";
    os << " <= " << col_name(j) << " <= ";
    if (std::isfinite(c.hi)) os << c.hi; else os << "+inf";
    os << '\n';
  }
  os << "End\n";
}

}  // namespace fairbnp::lp
