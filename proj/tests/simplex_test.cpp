#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <vector>

#include "fairbnp/lp/simplex.hpp"
#include "fairbnp/select/selection.hpp"

using namespace fairbnp;
using namespace fairbnp::lp;

namespace {

// Optimum over all basic solutions: every choice of n tight constraints
// among rows and box bounds.
struct VertexOracle {
  bool feasible = false;
  double objective = 0.0;
};

bool solve_dense(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& x) {
  const int n = static_cast<int>(b.size());
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (std::abs(a[piv][c]) < 1e-10) return false;
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      double f = a[r][c] / a[c][c];
      for (int k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  x.assign(n, 0.0);
  for (int i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return true;
}

VertexOracle enumerate_vertices(const LpModel& m) {
  const int n = m.num_cols();
  const int rows = m.num_rows();
  std::vector<std::vector<double>> dense(rows, std::vector<double>(n, 0.0));
  for (int j = 0; j < n; ++j)
    for (auto [r, v] : m.col(j).coefs) dense[r][j] += v;
  // constraint c < rows: row c tight; else bound (c - rows) / 2 at lo or hi
  const int total = rows + 2 * n;
  VertexOracle best;
  std::vector<int> pick(n);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
      std::vector<double> b(n);
      for (int k = 0; k < n; ++k) {
        int c = pick[k];
        if (c < rows) {
          a[k] = dense[c];
          b[k] = m.row(c).rhs;
        } else {
          int j = (c - rows) / 2;
          a[k][j] = 1.0;
          b[k] = (c - rows) % 2 == 0 ? m.col(j).lo : m.col(j).hi;
        }
      }
      std::vector<double> x;
      if (!solve_dense(a, b, x)) return;
      for (int j = 0; j < n; ++j)
        if (x[j] < m.col(j).lo - 1e-7 || x[j] > m.col(j).hi + 1e-7) return;
      for (int i = 0; i < rows; ++i) {
        double act = 0.0;
        for (int j = 0; j < n; ++j) act += dense[i][j] * x[j];
        double rhs = m.row(i).rhs;
        auto s = m.row(i).sense;
        if (s == RowSense::kLessEqual && act > rhs + 1e-7) return;
        if (s == RowSense::kGreaterEqual && act < rhs - 1e-7) return;
        if (s == RowSense::kEqual && std::abs(act - rhs) > 1e-7) return;
      }
      double obj = 0.0;
      for (int j = 0; j < n; ++j) obj += m.col(j).cost * x[j];
      if (!best.feasible || obj < best.objective) best = {true, obj};
      return;
    }
    for (int c = start; c < total; ++c) {
      pick[depth] = c;
      rec(c + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

LpModel random_lp(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> ncols(1, 6), nrows(1, 4), coef(-4, 4), bound(-3, 3), sense(0, 2);
  LpModel m;
  int rows = nrows(rng);
  for (int i = 0; i < rows; ++i) m.add_row({static_cast<RowSense>(sense(rng)), static_cast<double>(coef(rng)), ""});
  int cols = ncols(rng);
  for (int j = 0; j < cols; ++j) {
    int a = bound(rng), b = bound(rng);
    ColSpec c{static_cast<double>(coef(rng)), static_cast<double>(std::min(a, b)), static_cast<double>(std::max(a, b)), {}, ""};
    for (int i = 0; i < rows; ++i) {
      int v = coef(rng);
      if (v != 0) c.coefs.emplace_back(i, v);
    }
    m.add_column(std::move(c));
  }
  return m;
}

void expect_certified(const LpModel& m, const LpSolution& s) {
  ASSERT_EQ(s.status, LpStatus::kOptimal);
  for (int j = 0; j < m.num_cols(); ++j) {
    EXPECT_GE(s.primal[j], m.col(j).lo - 1e-7);
    EXPECT_LE(s.primal[j], m.col(j).hi + 1e-7);
  }
  for (int i = 0; i < m.num_rows(); ++i) {
    double act = s.row_activity[i];
    double rhs = m.row(i).rhs;
    switch (m.row(i).sense) {
      case RowSense::kLessEqual: EXPECT_LE(act, rhs + 1e-7); break;
      case RowSense::kGreaterEqual: EXPECT_GE(act, rhs - 1e-7); break;
      case RowSense::kEqual: EXPECT_NEAR(act, rhs, 1e-7); break;
    }
  }
  EXPECT_NEAR(dual_objective(m, s), s.objective, 1e-7 * (1.0 + std::abs(s.objective)));
}

}  // namespace

TEST(Simplex, TwoVariableBoxWithSharedRow) {
  LpModel m;
  int r = m.add_row({RowSense::kLessEqual, 1.0, "r"});
  m.add_column({-1.0, 0.0, 1.0, {{r, 1.0}}, "x1"});
  m.add_column({-1.0, 0.0, 1.0, {{r, 1.0}}, "x2"});
  auto s = solve(m);
  // box vertices give -2 (infeasible), -1, -1, 0; the row binds at -1
  auto oracle = enumerate_vertices(m);
  ASSERT_TRUE(oracle.feasible);
  EXPECT_NEAR(s.objective, oracle.objective, 1e-9);
  EXPECT_NEAR(s.objective, -1.0, 1e-9);
  EXPECT_NEAR(s.duals[r], -1.0, 1e-9);
  expect_certified(m, s);
}

TEST(Simplex, BoundContradictionIsInfeasible) {
  LpModel m;
  int r = m.add_row({RowSense::kEqual, 2.0, "r"});
  m.add_column({0.0, 0.0, 1.0, {{r, 1.0}}, "x"});
  EXPECT_EQ(solve(m).status, LpStatus::kInfeasible);
}

TEST(Simplex, Example1Relaxation) {
  SelectionPlugin plugin(example1_instance());
  auto master = selection_master(plugin);
  auto s = solve(master.model());
  ASSERT_EQ(s.status, LpStatus::kOptimal);
  EXPECT_NEAR(s.objective, 0.0, 1e-6);
  expect_certified(master.model(), s);

  // the point (1/2, 1, 1/2, 2, 2) satisfies every row
  const auto& m = master.model();
  std::vector<double> x(m.num_cols(), 0.0);
  x[master.eta_col()] = 2.0;
  x[master.gamma_col()] = 2.0;
  const double vals[3] = {0.5, 1.0, 0.5};
  for (int i = 0; i < 3; ++i) x[master.lp_id(plugin.columns()[i].id)] = vals[i];
  for (int i = 0; i < m.num_rows(); ++i) {
    double act = 0.0;
    for (int j = 0; j < m.num_cols(); ++j)
      for (auto [r, v] : m.col(j).coefs)
        if (r == i) act += v * x[j];
    if (m.row(i).sense == RowSense::kLessEqual) {
      EXPECT_LE(act, m.row(i).rhs + 1e-9);
    }
    if (m.row(i).sense == RowSense::kGreaterEqual) {
      EXPECT_GE(act, m.row(i).rhs - 1e-9);
    }
    if (m.row(i).sense == RowSense::kEqual) {
      EXPECT_NEAR(act, m.row(i).rhs, 1e-9);
    }
  }
}

TEST(Simplex, Example1FixingThirdColumn) {
  SelectionPlugin plugin(example1_instance());
  auto master = selection_master(plugin);
  auto& m = master.model();
  int x3 = master.lp_id(plugin.columns()[2].id);
  m.set_variable_bounds(x3, 0.0, 0.0);
  auto s = solve(m);
  auto oracle = enumerate_vertices(m);
  ASSERT_TRUE(oracle.feasible);
  EXPECT_NEAR(s.objective, oracle.objective, 1e-9);
  EXPECT_NEAR(s.objective, 1.0, 1e-6);
}

TEST(Simplex, AddColumnIds) {
  LpModel m;
  EXPECT_EQ(m.add_column({1.0, 0.0, 1.0, {}, "x"}), 0);
  EXPECT_EQ(m.num_cols(), 1);
}

TEST(Simplex, DuplicateColumnKeepsValue) {
  LpModel m;
  int r = m.add_row({RowSense::kGreaterEqual, 1.0, "r"});
  m.add_column({2.0, 0.0, 1.0, {{r, 1.0}}, "x"});
  double before = solve(m).objective;
  int id = m.add_column({2.0, 0.0, 1.0, {{r, 1.0}}, "x'"});
  EXPECT_EQ(id, 1);
  EXPECT_NEAR(solve(m).objective, before, 1e-9);
}

TEST(Simplex, ImprovingColumnLowersObjectiveAndFixingRestores) {
  LpModel m;
  int r0 = m.add_row({RowSense::kGreaterEqual, 1.0, "a"});
  int r1 = m.add_row({RowSense::kGreaterEqual, 1.0, "b"});
  m.add_column({3.0, 0.0, 1.0, {{r0, 1.0}}, "x"});
  m.add_column({3.0, 0.0, 1.0, {{r1, 1.0}}, "y"});
  auto s0 = solve(m);
  EXPECT_NEAR(s0.objective, 6.0, 1e-9);
  // covers both rows at cost 5: reduced cost 5 - (3 + 3) = -1
  ColSpec w{5.0, 0.0, 1.0, {{r0, 1.0}, {r1, 1.0}}, "w"};
  double rc = w.cost - s0.duals[r0] - s0.duals[r1];
  EXPECT_NEAR(rc, -1.0, 1e-9);
  int j = m.add_column(w);
  auto s1 = solve(m, &s0.basis);
  EXPECT_LT(s1.objective, s0.objective - 1e-9);
  EXPECT_NEAR(s1.objective, 5.0, 1e-9);
  m.set_variable_bounds(j, 0.0, 0.0);
  EXPECT_NEAR(solve(m).objective, 6.0, 1e-9);
  m.set_variable_bounds(j, 0.0, 1.0);
  EXPECT_NEAR(solve(m).objective, 5.0, 1e-9);
}

TEST(Simplex, RejectsInvalidInput) {
  LpModel m;
  int r = m.add_row({RowSense::kLessEqual, 1.0, "r"});
  EXPECT_THROW(m.add_column({std::nan(""), 0.0, 1.0, {}, "x"}), ConfigError);
  EXPECT_THROW(m.add_column({1.0, 0.0, 1.0, {{r, kInf}}, "x"}), ConfigError);
  EXPECT_THROW(m.add_column({1.0, 0.0, 1.0, {{r + 1, 1.0}}, "x"}), ConfigError);
  EXPECT_THROW(m.add_column({1.0, 2.0, 1.0, {}, "x"}), ConfigError);
  int j = m.add_column({1.0, 0.0, 1.0, {{r, 1.0}}, "x"});
  EXPECT_THROW(m.set_variable_bounds(j, 1.0, 0.0), ConfigError);
}

TEST(Simplex, UnboundedDetected) {
  LpModel m;
  m.add_column({-1.0, 0.0, kInf, {}, "x"});
  EXPECT_EQ(solve(m).status, LpStatus::kUnbounded);
}

TEST(Simplex, IterationCapReported) {
  std::mt19937_64 rng(3);
  LpModel m = random_lp(rng);
  while (solve(m).iterations < 2) m = random_lp(rng);
  SimplexOptions opt;
  opt.max_iterations = 1;
  EXPECT_EQ(solve(m, nullptr, opt).status, LpStatus::kIterationLimit);
}

TEST(Simplex, WriteLpListsEveryRow) {
  LpModel m;
  int r = m.add_row({RowSense::kLessEqual, 4.0, "cap"});
  m.add_column({1.0, 0.0, 2.0, {{r, 3.0}}, "x"});
  std::ostringstream os;
  write_lp(os, m);
  EXPECT_NE(os.str().find("cap"), std::string::npos);
  EXPECT_NE(os.str().find("<="), std::string::npos);
}

TEST(SimplexProperty, MatchesVertexEnumeration) {
  std::mt19937_64 rng(20240611);
  int feasible = 0;
  for (int trial = 0; trial < 400; ++trial) {
    LpModel m = random_lp(rng);
    auto oracle = enumerate_vertices(m);
    auto s = solve(m);
    if (!oracle.feasible) {
      EXPECT_EQ(s.status, LpStatus::kInfeasible) << "trial " << trial;
      continue;
    }
    ++feasible;
    ASSERT_EQ(s.status, LpStatus::kOptimal) << "trial " << trial;
    EXPECT_NEAR(s.objective, oracle.objective, 1e-6) << "trial " << trial;
    expect_certified(m, s);
  }
  EXPECT_GT(feasible, 50);
}

TEST(SimplexProperty, WarmStartMatchesColdStart) {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> bound(-3, 3);
  for (int trial = 0; trial < 200; ++trial) {
    LpModel m = random_lp(rng);
    auto s0 = solve(m);
    if (s0.status != LpStatus::kOptimal) continue;
    int j = static_cast<int>(rng() % m.num_cols());
    int a = bound(rng), b = bound(rng);
    m.set_variable_bounds(j, std::min(a, b), std::max(a, b));
    auto cold = solve(m);
    auto warm = solve(m, &s0.basis);
    ASSERT_EQ(cold.status, warm.status) << "trial " << trial;
    if (cold.status == LpStatus::kOptimal) {
      EXPECT_NEAR(cold.objective, warm.objective, 1e-7);
    }
  }
}

TEST(SimplexProperty, MonotoneUnderColumnsAndBounds) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    LpModel m = random_lp(rng);
    auto s0 = solve(m);
    if (s0.status != LpStatus::kOptimal) continue;
    LpModel more = m;
    ColSpec extra{static_cast<double>(static_cast<int>(rng() % 9) - 4), 0.0, 1.0, {}, "e"};
    for (int i = 0; i < m.num_rows(); ++i) extra.coefs.emplace_back(i, static_cast<double>(static_cast<int>(rng() % 5) - 2));
    more.add_column(extra);
    auto s1 = solve(more);
    ASSERT_EQ(s1.status, LpStatus::kOptimal);
    EXPECT_LE(s1.objective, s0.objective + 1e-7);

    LpModel tight = m;
    int j = static_cast<int>(rng() % m.num_cols());
    double lo = m.col(j).lo, hi = m.col(j).hi;
    tight.set_variable_bounds(j, lo, lo + 0.5 * (hi - lo));
    auto s2 = solve(tight);
    if (s2.status == LpStatus::kOptimal) {
      EXPECT_GE(s2.objective, s0.objective - 1e-7);
    }
  }
}
