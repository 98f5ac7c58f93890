#pragma once

// Experiment harness: run configurations, instance derivation, CSV output.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fairbnp/bnp/engine.hpp"
#include "fairbnp/colgen/colgen.hpp"
#include "fairbnp/cvrp/instance.hpp"
#include "fairbnp/cvrp/plugin.hpp"
#include "fairbnp/cvrp/tsp.hpp"
#include "fairbnp/gap/instance.hpp"
#include "fairbnp/gap/plugin.hpp"
#include "fairbnp/objective/order_weights.hpp"

namespace fairbnp::bench {

enum class Problem { kCvrp, kGap };

inline Problem parse_problem(const std::string& s) {
  if (s == "cvrp") return Problem::kCvrp;
  if (s == "gap") return Problem::kGap;
  throw ConfigError("unknown problem '" + s + "'");
}

inline const char* to_string(Problem p) { return p == Problem::kCvrp ? "cvrp" : "gap"; }

struct RunConfig {
  Problem problem = Problem::kCvrp;
  cvrp::Formulation formulation = cvrp::Formulation::kCustomer;
  BranchingScheme branching = BranchingScheme::kRange;
  double alpha = 0.0;
  bool exact_tail = false;  // switch to alpha = 0 once no relaxed violation is left
  int budget_pct = 110;
  double theta = 0.01;
  double time_limit = 3600.0;
  unsigned long long seed = 0;
  std::string instance;
  std::string out = "results";
};

inline void validate(const RunConfig& c) {
  if (c.alpha < 0.0 || c.alpha >= 1.0) throw ConfigError("alpha must lie in [0, 1)");
  if (c.time_limit <= 0.0) throw ConfigError("time limit must be positive");
  const bool order_form = c.formulation == cvrp::Formulation::kOrder;
  if (c.branching == BranchingScheme::kOrder && !order_form)
    throw ConfigError("order branching requires the order formulation");
  if (order_form && c.branching == BranchingScheme::kRange)
    throw ConfigError("the order formulation branches with order or classical rules");
  if (c.formulation == cvrp::Formulation::kCost) throw ConfigError("the cost formulation is only used for baselines");
  if (c.problem == Problem::kCvrp && c.budget_pct < 100) throw ConfigError("budget percentage below 100");
  if (c.problem == Problem::kGap) {
    if (c.theta < 0.0 || c.theta >= 1.0) throw ConfigError("theta must lie in [0, 1)");
    if (order_form) throw ConfigError("the assignment problem has no order formulation");
  }
}

struct SummaryRow {
  std::string instance;
  std::string size;  // |C| or n x m
  std::string formulation;
  std::string branching;
  std::string status;
  bool solved = false;
  double time = 0.0;
  double gap = 100.0;
  long nodes = 0;
  std::optional<double> lower_bound;
  std::optional<double> upper_bound;
  std::optional<double> delta;
  std::string error;
};

inline const char* summary_header() {
  return "instance,size,formulation,branching,status,solved,time_s,gap_pct,nodes,lower_bound,upper_bound,delta_pct,error";
}

namespace detail {

inline std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

inline std::string opt(const std::optional<double>& v, int digits) { return v ? fixed(*v, digits) : ""; }

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace detail

inline std::string format_row(const SummaryRow& r) {
  using detail::fixed;
  using detail::opt;
  std::ostringstream os;
  os << detail::csv_field(r.instance) << ',' << r.size << ',' << r.formulation << ',' << r.branching << ',' << r.status
     << ',' << (r.solved ? 1 : 0) << ',' << fixed(r.time, 3) << ',' << fixed(r.gap, 2) << ',' << r.nodes << ','
     << opt(r.lower_bound, 4) << ',' << opt(r.upper_bound, 4) << ',' << opt(r.delta, 1) << ','
     << detail::csv_field(r.error);
  return os.str();
}

inline void write_summary(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << summary_header() << '\n';
  for (const auto& r : rows) out << format_row(r) << '\n';
}

inline const char* trajectory_header() { return "time_s,lb,ub"; }

/// Bound trajectory as CSV; an open upper bound is left empty.
inline void write_trajectory(std::ostream& out, const std::vector<TrajectoryPoint>& t) {
  for (std::size_t i = 1; i < t.size(); ++i)
    if (t[i].lb < t[i - 1].lb - 1e-9 || t[i].ub > t[i - 1].ub + 1e-9 || t[i].time < t[i - 1].time)
      throw InconsistencyError("bound trajectory is not monotone");
  out << trajectory_header() << '\n';
  for (const auto& p : t)
    out << detail::fixed(p.time, 3) << ',' << detail::fixed(p.lb, 4) << ','
        << (std::isfinite(p.ub) ? detail::fixed(p.ub, 4) : std::string()) << '\n';
}

/// Percentage by which the fair solution improves on the efficient one.
inline std::optional<double> delta_percent(double efficient, double best) {
  if (efficient <= 0.0) return std::nullopt;
  return 100.0 * (efficient - best) / efficient;
}

inline void write_cvrp_solution(std::ostream& out, const cvrp::CvrpInstance& inst, const std::vector<cvrp::Route>& routes) {
  long long total = 0;
  for (std::size_t k = 0; k < routes.size(); ++k) {
    out << "Route #" << k + 1 << ":";
    for (std::size_t i = 1; i + 1 < routes[k].size(); ++i) out << ' ' << routes[k][i];
    long long d = cvrp::route_distance(inst, routes[k]);
    out << " | distance " << d << '\n';
    total += cvrp::route_cost(inst, routes[k]);
  }
  out << "Cost " << total << '\n';
}

/// Objective value of a finished solution under the run's objective.
inline double objective_of(std::vector<double> payoffs, const std::optional<OrderWeights>& w) {
  if (payoffs.empty()) return 0.0;
  if (w) return evaluate(*w, payoffs);
  auto [lo, hi] = std::minmax_element(payoffs.begin(), payoffs.end());
  return *hi - *lo;
}

struct RunResult {
  SummaryRow row;
  SolveReport report;
  std::optional<cvrp::CvrpInstance> cvrp;
  std::vector<cvrp::Route> routes;
};

inline EngineConfig engine_config(const RunConfig& c) {
  EngineConfig cfg;
  cfg.chain = make_chain(c.branching, c.alpha, c.exact_tail);
  cfg.time_limit = c.time_limit;
  cfg.colgen.threads = pricing_threads_from_env();
  cfg.colgen.max_columns = c.problem == Problem::kGap ? 1 : 20;
  return cfg;
}

namespace detail {

inline void fill_row(SummaryRow& row, const SolveReport& rep) {
  row.status = to_string(rep.status);
  row.solved = rep.status == SolveStatus::kOptimal || rep.status == SolveStatus::kInfeasible;
  row.time = rep.wall_time;
  row.gap = rep.status == SolveStatus::kInfeasible ? 0.0 : rep.gap_pct;
  row.nodes = rep.nodes;
  row.lower_bound = rep.lower_bound;
  row.upper_bound = rep.incumbent;
}

inline std::string stem(const std::string& path) { return std::filesystem::path(path).stem().string(); }

}  // namespace detail

/// Budget baseline plus the fair run on one CVRP instance. A known
/// efficient cost stands in when the baseline run does not finish.
inline RunResult run_cvrp(const RunConfig& c, cvrp::CvrpInstance inst) {
  RunResult res;
  res.row.instance = inst.name;
  res.row.size = std::to_string(inst.num_customers());
  res.row.formulation = cvrp::to_string(c.formulation);
  res.row.branching = to_string(c.branching);
  if (inst.vehicles <= 0) throw ConfigError("instance does not state a vehicle count");
  auto base = cvrp::efficient_solution(inst, c.time_limit);
  const bool base_done = base.status == SolveStatus::kOptimal && base.incumbent;
  if (base_done) {
    inst.efficient_cost = std::llround(*base.incumbent);
  } else if (inst.efficient_cost <= 0) {
    throw ConfigError("cost-efficient baseline did not finish for " + inst.name);
  }
  inst.budget = cvrp::budget_from_percent(inst.efficient_cost, c.budget_pct);

  cvrp::CvrpOptions opt;
  opt.formulation = c.formulation;
  std::optional<OrderWeights> weights;
  if (c.formulation == cvrp::Formulation::kOrder) {
    weights = gini_weights(inst.vehicles);
    opt.weights = *weights;
  }
  cvrp::CvrpPlugin plugin(inst, opt);
  res.report = solve(plugin, engine_config(c));
  detail::fill_row(res.row, res.report);
  std::vector<double> eff;
  for (const auto& col : base.incumbent_columns) eff.push_back(col.payoff);
  if (res.report.incumbent && base_done) res.row.delta = delta_percent(objective_of(eff, weights), *res.report.incumbent);
  res.routes = cvrp::routes_of(res.report.incumbent_columns);
  res.cvrp = std::move(inst);
  return res;
}

inline std::vector<double> agent_loads(const gap::GapInstance& g, const std::vector<Column>& cols) {
  std::vector<double> load(g.agents, 0.0);
  for (const auto& c : cols) load[c.subproblem] += c.payoff;
  return load;
}

/// Profit-maximizing baseline plus the fair run on one assignment instance.
inline RunResult run_gap(const RunConfig& c, gap::GapInstance g) {
  RunResult res;
  res.row.instance = g.name;
  res.row.size = std::to_string(g.agents) + "x" + std::to_string(g.jobs);
  res.row.formulation = "assignment";
  res.row.branching = to_string(c.branching);
  gap::GapPlugin best(g, gap::GapMode::kMaxProfit);
  EngineConfig bcfg = engine_config(c);
  bcfg.chain = make_chain(BranchingScheme::kClassical);
  auto base = solve(best, bcfg);
  if (base.status == SolveStatus::kInfeasible) throw ConfigError("no complete assignment exists for " + g.name);
  if (base.status != SolveStatus::kOptimal || !base.incumbent)
    throw ConfigError("profit-maximizing baseline did not finish for " + g.name);
  g.profit_floor = gap::profit_floor(std::llround(-*base.incumbent), c.theta);
  gap::GapPlugin plugin(g);
  res.report = solve(plugin, engine_config(c));
  detail::fill_row(res.row, res.report);
  if (res.report.incumbent)
    res.row.delta = delta_percent(objective_of(agent_loads(g, base.incumbent_columns), std::nullopt), *res.report.incumbent);
  return res;
}

inline RunResult run_one(const RunConfig& c) {
  validate(c);
  if (c.problem == Problem::kCvrp) return run_cvrp(c, cvrp::read_tsplib_file(c.instance));
  return run_gap(c, gap::read_gap_file(c.instance));
}

/// Runs every configuration; failures become rows with an error message.
/// Trajectories and solutions go to `out` when it is non-empty.
inline std::vector<SummaryRow> run_matrix(const std::vector<RunConfig>& configs, const std::string& out = "") {
  namespace fs = std::filesystem;
  std::vector<SummaryRow> rows;
  if (!out.empty()) {
    fs::create_directories(fs::path(out) / "trajectories");
    fs::create_directories(fs::path(out) / "solutions");
  }
  for (const auto& c : configs) {
    SummaryRow failed;
    failed.instance = detail::stem(c.instance);
    failed.formulation = c.problem == Problem::kGap ? "assignment" : cvrp::to_string(c.formulation);
    failed.branching = to_string(c.branching);
    try {
      auto r = run_one(c);
      if (!out.empty()) {
        std::string tag = r.row.instance + "_" + r.row.formulation + "_" + r.row.branching;
        std::ofstream t(fs::path(out) / "trajectories" / (tag + ".csv"));
        write_trajectory(t, r.report.trajectory);
        if (r.cvrp && !r.routes.empty()) {
          std::ofstream s(fs::path(out) / "solutions" / (tag + ".sol"));
          write_cvrp_solution(s, *r.cvrp, r.routes);
        }
      }
      rows.push_back(std::move(r.row));
    } catch (const std::exception& e) {
      failed.status = "Error";
      failed.error = e.what();
      rows.push_back(std::move(failed));
    }
  }
  if (!out.empty()) {
    std::ofstream s(fs::path(out) / "summary.csv");
    write_summary(s, rows);
  }
  return rows;
}

/// Sub-instances built from seeded samples of |C| + 1 base customers; the
/// first sampled location becomes the depot. K = 5 and Q is the minimal
/// capacity that needs every vehicle.
inline std::vector<cvrp::CvrpInstance> derive_subinstances(const cvrp::CvrpInstance& base, const std::vector<int>& sizes,
                                                           int count, unsigned long long seed, int vehicles = 5) {
  std::vector<cvrp::CvrpInstance> out;
  const int pool = base.num_customers();
  for (int size : sizes) {
    if (size + 1 > pool)
      throw ConfigError("size " + std::to_string(size) + " needs " + std::to_string(size + 1) + " base customers, " +
                        base.name + " has " + std::to_string(pool));
    if (size < vehicles) throw ConfigError("size below the vehicle count");
    for (int idx = 0; idx < count; ++idx) {
      std::seed_seq ss{seed, static_cast<unsigned long long>(size), static_cast<unsigned long long>(idx)};
      std::mt19937_64 rng(ss);
      std::vector<int> ids(pool);
      std::iota(ids.begin(), ids.end(), 1);
      std::shuffle(ids.begin(), ids.end(), rng);
      ids.resize(size + 1);
      std::vector<cvrp::Point> coords;
      std::vector<int> demand;
      for (int i = 0; i <= size; ++i) {
        coords.push_back(base.coords[ids[i]]);
        if (i > 0) demand.push_back(base.demand[ids[i]]);
      }
      std::ostringstream name;
      name << base.name << "-n" << size << "-" << std::setw(2) << std::setfill('0') << idx + 1;
      out.push_back(cvrp::make_instance(std::move(coords), std::move(demand), vehicles, 0, name.str()));
    }
  }
  return out;
}

struct TspRow {
  std::string instance;
  int budget_pct = 0;
  bool tsp_optimal = false;
  long long range_general = 0;  // best general-route range
  long long range_converted = 0;
  double delta_r = 0.0;
  double lb_general = 0.0;
  std::optional<double> lb_tsp;
  std::optional<double> ub_tsp;
  std::optional<double> delta_lb;
  std::optional<double> delta_ub;
  double gap = 100.0;
};

inline const char* tsp_header() {
  return "instance,budget_pct,tsp_optimal,range_general,range_converted,delta_r_pct,lb_general,lb_tsp,ub_tsp,"
         "delta_lb_pct,delta_ub_pct,gap_pct";
}

inline void write_tsp_report(std::ostream& out, const std::vector<TspRow>& rows) {
  using detail::fixed;
  using detail::opt;
  out << tsp_header() << '\n';
  for (const auto& r : rows)
    out << detail::csv_field(r.instance) << ',' << r.budget_pct << ',' << (r.tsp_optimal ? 1 : 0) << ','
        << r.range_general << ',' << r.range_converted << ',' << fixed(r.delta_r, 2) << ',' << fixed(r.lb_general, 4)
        << ',' << opt(r.lb_tsp, 4) << ',' << opt(r.ub_tsp, 4) << ',' << opt(r.delta_lb, 2) << ','
        << opt(r.delta_ub, 2) << ',' << fixed(r.gap, 2) << '\n';
}

/// Converts a finished general-route run to shortest tours and compares
/// the bounds, optionally against a run that prices only shortest orders.
inline TspRow tsp_row(const cvrp::CvrpInstance& inst, int budget_pct, const SolveReport& general,
                      const std::optional<SolveReport>& tsp_run = std::nullopt) {
  if (!general.incumbent) throw ConfigError("general-route run has no solution for " + inst.name);
  TspRow row;
  row.instance = inst.name;
  row.budget_pct = budget_pct;
  auto pp = cvrp::tsp_postprocess(inst, cvrp::routes_of(general.incumbent_columns));
  row.range_general = pp.range_before;
  row.range_converted = pp.range_after;
  row.delta_r = pp.delta_r;
  row.lb_general = general.lower_bound;
  double best_lb = general.lower_bound;
  if (tsp_run) {
    row.lb_tsp = tsp_run->lower_bound;
    row.ub_tsp = tsp_run->incumbent;
    best_lb = std::max(best_lb, tsp_run->lower_bound);
    if (*row.lb_tsp > 0.0) row.delta_lb = 100.0 * (general.lower_bound - *row.lb_tsp) / *row.lb_tsp;
    if (row.ub_tsp && *row.ub_tsp > 0.0)
      row.delta_ub = 100.0 * (*row.ub_tsp - static_cast<double>(pp.range_after)) / *row.ub_tsp;
  }
  if (static_cast<double>(pp.range_after) < best_lb - 1e-6)
    throw InconsistencyError("converted solution lies below the lower bound for " + inst.name);
  row.tsp_optimal = static_cast<double>(pp.range_after) <= best_lb + 1e-6;
  row.gap = gap_percent(best_lb, static_cast<double>(pp.range_after));
  return row;
}

/// General routes (last-customer formulation, range branching) and, when
/// asked, the run restricted to shortest orders (vehicle formulation).
inline TspRow tsp_report(const RunConfig& c, cvrp::CvrpInstance inst, bool with_tsp_run) {
  RunConfig g = c;
  g.formulation = cvrp::Formulation::kCustomer;
  g.branching = BranchingScheme::kRange;
  validate(g);
  auto general = run_cvrp(g, inst);
  std::optional<SolveReport> tsp_run;
  if (with_tsp_run) {
    cvrp::CvrpOptions opt;
    opt.formulation = cvrp::Formulation::kVehicle;
    opt.tsp_optimal = true;
    cvrp::CvrpPlugin plugin(*general.cvrp, opt);
    tsp_run = solve(plugin, engine_config(g));
  }
  return tsp_row(*general.cvrp, c.budget_pct, general.report, tsp_run);
}

}  // namespace fairbnp::bench
