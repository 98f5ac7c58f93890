#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "fairbnp/bench/bench.hpp"

namespace fs = std::filesystem;
using namespace fairbnp;

namespace {

struct Flags {
  std::string problem = "cvrp";
  std::vector<std::string> formulations{"customer"};
  std::vector<std::string> branchings{"range"};
  std::optional<double> alpha;
  bool exact_tail = false;
  int budget_pct = 110;
  double theta = 0.01;
  double time_limit = 3600.0;
  unsigned long long seed = 0;
  std::vector<std::string> instances;
  std::string out = "results";
};

void add_common(CLI::App* app, Flags& f, bool lists) {
  app->add_option("--problem", f.problem, "cvrp or gap")->check(CLI::IsMember({"cvrp", "gap"}));
  if (lists) {
    app->add_option("--formulation", f.formulations, "vehicle, customer or order (comma separated)")->delimiter(',');
    app->add_option("--branching", f.branchings, "classical, range or order (comma separated)")->delimiter(',');
  } else {
    app->add_option("--formulation", f.formulations.front(), "vehicle, customer or order");
    app->add_option("--branching", f.branchings.front(), "classical, range or order");
  }
  app->add_option("--alpha", f.alpha, "range cutoff relaxation (default 0.025 for cvrp, 0 for gap)");
  app->add_flag("--exact-tail", f.exact_tail, "branch with alpha = 0 once no relaxed violation is left");
  app->add_option("--budget-pct", f.budget_pct, "route budget in percent of the efficient cost");
  app->add_option("--theta", f.theta, "allowed relative profit loss");
  app->add_option("--time-limit", f.time_limit, "seconds per solve");
  app->add_option("--seed", f.seed, "random seed");
  app->add_option("--instance", f.instances, "instance files or directories")->required();
  app->add_option("--out", f.out, "output directory");
}

std::vector<std::string> expand(const std::vector<std::string>& paths) {
  std::vector<std::string> files;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<std::string> in_dir;
      for (const auto& e : fs::directory_iterator(p))
        if (e.is_regular_file()) in_dir.push_back(e.path().string());
      std::sort(in_dir.begin(), in_dir.end());
      files.insert(files.end(), in_dir.begin(), in_dir.end());
    } else if (fs::exists(p)) {
      files.push_back(p);
    } else {
      throw ConfigError("no such instance: " + p);
    }
  }
  if (files.empty()) throw ConfigError("no instances given");
  return files;
}

std::vector<bench::RunConfig> configs(const Flags& f) {
  std::vector<bench::RunConfig> out;
  bench::Problem problem = bench::parse_problem(f.problem);
  for (const auto& file : expand(f.instances))
    for (const auto& form : f.formulations)
      for (const auto& br : f.branchings) {
        bench::RunConfig c;
        c.problem = problem;
        c.formulation = cvrp::parse_formulation(form);
        c.branching = parse_branching(br);
        c.alpha = f.alpha.value_or(problem == bench::Problem::kCvrp ? 0.025 : 0.0);
        c.exact_tail = f.exact_tail;
        c.budget_pct = f.budget_pct;
        c.theta = f.theta;
        c.time_limit = f.time_limit;
        c.seed = f.seed;
        c.instance = file;
        c.out = f.out;
        bench::validate(c);
        out.push_back(c);
      }
  return out;
}

int run_and_report(const Flags& f) {
  auto rows = bench::run_matrix(configs(f), f.out);
  std::cout << bench::summary_header() << '\n';
  for (const auto& r : rows) std::cout << bench::format_row(r) << '\n';
  return 0;
}

int derive(const std::string& base_path, const std::vector<int>& sizes, int count, const Flags& f, bool baseline) {
  auto base = cvrp::read_tsplib_file(base_path);
  auto insts = bench::derive_subinstances(base, sizes, count, f.seed);
  fs::create_directories(f.out);
  for (auto& inst : insts) {
    if (baseline) {
      auto rep = cvrp::efficient_solution(inst, f.time_limit);
      if (rep.status == SolveStatus::kOptimal && rep.incumbent) {
        inst.efficient_cost = std::llround(*rep.incumbent);
        inst.budget = cvrp::budget_from_percent(inst.efficient_cost, f.budget_pct);
      } else {
        std::cerr << inst.name << ": cost-efficient baseline did not finish\n";
      }
    }
    std::ofstream out(fs::path(f.out) / (inst.name + ".vrp"));
    cvrp::write_tsplib(out, inst);
    std::cout << (fs::path(f.out) / (inst.name + ".vrp")).string() << '\n';
  }
  return 0;
}

int tsp_report(const Flags& f, bool with_tsp_run) {
  std::vector<bench::TspRow> rows;
  bench::RunConfig c;
  c.problem = bench::Problem::kCvrp;
  c.alpha = f.alpha.value_or(0.025);
  c.budget_pct = f.budget_pct;
  c.time_limit = f.time_limit;
  c.seed = f.seed;
  bench::validate(c);
  for (const auto& file : expand(f.instances)) {
    try {
      rows.push_back(bench::tsp_report(c, cvrp::read_tsplib_file(file), with_tsp_run));
    } catch (const InconsistencyError&) {
      throw;
    } catch (const std::exception& e) {
      std::cerr << file << ": " << e.what() << '\n';
    }
  }
  fs::create_directories(f.out);
  std::ofstream out(fs::path(f.out) / "tsp_report.csv");
  bench::write_tsp_report(out, rows);
  bench::write_tsp_report(std::cout, rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fairness-oriented branch and price"};
  app.require_subcommand(1);

  Flags run_flags, matrix_flags, derive_flags, tsp_flags;
  auto* run = app.add_subcommand("run", "solve one instance");
  add_common(run, run_flags, false);
  auto* matrix = app.add_subcommand("matrix", "solve every instance under every formulation and branching pair");
  add_common(matrix, matrix_flags, true);

  auto* der = app.add_subcommand("derive", "sample sub-instances from a base CVRP file");
  std::vector<int> sizes{15, 20, 25};
  int count = 20;
  bool no_baseline = false;
  der->add_option("--instance", derive_flags.instances, "base instance file")->required()->expected(1);
  der->add_option("--sizes", sizes, "customer counts")->delimiter(',');
  der->add_option("--count", count, "instances per size")->check(CLI::PositiveNumber);
  der->add_option("--seed", derive_flags.seed, "random seed");
  der->add_option("--budget-pct", derive_flags.budget_pct, "route budget in percent of the efficient cost");
  der->add_option("--time-limit", derive_flags.time_limit, "seconds for each cost-efficient baseline");
  der->add_flag("--no-baseline", no_baseline, "skip the cost-efficient baseline");
  der->add_option("--out", derive_flags.out, "output directory");

  auto* tsp = app.add_subcommand("tsp-report", "convert general routes to shortest tours and compare bounds");
  bool no_tsp_run = false;
  tsp->add_option("--instance", tsp_flags.instances, "instance files or directories")->required();
  tsp->add_option("--alpha", tsp_flags.alpha, "range cutoff relaxation");
  tsp->add_option("--budget-pct", tsp_flags.budget_pct, "route budget in percent of the efficient cost");
  tsp->add_option("--time-limit", tsp_flags.time_limit, "seconds per solve");
  tsp->add_option("--seed", tsp_flags.seed, "random seed");
  tsp->add_option("--out", tsp_flags.out, "output directory");
  tsp->add_flag("--no-tsp-run", no_tsp_run, "skip the run that prices only shortest orders");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return run_and_report(run_flags);
    if (*matrix) return run_and_report(matrix_flags);
    if (*der) return derive(derive_flags.instances.front(), sizes, count, derive_flags, !no_baseline);
    if (*tsp) return tsp_report(tsp_flags, !no_tsp_run);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const SizeCapError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
