// pdopt: feasibility, simulation and dependency-investment experiments on
// product development projects described by DSM/IDM project files.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pdopt/io.hpp"
#include "pdopt/netgen.hpp"
#include "pdopt/optimize.hpp"
#include "pdopt/simulate.hpp"
#include "pdopt/spectral.hpp"

namespace {

using namespace pdopt;

constexpr std::uint64_t kDefaultSeed = 20240601;

enum ExitCode { kOk = 0, kInfeasible = 2, kBadInput = 3, kCalibration = 4 };

struct Output {
  std::optional<std::string> dir;
  bool overwrite = false;

  void write(const std::string& name, const std::string& contents) const {
    const auto path = write_report(resolve_output_dir(dir), name, contents, overwrite);
    std::printf("wrote %s\n", path.string().c_str());
  }
};

// "2,3,6" -> {1, 2, 5}
std::set<int> parse_task_list(const std::string& text, const char* field) {
  std::set<int> tasks;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || value < 1) throw InvariantViolation(field, "expected positive integers");
    tasks.insert(value - 1);
    pos = comma + 1;
  }
  return tasks;
}

// "1-8" or "4,5,6"; values are interval lengths, kept as given.
std::set<int> parse_support(const std::string& text) {
  if (const auto dash = text.find('-'); dash != std::string::npos) {
    const int lo = std::stoi(text.substr(0, dash));
    const int hi = std::stoi(text.substr(dash + 1));
    if (lo < 1 || hi < lo) throw InvariantViolation("random_pmf", "expected a range a-b with 1 <= a <= b");
    std::set<int> support;
    for (int h = lo; h <= hi; ++h) support.insert(h);
    return support;
  }
  std::set<int> support;
  for (int t : parse_task_list(text, "random_pmf")) support.insert(t + 1);
  return support;
}

// "4:0.125,5:0.125,6:0.5"
FeedbackDistribution parse_pmf(const std::string& text) {
  std::map<int, double> pmf;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw InvariantViolation("pmf", "expected h:p pairs");
    try {
      pmf[std::stoi(item.substr(0, colon))] = std::stod(item.substr(colon + 1));
    } catch (const std::logic_error&) {
      throw InvariantViolation("pmf", "expected h:p pairs");
    }
    pos = comma + 1;
  }
  return FeedbackDistribution(std::move(pmf));
}

FeedbackDistribution case_study_pmf() {
  return FeedbackDistribution({{4, 0.125}, {5, 0.125}, {6, 0.5}, {7, 0.125}, {8, 0.125}});
}

void print_vector(const char* label, const Eigen::VectorXd& v) {
  std::printf("%s:", label);
  for (Eigen::Index i = 0; i < v.size(); ++i) std::printf(" %s", format_number(v(i)).c_str());
  std::printf("\n");
}

void print_result(const AllocationResult& r) {
  std::printf("rho_before: %s\nrho_after: %s\ntotal_cost: %s\nconverged: %s\n", format_number(r.rho_before).c_str(),
              format_number(r.rho_after).c_str(), format_number(r.total_cost).c_str(), r.converged ? "yes" : "no");
}

std::vector<BoundaryRow> task_rows(const ExtendedDsm& ext, const AllocationResult& result) {
  const int m = static_cast<int>(ext.tasks());
  const CentralityReport central = centralities(ext);
  const Eigen::VectorXd invest = aggregate_investment_by_task(result, m);
  std::vector<BoundaryRow> rows;
  for (int t = 0; t < 2 * m; ++t) {
    rows.push_back(BoundaryRow{t % m + 1, t < m ? 'L' : 'S', central.betweenness(t), central.pagerank(t),
                               central.hub(t), invest(t)});
  }
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feasibility analysis and dependency investment for product development projects"};
  app.require_subcommand(1);
  app.fallthrough();
  Output out;
  app.add_option("--out", out.dir, "Output directory (default: $PDOPT_OUT_DIR or the working directory)");
  app.add_flag("--overwrite", out.overwrite, "Replace existing report files");

  std::string project_path;
  std::uint64_t seed = kDefaultSeed;

  auto* feasibility = app.add_subcommand("feasibility", "Print rho(M), feasibility and Perron vectors");
  feasibility->add_option("project", project_path)->required();

  int runs = 1000;
  int horizon = 200;
  std::optional<double> gamma;
  std::optional<std::string> random_pmf;
  std::optional<std::string> allocation_path;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo completion times and a sample trajectory");
  simulate->add_option("project", project_path)->required();
  simulate->add_option("--runs", runs)->check(CLI::PositiveNumber);
  simulate->add_option("--horizon", horizon)->check(CLI::PositiveNumber);
  simulate->add_option("--gamma", gamma, "Completion threshold on sum L + sum S (default: project gamma)");
  simulate->add_option("--seed", seed);
  simulate->add_option("--random-pmf", random_pmf, "Draw a fresh interval pmf per run over this support, e.g. 1-8");
  simulate->add_option("--allocation", allocation_path, "Simulate the tuned project from an allocation.json");

  double budget = 0.0;
  double target = 0.0;
  auto* optimize = app.add_subcommand("optimize", "Optimal dependency investment");
  optimize->require_subcommand(1);
  optimize->fallthrough();
  auto* opt_budget = optimize->add_subcommand("budget", "Minimize rho(M) subject to a budget");
  opt_budget->add_option("project", project_path)->required();
  opt_budget->add_option("--budget", budget)->required();
  auto* opt_perf = optimize->add_subcommand("performance", "Minimize cost subject to rho(M) <= target");
  opt_perf->add_option("project", project_path)->required();
  opt_perf->add_option("--target", target)->required();

  std::string focus = "2,3,6";
  auto* baseline = app.add_subcommand("baseline", "Proportional investment around focus tasks");
  baseline->add_option("project", project_path)->required();
  baseline->add_option("--budget", budget)->required();
  baseline->add_option("--focus", focus, "One-based task list");

  double from = 0.0;
  double to = 1.5;
  int steps = 30;
  auto* sweep = app.add_subcommand("sweep-budget", "Optimized and baseline rho over a budget range");
  sweep->add_option("project", project_path)->required();
  sweep->add_option("--from", from);
  sweep->add_option("--to", to);
  sweep->add_option("--steps", steps, "Number of budget values, endpoints included")->check(CLI::Range(2, 100000));
  sweep->add_option("--focus", focus, "Baseline focus tasks, one-based");

  std::string model_name = "ba";
  int m = 10;
  BoundaryOptions boundary;
  std::optional<std::string> pmf_text;
  auto* synth = app.add_subcommand("synth", "Random-network boundary experiment");
  synth->add_option("--model", model_name)->check(CLI::IsMember({"er", "ws", "ba"}));
  synth->add_option("--m", m)->check(CLI::Range(2, 100000));
  synth->add_option("--seed", seed);
  synth->add_option("--epsilon", boundary.epsilon);
  synth->add_option("--budget-frac", boundary.budget_fraction);
  synth->add_option("--p", boundary.cost_exponent, "Cost exponent");
  synth->add_option("--diag", boundary.diag_value, "DSM diagonal completion coefficient");
  synth->add_option("--pmf", pmf_text, "Interval pmf as h:p pairs (default 4:.125,5:.125,6:.5,7:.125,8:.125)");
  synth->add_option("--edge-prob", boundary.graph.edge_probability, "ER edge probability (default 4/(n-1))");
  synth->add_option("--ring-degree", boundary.graph.ring_degree, "WS lattice degree");
  synth->add_option("--rewire", boundary.graph.rewire_probability, "WS rewiring probability");
  synth->add_option("--attach", boundary.graph.attachment, "BA edges per new node");

  auto* centrality = app.add_subcommand("centrality", "Task centralities and optimized investment per task");
  centrality->add_option("project", project_path)->required();
  centrality->add_option("--budget", budget)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*feasibility) {
      const Project project = parse_project(project_path);
      const PerronPair pair = perron_pair(GeneralizedWtmOperator(transitions(project.dsms), project.dist));
      std::printf("rho: %s\nfeasible: %s\n", format_number(pair.rho).c_str(), pair.rho < 1.0 ? "yes" : "no");
      print_vector("right_perron", pair.v);
      print_vector("left_perron", pair.u);
    } else if (*simulate) {
      const Project project = parse_project(project_path);
      const double threshold = gamma ? *gamma : project.gamma.value_or(-1.0);
      if (threshold < 0.0) throw InvariantViolation("gamma", "required via --gamma or the project file");
      DsmSet dsms = project.dsms;
      if (allocation_path) dsms = apply_allocation(project.dsms, parse_allocation_psi(*allocation_path), project.epsilon);
      const IntervalSource source =
          random_pmf ? IntervalSource(parse_support(*random_pmf)) : IntervalSource(project.dist);
      std::printf("seed: %llu\n", static_cast<unsigned long long>(seed));

      // Run 0 of the Monte Carlo study, reproduced for the trajectory file.
      const std::uint64_t run0 = derive_seed(seed, 0);
      const FeedbackDistribution dist0 = std::holds_alternative<FeedbackDistribution>(source)
                                             ? std::get<FeedbackDistribution>(source)
                                             : sample_interval_pmf(derive_seed(run0, 0), std::get<std::set<int>>(source));
      const Trajectory traj = run_trajectory(dsms, dist0, project.start(), horizon, derive_seed(run0, 1));
      const auto times = monte_carlo_completion(dsms, source, project.start(), threshold, horizon, runs, seed);
      const CompletionHistogram hist = histogram(times);
      out.write("trajectory.csv", trajectory_csv(traj));
      out.write("histogram.csv", histogram_csv(hist));
      std::printf("runs: %d\nnot_completed: %d\n", runs, hist.not_completed);
    } else if (*opt_budget || *opt_perf) {
      const Project project = parse_project(project_path);
      const CostModel costs = project.cost_model();
      const AllocationResult result = *opt_budget
                                          ? solve_budget_constrained(project.dsms, project.dist, costs, budget)
                                          : solve_performance_constrained(project.dsms, project.dist, costs, target);
      print_result(result);
      out.write("allocation.json", allocation_json(project.dsms, result));
    } else if (*baseline) {
      const Project project = parse_project(project_path);
      const AllocationResult result = baseline_allocation(project.dsms, project.dist, project.cost_model(), budget,
                                                          parse_task_list(focus, "focus"));
      print_result(result);
      out.write("baseline_allocation.json", allocation_json(project.dsms, result));
    } else if (*sweep) {
      const Project project = parse_project(project_path);
      const CostModel costs = project.cost_model();
      const std::set<int> focus_tasks = parse_task_list(focus, "focus");
      std::vector<SweepPoint> points;
      for (int k = 0; k < steps; ++k) {
        const double b = from + (to - from) * k / (steps - 1);
        points.push_back({b, solve_budget_constrained(project.dsms, project.dist, costs, b),
                          baseline_allocation(project.dsms, project.dist, costs, b, focus_tasks)});
        std::printf("budget %s: rho_optimized %s rho_baseline %s\n", format_number(b).c_str(),
                    format_number(points.back().optimized.rho_after).c_str(),
                    format_number(points.back().baseline.rho_after).c_str());
      }
      out.write("sweep.csv", sweep_csv(points));
      out.write("sweep_spend.csv", sweep_spend_csv(points));
    } else if (*synth) {
      const FeedbackDistribution dist = pmf_text ? parse_pmf(*pmf_text) : case_study_pmf();
      std::printf("seed: %llu\n", static_cast<unsigned long long>(seed));
      const BoundaryExperiment exp = run_boundary_experiment(*parse_graph_model(model_name), m, seed, dist, boundary);
      std::printf("scale: %s\nrho_calibrated: %s\nbudget: %s\n", format_number(exp.calibration.scale).c_str(),
                  format_number(exp.calibration.rho).c_str(), format_number(exp.budget).c_str());
      print_result(exp.allocation);
      out.write("centrality_investment.csv", centrality_investment_csv(exp.rows));
      out.write("synth_allocation.json", allocation_json(exp.calibration.dsm.split(), exp.allocation));
    } else if (*centrality) {
      const Project project = parse_project(project_path);
      const AllocationResult result =
          solve_budget_constrained(project.dsms, project.dist, project.cost_model(), budget);
      print_result(result);
      out.write("centrality_investment.csv", centrality_investment_csv(task_rows(ExtendedDsm::join(project.dsms), result)));
    }
  } catch (const Infeasible& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kInfeasible;
  } catch (const Uncalibratable& e) {
    std::fprintf(stderr, "calibration failed: %s\n", e.what());
    return kCalibration;
  } catch (const MalformedFile& e) {
    std::fprintf(stderr, "malformed input: %s\n", e.what());
    return kBadInput;
  } catch (const InvariantViolation& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kBadInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kOk;
}
