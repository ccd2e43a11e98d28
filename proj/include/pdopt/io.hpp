#pragma once

// Project files and report emission. Numbers are written with 17 significant
// digits so every double survives a write/read cycle unchanged.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pdopt/model.hpp"
#include "pdopt/netgen.hpp"
#include "pdopt/optimize.hpp"
#include "pdopt/simulate.hpp"

namespace pdopt {

struct Project {
  DsmSet dsms;
  FeedbackDistribution dist = FeedbackDistribution::deterministic(1);
  double epsilon = 0.5;
  double cost_exponent = 1.0;
  std::optional<ProjectState> initial_state;
  std::optional<double> gamma;

  Eigen::Index tasks() const { return dsms.tasks(); }
  CostModel cost_model() const { return CostModel::inverse_power(dsms, epsilon, cost_exponent); }
  ProjectState start() const { return initial_state ? *initial_state : ProjectState::unit(tasks()); }
};

/// Parses and validates a project document. Throws MalformedFile for bad
/// JSON or shape (with the byte offset or field path) and
/// InvariantViolation for domain violations.
Project parse_project_text(const std::string& text);
Project parse_project(const std::filesystem::path& path);

/// Canonical serialization; parse_project_text(serialize_project(p)) == p.
std::string serialize_project(const Project& project);

/// "%.17g".
std::string format_number(double x);

std::string allocation_json(const DsmSet& nominal, const AllocationResult& result);
/// Tuned values psi from an allocation document written by allocation_json.
DependencyMap parse_allocation_psi(const std::filesystem::path& path);

/// k, L_1..L_m, S_1..S_m, H_1..H_m, total_unfinished.
std::string trajectory_csv(const Trajectory& traj);
/// completion_time, count. Runs that never completed are not listed.
std::string histogram_csv(const CompletionHistogram& hist);
/// task_id, team, betweenness, pagerank, hub, investment.
std::string centrality_investment_csv(const std::vector<BoundaryRow>& rows);

struct SweepPoint {
  double budget;
  AllocationResult optimized;
  AllocationResult baseline;
};
/// budget, rho_optimized, rho_baseline, cost_optimized, cost_baseline, converged.
std::string sweep_csv(const std::vector<SweepPoint>& points);
/// budget, matrix, i, j, spend (long format, optimized strategy only).
std::string sweep_spend_csv(const std::vector<SweepPoint>& points);

/// Explicit directory, else $PDOPT_OUT_DIR, else the working directory.
std::filesystem::path resolve_output_dir(const std::optional<std::string>& explicit_dir);

/// Writes `contents` to dir/name, creating dir. Refuses to replace an
/// existing file unless `overwrite`; filesystem errors propagate as is.
std::filesystem::path write_report(const std::filesystem::path& dir, const std::string& name,
                                   const std::string& contents, bool overwrite);

}  // namespace pdopt
