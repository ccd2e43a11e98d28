#pragma once

// Synthetic PD networks: random graph models, calibration of the extended
// DSM to rho(M) = 1, centrality measures and per-task investment totals.

#include <cstdint>
#include <optional>
#include <string_view>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pdopt/model.hpp"
#include "pdopt/optimize.hpp"

namespace pdopt {

enum class GraphModel { ErdosRenyi, WattsStrogatz, BarabasiAlbert };

std::string_view graph_model_name(GraphModel model);
std::optional<GraphModel> parse_graph_model(std::string_view name);  // "er", "ws", "ba"

struct GraphParams {
  double edge_probability = -1.0;  // ER; negative means 4 / (n - 1)
  int ring_degree = 4;             // WS, even
  double rewire_probability = 0.1; // WS
  int attachment = 2;              // BA
};

/// Symmetric 0/1 adjacency with zero diagonal on n nodes.
Eigen::MatrixXd generate_graph(GraphModel model, int n, const GraphParams& params, std::uint64_t seed);

/// [[Omega_L, Omega_LS], [Omega_SL, Omega_S]] on 2m tasks: local tasks are
/// indices 0..m-1, system tasks m..2m-1.
struct ExtendedDsm {
  Eigen::MatrixXd omega;

  Eigen::Index tasks() const { return omega.rows() / 2; }
  DsmSet split() const;
  static ExtendedDsm join(const DsmSet& dsms);
};

struct Calibration {
  ExtendedDsm dsm;
  double scale = 0.0;  // c in Omega = c A off the DSM diagonals
  double rho = 0.0;
};

/// Omega = c A with DSM diagonals fixed at diag_value, and c chosen by
/// bisection so that |rho(M) - 1| <= 1e-8. Throws Uncalibratable when rho
/// stays below one for every c.
Calibration calibrate_extended_dsm(const Eigen::MatrixXd& adjacency, const FeedbackDistribution& dist,
                                   double diag_value = 1.0);

/// Extended DSM at a given scale.
ExtendedDsm scaled_extended_dsm(const Eigen::MatrixXd& adjacency, double scale, double diag_value);

struct CentralityReport {
  Eigen::VectorXd betweenness;
  Eigen::VectorXd pagerank;
  Eigen::VectorXd hub;
};

/// Centralities of the directed graph with an edge j -> i whenever
/// weights(i, j) > 0, i != j (the diagonal is ignored). Betweenness uses the
/// unweighted graph; PageRank (damping 0.85) and HITS hubs use the weights.
/// Each measure is rescaled to sum to the node count (left at zero if it
/// vanishes).
CentralityReport centralities(const Eigen::MatrixXd& weights);
inline CentralityReport centralities(const ExtendedDsm& ext) { return centralities(ext.omega); }

/// Raw (unnormalized) betweenness with endpoints excluded.
Eigen::VectorXd betweenness_centrality(const Eigen::MatrixXd& weights);
/// PageRank summing to one.
Eigen::VectorXd pagerank(const Eigen::MatrixXd& weights, double damping = 0.85, double tolerance = 1e-12);
/// HITS hub scores with unit sum.
Eigen::VectorXd hub_scores(const Eigen::MatrixXd& weights, double tolerance = 1e-12);

/// Extended (row, column) task indices of a dependency.
std::pair<int, int> extended_position(const Coordinate& c, int m);

/// Total spend on dependencies touching each of the 2m tasks.
Eigen::VectorXd aggregate_investment_by_task(const AllocationResult& result, int m);

struct BoundaryRow {
  int task_id;  // 1..m within its team
  char team;    // 'L' or 'S'
  double betweenness;
  double pagerank;
  double hub;
  double investment;
};

struct BoundaryExperiment {
  Calibration calibration;
  AllocationResult allocation;
  double budget = 0.0;
  std::vector<BoundaryRow> rows;
};

struct BoundaryOptions {
  GraphParams graph;
  double epsilon = 0.5;
  double budget_fraction = 0.1;
  double cost_exponent = 1.0;
  double diag_value = 1.0;
};

/// Graph on 2m nodes, calibration, budget-constrained optimization with
/// B = budget_fraction * (sum of full-investment costs), and the joined
/// centrality/investment table.
BoundaryExperiment run_boundary_experiment(GraphModel model, int m, std::uint64_t seed,
                                           const FeedbackDistribution& dist, const BoundaryOptions& options = {});

}  // namespace pdopt
