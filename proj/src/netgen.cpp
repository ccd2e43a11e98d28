#include <algorithm>
#include <cmath>
#include <set>

#include "pdopt/netgen.hpp"
#include "pdopt/rng.hpp"
#include "pdopt/spectral.hpp"

namespace pdopt {

std::string_view graph_model_name(GraphModel model) {
  switch (model) {
    case GraphModel::ErdosRenyi: return "er";
    case GraphModel::WattsStrogatz: return "ws";
    case GraphModel::BarabasiAlbert: return "ba";
  }
  return "?";
}

std::optional<GraphModel> parse_graph_model(std::string_view name) {
  if (name == "er") return GraphModel::ErdosRenyi;
  if (name == "ws") return GraphModel::WattsStrogatz;
  if (name == "ba") return GraphModel::BarabasiAlbert;
  return std::nullopt;
}

namespace {

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvariantViolation(name, "must lie in [0, 1]");
}

Eigen::MatrixXd erdos_renyi(int n, double p, CounterRng& rng) {
  check_probability(p, "edge_probability");
  Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.uniform() < p) adj(i, j) = adj(j, i) = 1.0;
    }
  }
  return adj;
}

Eigen::MatrixXd watts_strogatz(int n, int k, double beta, CounterRng& rng) {
  if (k < 2 || k % 2 != 0) throw InvariantViolation("ring_degree", "must be even and >= 2");
  if (k >= n) throw InvariantViolation("ring_degree", "must be smaller than the node count");
  check_probability(beta, "rewire_probability");
  Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(n, n);
  for (int u = 0; u < n; ++u) {
    for (int j = 1; j <= k / 2; ++j) {
      const int v = (u + j) % n;
      adj(u, v) = adj(v, u) = 1.0;
    }
  }
  // Rewire each lattice edge (u, u + j) with probability beta, avoiding
  // self-loops and duplicate edges.
  for (int j = 1; j <= k / 2; ++j) {
    for (int u = 0; u < n; ++u) {
      if (rng.uniform() >= beta) continue;
      const int v = (u + j) % n;
      if (adj(u, v) == 0.0) continue;
      if (adj.row(u).sum() >= n - 1) continue;
      int w = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      while (w == u || adj(u, w) != 0.0) w = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      adj(u, v) = adj(v, u) = 0.0;
      adj(u, w) = adj(w, u) = 1.0;
    }
  }
  return adj;
}

Eigen::MatrixXd barabasi_albert(int n, int attach, CounterRng& rng) {
  if (attach < 1 || attach >= n) throw InvariantViolation("attachment", "must lie in [1, n)");
  Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(n, n);
  // Every node appears once per incident edge end.
  std::vector<int> ends;
  for (int i = 0; i <= attach; ++i) {
    for (int j = i + 1; j <= attach; ++j) {
      adj(i, j) = adj(j, i) = 1.0;
      ends.push_back(i);
      ends.push_back(j);
    }
  }
  for (int t = attach + 1; t < n; ++t) {
    std::set<int> targets;
    while (static_cast<int>(targets.size()) < attach) {
      targets.insert(ends[rng.below(ends.size())]);
    }
    for (int v : targets) {
      adj(t, v) = adj(v, t) = 1.0;
      ends.push_back(t);
      ends.push_back(v);
    }
  }
  return adj;
}

double rho_at(const Eigen::MatrixXd& adjacency, double scale, double diag_value, const FeedbackDistribution& dist) {
  const DsmSet dsms = scaled_extended_dsm(adjacency, scale, diag_value).split();
  return spectral_radius(GeneralizedWtmOperator(dsms, dist));
}

}  // namespace

Eigen::MatrixXd generate_graph(GraphModel model, int n, const GraphParams& params, std::uint64_t seed) {
  if (n < 2) throw InvariantViolation("n", "must be >= 2");
  CounterRng rng(seed);
  switch (model) {
    case GraphModel::ErdosRenyi: {
      const double p = params.edge_probability < 0.0 ? std::min(1.0, 4.0 / (n - 1)) : params.edge_probability;
      return erdos_renyi(n, p, rng);
    }
    case GraphModel::WattsStrogatz:
      return watts_strogatz(n, params.ring_degree, params.rewire_probability, rng);
    case GraphModel::BarabasiAlbert:
      return barabasi_albert(n, params.attachment, rng);
  }
  return {};
}

DsmSet ExtendedDsm::split() const {
  const Eigen::Index m = tasks();
  DsmSet dsms;
  dsms.omega_l = omega.topLeftCorner(m, m);
  dsms.omega_ls = omega.topRightCorner(m, m);
  dsms.omega_sl = omega.bottomLeftCorner(m, m);
  dsms.omega_s = omega.bottomRightCorner(m, m);
  return dsms;
}

ExtendedDsm ExtendedDsm::join(const DsmSet& dsms) {
  const Eigen::Index m = dsms.tasks();
  ExtendedDsm ext{Eigen::MatrixXd(2 * m, 2 * m)};
  ext.omega << dsms.omega_l, dsms.omega_ls, dsms.omega_sl, dsms.omega_s;
  return ext;
}

ExtendedDsm scaled_extended_dsm(const Eigen::MatrixXd& adjacency, double scale, double diag_value) {
  if (adjacency.rows() != adjacency.cols() || adjacency.rows() % 2 != 0) {
    throw InvariantViolation("adjacency", "must be square with an even number of nodes");
  }
  ExtendedDsm ext{scale * adjacency};
  ext.omega.diagonal().setConstant(diag_value);
  return ext;
}

Calibration calibrate_extended_dsm(const Eigen::MatrixXd& adjacency, const FeedbackDistribution& dist,
                                   double diag_value) {
  if (!(diag_value > 0.0 && diag_value <= 1.0)) throw InvariantViolation("diag_value", "must lie in (0, 1]");
  constexpr double kTolerance = 1e-8;
  double lo = 1e-8;
  double rho_lo = rho_at(adjacency, lo, diag_value, dist);
  if (rho_lo > 1.0 + kTolerance) throw Uncalibratable("rho exceeds one at the smallest scale");
  double hi = 1.0;
  double rho_hi = rho_at(adjacency, hi, diag_value, dist);
  for (int doubling = 0; rho_hi <= 1.0; ++doubling) {
    if (doubling >= 80) throw Uncalibratable("rho stays below one for every scale");
    lo = hi;
    rho_lo = rho_hi;
    hi *= 2.0;
    rho_hi = rho_at(adjacency, hi, diag_value, dist);
  }
  double mid = hi;
  double rho_mid = rho_hi;
  for (int it = 0; it < 300; ++it) {
    mid = 0.5 * (lo + hi);
    rho_mid = rho_at(adjacency, mid, diag_value, dist);
    if (std::abs(rho_mid - 1.0) <= kTolerance) break;
    if (rho_mid < 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (std::abs(rho_mid - 1.0) > kTolerance) throw Uncalibratable("bisection did not reach rho = 1");
  return {scaled_extended_dsm(adjacency, mid, diag_value), mid, rho_mid};
}

std::pair<int, int> extended_position(const Coordinate& c, int m) {
  switch (c.block) {
    case Block::L: return {c.i, c.j};
    case Block::LS: return {c.i, m + c.j};
    case Block::SL: return {m + c.i, c.j};
    case Block::S: return {m + c.i, m + c.j};
  }
  return {c.i, c.j};
}

Eigen::VectorXd aggregate_investment_by_task(const AllocationResult& result, int m) {
  Eigen::VectorXd totals = Eigen::VectorXd::Zero(2 * m);
  for (const auto& [c, spend] : result.spend) {
    const auto [row, col] = extended_position(c, m);
    totals(row) += spend;
    if (col != row) totals(col) += spend;
  }
  return totals;
}

BoundaryExperiment run_boundary_experiment(GraphModel model, int m, std::uint64_t seed,
                                           const FeedbackDistribution& dist, const BoundaryOptions& options) {
  if (m < 2) throw InvariantViolation("m", "must be >= 2");
  if (!(options.budget_fraction >= 0.0)) throw InvariantViolation("budget_fraction", "must be >= 0");
  BoundaryExperiment out;
  const Eigen::MatrixXd adjacency = generate_graph(model, 2 * m, options.graph, seed);
  out.calibration = calibrate_extended_dsm(adjacency, dist, options.diag_value);
  const DsmSet dsms = out.calibration.dsm.split();
  const CostModel costs = CostModel::inverse_power(dsms, options.epsilon, options.cost_exponent);
  double full = 0.0;
  for (const Coordinate& c : costs.coordinates()) full += costs.full_investment(c);
  out.budget = options.budget_fraction * full;
  out.allocation = solve_budget_constrained(dsms, dist, costs, out.budget);

  const CentralityReport central = centralities(out.calibration.dsm);
  const Eigen::VectorXd invest = aggregate_investment_by_task(out.allocation, m);
  for (int t = 0; t < 2 * m; ++t) {
    out.rows.push_back(BoundaryRow{t % m + 1, t < m ? 'L' : 'S', central.betweenness(t), central.pagerank(t),
                                   central.hub(t), invest(t)});
  }
  return out;
}

}  // namespace pdopt
