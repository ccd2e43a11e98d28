#include <cmath>
#include <queue>
#include <vector>

#include "pdopt/netgen.hpp"

namespace pdopt {

namespace {

// Off-diagonal weights only: the DSM diagonal holds completion coefficients,
// not dependencies.
Eigen::MatrixXd without_loops(const Eigen::MatrixXd& weights) {
  if (weights.rows() != weights.cols()) throw InvariantViolation("weights", "must be square");
  Eigen::MatrixXd w = weights;
  w.diagonal().setZero();
  return w;
}

Eigen::VectorXd rescale_to_count(const Eigen::VectorXd& x) {
  const double sum = x.sum();
  if (sum == 0.0) return Eigen::VectorXd::Zero(x.size());
  return x * (static_cast<double>(x.size()) / sum);
}

}  // namespace

Eigen::VectorXd betweenness_centrality(const Eigen::MatrixXd& weights) {
  const Eigen::MatrixXd w = without_loops(weights);
  const int n = static_cast<int>(w.rows());
  // out[j] lists i with an edge j -> i.
  std::vector<std::vector<int>> out(n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (w(i, j) > 0.0) out[j].push_back(i);
    }
  }

  Eigen::VectorXd cb = Eigen::VectorXd::Zero(n);
  std::vector<double> sigma(n), delta(n);
  std::vector<int> dist(n);
  std::vector<std::vector<int>> preds(n);
  std::vector<int> order;
  order.reserve(n);
  for (int s = 0; s < n; ++s) {
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(dist.begin(), dist.end(), -1);
    for (auto& p : preds) p.clear();
    order.clear();

    sigma[s] = 1.0;
    dist[s] = 0;
    std::queue<int> queue;
    queue.push(s);
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop();
      order.push_back(v);
      for (int x : out[v]) {
        if (dist[x] < 0) {
          dist[x] = dist[v] + 1;
          queue.push(x);
        }
        if (dist[x] == dist[v] + 1) {
          sigma[x] += sigma[v];
          preds[x].push_back(v);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const int x = *it;
      for (int v : preds[x]) delta[v] += sigma[v] / sigma[x] * (1.0 + delta[x]);
      if (x != s) cb(x) += delta[x];
    }
  }
  return cb;
}

Eigen::VectorXd pagerank(const Eigen::MatrixXd& weights, double damping, double tolerance) {
  const Eigen::MatrixXd w = without_loops(weights);
  const Eigen::Index n = w.rows();
  if (n == 0) return {};
  // Column j of w holds the out-edges of j.
  const Eigen::RowVectorXd outflow = w.colwise().sum();
  Eigen::MatrixXd transition = w;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (outflow(j) > 0.0) transition.col(j) /= outflow(j);
  }
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  for (int it = 0; it < 100000; ++it) {
    double dangling = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (outflow(j) <= 0.0) dangling += x(j);
    }
    Eigen::VectorXd next = damping * (transition * x);
    next.array() += (damping * dangling + (1.0 - damping)) / static_cast<double>(n);
    const double change = (next - x).lpNorm<1>();
    x = next;
    if (change < tolerance) break;
  }
  return x / x.sum();
}

Eigen::VectorXd hub_scores(const Eigen::MatrixXd& weights, double tolerance) {
  const Eigen::MatrixXd w = without_loops(weights);
  const Eigen::Index n = w.rows();
  if (n == 0) return {};
  // Edge j -> i has weight w(i, j): authorities a = w h, hubs h = w' a.
  Eigen::VectorXd h = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  for (int it = 0; it < 100000; ++it) {
    const Eigen::VectorXd a = w * h;
    Eigen::VectorXd next = w.transpose() * a;
    const double sum = next.sum();
    if (sum <= 0.0) return Eigen::VectorXd::Zero(n);
    next /= sum;
    const double change = (next - h).lpNorm<1>();
    h = next;
    if (change < tolerance) break;
  }
  return h;
}

CentralityReport centralities(const Eigen::MatrixXd& weights) {
  return {rescale_to_count(betweenness_centrality(weights)), rescale_to_count(pagerank(weights)),
          rescale_to_count(hub_scores(weights))};
}

}  // namespace pdopt
