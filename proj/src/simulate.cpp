#include "pdopt/simulate.hpp"

#include <map>

#include <Eigen/SparseCore>

namespace pdopt {

namespace {

struct SparsePair {
  Eigen::SparseMatrix<double> a1;
  Eigen::SparseMatrix<double> a2;

  explicit SparsePair(const TransitionPair& pair)
      : a1(pair.a1.sparseView(0.0, 0.0)), a2(pair.a2.sparseView(0.0, 0.0)) {}
};

Trajectory simulate(const SparsePair& pair, const FeedbackDistribution& dist, const ProjectState& x0, int horizon,
                    CounterRng rng) {
  Trajectory traj;
  traj.states.reserve(static_cast<std::size_t>(horizon) + 1);
  traj.states.push_back(x0);
  Eigen::VectorXd x = x0.stacked();
  int next_feedback = 0;
  for (int k = 0; k < horizon; ++k) {
    if (k == next_feedback) {
      x = (pair.a1 * x).eval();
      traj.feedback_times.push_back(k);
      next_feedback += sample_interval(dist, rng);
    } else {
      x = (pair.a2 * x).eval();
    }
    traj.states.push_back(ProjectState::from_stacked(x));
  }
  return traj;
}

const FeedbackDistribution& run_distribution(const IntervalSource& source, std::uint64_t run_seed,
                                             std::optional<FeedbackDistribution>& storage) {
  if (const auto* fixed = std::get_if<FeedbackDistribution>(&source)) return *fixed;
  storage.emplace(sample_interval_pmf(derive_seed(run_seed, 0), std::get<std::set<int>>(source)));
  return *storage;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed) ^ mix64(index + 0xa54ff53a5f1d36f1ULL));
}

int sample_interval(const FeedbackDistribution& dist, CounterRng& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (const auto& [h, p] : dist.pmf()) {
    cumulative += p;
    if (u < cumulative) return h;
  }
  return dist.h_max();
}

Trajectory run_trajectory(const DsmSet& dsms, const FeedbackDistribution& dist, const ProjectState& x0, int horizon,
                          std::uint64_t seed) {
  if (horizon < 0) throw InvariantViolation("horizon", "must be >= 0");
  validate(x0, dsms.tasks());
  return simulate(SparsePair(transitions(dsms)), dist, x0, horizon, CounterRng(seed));
}

std::vector<Eigen::VectorXd> expected_epoch_states(const DsmSet& dsms, const FeedbackDistribution& dist,
                                                   const Eigen::VectorXd& z0, int num_epochs) {
  if (num_epochs < 0) throw InvariantViolation("num_epochs", "must be >= 0");
  const Eigen::MatrixXd mat = generalized_wtm(dsms, dist);
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(num_epochs) + 1);
  out.push_back(z0);
  for (int l = 0; l < num_epochs; ++l) out.push_back(mat * out.back());
  return out;
}

std::optional<int> completion_time(const Trajectory& traj, double gamma) {
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    if (traj.states[k].unfinished() <= gamma) return static_cast<int>(k);
  }
  return std::nullopt;
}

FeedbackDistribution sample_interval_pmf(std::uint64_t seed, const std::set<int>& support) {
  if (support.empty()) throw InvariantViolation("support", "must not be empty");
  CounterRng rng(seed);
  std::vector<double> draws;
  draws.reserve(support.size());
  double total = 0.0;
  for (std::size_t k = 0; k < support.size(); ++k) {
    draws.push_back(rng.exponential());
    total += draws.back();
  }
  std::map<int, double> pmf;
  std::size_t k = 0;
  double assigned = 0.0;
  for (int h : support) {
    // Last component absorbs rounding so the sum is exactly representable.
    const double p = (k + 1 == support.size()) ? std::max(0.0, 1.0 - assigned) : draws[k] / total;
    pmf[h] = p;
    assigned += p;
    ++k;
  }
  return FeedbackDistribution(std::move(pmf));
}

std::vector<std::optional<int>> monte_carlo_completion(const DsmSet& dsms, const IntervalSource& source,
                                                       const ProjectState& x0, double gamma, int horizon, int runs,
                                                       std::uint64_t seed) {
  if (runs < 1) throw InvariantViolation("runs", "must be >= 1");
  if (horizon < 0) throw InvariantViolation("horizon", "must be >= 0");
  validate(x0, dsms.tasks());
  const SparsePair pair(transitions(dsms));
  std::vector<std::optional<int>> times(static_cast<std::size_t>(runs));
  for (int r = 0; r < runs; ++r) {
    const std::uint64_t run_seed = derive_seed(seed, static_cast<std::uint64_t>(r));
    std::optional<FeedbackDistribution> storage;
    const FeedbackDistribution& dist = run_distribution(source, run_seed, storage);
    const Trajectory traj = simulate(pair, dist, x0, horizon, CounterRng(derive_seed(run_seed, 1)));
    times[static_cast<std::size_t>(r)] = completion_time(traj, gamma);
  }
  return times;
}

std::vector<double> mean_unfinished(const DsmSet& dsms, const IntervalSource& source, const ProjectState& x0,
                                    int horizon, int runs, std::uint64_t seed) {
  if (runs < 1) throw InvariantViolation("runs", "must be >= 1");
  validate(x0, dsms.tasks());
  const SparsePair pair(transitions(dsms));
  std::vector<double> mean(static_cast<std::size_t>(horizon) + 1, 0.0);
  for (int r = 0; r < runs; ++r) {
    const std::uint64_t run_seed = derive_seed(seed, static_cast<std::uint64_t>(r));
    std::optional<FeedbackDistribution> storage;
    const FeedbackDistribution& dist = run_distribution(source, run_seed, storage);
    const Trajectory traj = simulate(pair, dist, x0, horizon, CounterRng(derive_seed(run_seed, 1)));
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += traj.states[k].unfinished();
  }
  for (double& v : mean) v /= runs;
  return mean;
}

CompletionHistogram histogram(const std::vector<std::optional<int>>& times) {
  std::map<int, int> counts;
  CompletionHistogram out;
  for (const auto& t : times) {
    if (t) {
      ++counts[*t];
    } else {
      ++out.not_completed;
    }
  }
  out.counts.assign(counts.begin(), counts.end());
  return out;
}

}  // namespace pdopt
