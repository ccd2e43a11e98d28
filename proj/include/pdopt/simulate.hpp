#pragma once

// Stochastic simulation of the switched work dynamics and the expected
// epoch recursion z(l+1) = M z(l).

#include <cstdint>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "pdopt/model.hpp"
#include "pdopt/rng.hpp"

namespace pdopt {

struct Trajectory {
  std::vector<ProjectState> states;  // states[k] = x(k), k = 0..horizon
  std::vector<int> feedback_times;   // steps k < horizon at which A1 applied

  int horizon() const { return static_cast<int>(states.size()) - 1; }
};

/// Seed of child stream `index` of `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

int sample_interval(const FeedbackDistribution& dist, CounterRng& rng);

/// Feedback at k = 0 and then after i.i.d. intervals drawn from `dist`.
Trajectory run_trajectory(const DsmSet& dsms, const FeedbackDistribution& dist, const ProjectState& x0, int horizon,
                          std::uint64_t seed);

/// z(l) = M^l z0 for l = 0..num_epochs.
std::vector<Eigen::VectorXd> expected_epoch_states(const DsmSet& dsms, const FeedbackDistribution& dist,
                                                   const Eigen::VectorXd& z0, int num_epochs);

/// First k with sum L(k) + sum S(k) <= gamma; nullopt if it never happens
/// within the horizon.
std::optional<int> completion_time(const Trajectory& traj, double gamma);

/// Uniform draw from the probability simplex over `support`.
FeedbackDistribution sample_interval_pmf(std::uint64_t seed, const std::set<int>& support);

/// Either a fixed interval distribution, or a support from which each run
/// draws its own distribution with sample_interval_pmf.
using IntervalSource = std::variant<FeedbackDistribution, std::set<int>>;

/// Completion times of `runs` independent trajectories. Entry r depends only
/// on (seed, r).
std::vector<std::optional<int>> monte_carlo_completion(const DsmSet& dsms, const IntervalSource& source,
                                                       const ProjectState& x0, double gamma, int horizon, int runs,
                                                       std::uint64_t seed);

/// Mean of sum L + sum S over `runs` trajectories, per step k = 0..horizon.
std::vector<double> mean_unfinished(const DsmSet& dsms, const IntervalSource& source, const ProjectState& x0,
                                    int horizon, int runs, std::uint64_t seed);

struct CompletionHistogram {
  std::vector<std::pair<int, int>> counts;  // (completion time, count), ascending
  int not_completed = 0;
};

CompletionHistogram histogram(const std::vector<std::optional<int>>& times);

}  // namespace pdopt
