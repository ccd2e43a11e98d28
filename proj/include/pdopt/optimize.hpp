#pragma once

// Dependency investment: posynomial cost model, the baseline proportional
// strategy and the two convex programs in Xi = log Psi.

#include <map>
#include <optional>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "pdopt/model.hpp"

namespace pdopt {

/// coef * x^exponent, with the coefficient kept as a logarithm so large cost
/// exponents neither overflow nor underflow.
struct Monomial {
  double log_coef;
  double exponent;
};
using Posynomial = std::vector<Monomial>;

double evaluate(const Posynomial& f, double x);

/// Per-dependency costs f(Psi) = f+(Psi) - f+(Omega) over the tunable
/// coordinates of a nominal project.
class CostModel {
 public:
  /// f(Psi) = c (Psi^-p - Omega^-p) with c = Omega^(p+1) / (epsilon^-p - 1),
  /// so f(Omega) = 0 and f(epsilon Omega) = Omega.
  static CostModel inverse_power(const DsmSet& nominal, double epsilon, double p);

  /// Arbitrary posynomial f+ per coordinate. Every tunable coordinate of
  /// `nominal` needs an entry.
  static CostModel posynomial(const DsmSet& nominal, double epsilon, std::map<Coordinate, Posynomial> positive_parts);

  double epsilon() const { return epsilon_; }
  /// Cost exponent p for the inverse-power family.
  std::optional<double> exponent() const { return exponent_; }
  const std::vector<Coordinate>& coordinates() const { return coords_; }

  double omega(const Coordinate& c) const { return entry(c).omega; }
  double lower(const Coordinate& c) const { return epsilon_ * entry(c).omega; }
  /// Coefficient c of the inverse-power family.
  double coefficient(const Coordinate& c) const;
  const Posynomial& positive_part(const Coordinate& c) const { return entry(c).f_plus; }

  /// f(psi); throws InvariantViolation outside [epsilon Omega, Omega].
  double cost_of(const Coordinate& c, double psi) const;
  /// Cost of driving the dependency to epsilon Omega.
  double full_investment(const Coordinate& c) const;
  /// Psi whose cost equals `spend` (0 <= spend <= full_investment).
  double invert(const Coordinate& c, double spend) const;

  /// C- = sum of f+(Omega).
  double constant_part() const { return constant_part_; }

 private:
  struct Entry {
    double omega;
    Posynomial f_plus;
    double f_plus_at_omega;
  };
  const Entry& entry(const Coordinate& c) const;

  double epsilon_ = 0.5;
  std::optional<double> exponent_;
  std::vector<Coordinate> coords_;
  std::map<Coordinate, Entry> entries_;
  double constant_part_ = 0.0;
};

struct CostSplit {
  double total = 0.0;     // C
  double positive = 0.0;  // C+
  double negative = 0.0;  // C-, constant
};

/// Costs over all tunable coordinates; coordinates absent from psi are at
/// their nominal value.
CostSplit total_cost(const CostModel& model, const DependencyMap& psi);

struct AllocationResult {
  DependencyMap psi;
  DependencyMap spend;
  double total_cost = 0.0;
  double rho_before = 0.0;
  double rho_after = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Gradient evaluations that fell back to finite differences.
  int finite_difference_gradients = 0;
};

struct SolverOptions {
  double mu_initial = 1.0;
  double mu_final = 1e-8;
  double mu_divisor = 10.0;
  double armijo = 1e-4;
  double shrink = 0.5;
  double objective_tolerance = 1e-13;
  int max_inner_iterations = 2000;
  int memory = 10;
};

/// Minimize log rho(M) subject to the box and C <= budget.
AllocationResult solve_budget_constrained(const DsmSet& nominal, const FeedbackDistribution& dist,
                                          const CostModel& model, double budget, const SolverOptions& options = {});

/// Minimize C subject to the box and rho(M) <= target. Throws Infeasible when
/// rho at full investment exceeds the target.
AllocationResult solve_performance_constrained(const DsmSet& nominal, const FeedbackDistribution& dist,
                                               const CostModel& model, double target,
                                               const SolverOptions& options = {});

/// Coordinates the baseline strategy may invest in: L entries in a focus row
/// or column, LS entries in a focus column, SL entries in a focus row.
/// Tasks are zero-based.
std::vector<Coordinate> baseline_eligible(const CostModel& model, const std::set<int>& focus_tasks);

/// Budget split proportionally to nominal strength over the eligible set,
/// capped at each coordinate's full-investment cost.
AllocationResult baseline_allocation(const DsmSet& nominal, const FeedbackDistribution& dist, const CostModel& model,
                                     double budget, const std::set<int>& focus_tasks);

/// rho(M) at Psi = psi.
double feasibility_index(const DsmSet& nominal, const FeedbackDistribution& dist, const DependencyMap& psi = {});

}  // namespace pdopt
