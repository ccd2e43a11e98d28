#include "pdopt/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>

#include "pdopt/spectral.hpp"

namespace pdopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFiniteDifferenceStep = 1e-6;

/// log rho(M) as a function of Xi over a fixed coordinate list, with warm
/// starts carried between calls.
class LogRhoEvaluator {
 public:
  LogRhoEvaluator(const DsmSet& nominal, const FeedbackDistribution& dist, std::vector<Coordinate> coords)
      : nominal_(nominal), dist_(dist), coords_(std::move(coords)) {}

  DsmSet tuned(const Eigen::VectorXd& xi) const {
    DsmSet out = nominal_;
    for (std::size_t k = 0; k < coords_.size(); ++k) {
      const Coordinate& c = coords_[k];
      out.block(c.block)(c.i, c.j) = std::exp(xi(static_cast<Eigen::Index>(k)));
    }
    return out;
  }

  double value(const Eigen::VectorXd& xi) {
    const GeneralizedWtmOperator op(tuned(xi), dist_);
    const double rho = spectral_radius(op, &warm_right_);
    return std::log(std::max(rho, kRhoFloor));
  }

  double value_and_gradient(const Eigen::VectorXd& xi, Eigen::VectorXd& grad) {
    const DsmSet t = tuned(xi);
    const GeneralizedWtmOperator op(t, dist_);
    try {
      const PerronPair pair = perron_pair(op, warm_ ? &*warm_ : nullptr);
      warm_ = pair;
      warm_right_ = pair.v;
      grad = grad_log_rho(op, pair, t, coords_);
      return std::log(std::max(pair.rho, kRhoFloor));
    } catch (const DegenerateSpectrum&) {
      ++finite_difference_count;
      grad.resize(xi.size());
      Eigen::VectorXd probe = xi;
      for (Eigen::Index k = 0; k < xi.size(); ++k) {
        probe(k) = xi(k) + kFiniteDifferenceStep;
        const double up = value(probe);
        probe(k) = xi(k) - kFiniteDifferenceStep;
        const double down = value(probe);
        probe(k) = xi(k);
        grad(k) = (up - down) / (2.0 * kFiniteDifferenceStep);
      }
      return value(xi);
    }
  }

  int finite_difference_count = 0;

 private:
  const DsmSet& nominal_;
  const FeedbackDistribution& dist_;
  std::vector<Coordinate> coords_;
  std::optional<PerronPair> warm_;
  Eigen::VectorXd warm_right_;
};

/// log C+ = log sum over coordinates and monomials of coef * Psi^a, by
/// log-sum-exp in Xi.
class LogCostEvaluator {
 public:
  explicit LogCostEvaluator(const CostModel& model) : model_(model) {}

  double value_and_gradient(const Eigen::VectorXd& xi, Eigen::VectorXd* grad) const {
    const auto& coords = model_.coordinates();
    double peak = -kInf;
    for (std::size_t k = 0; k < coords.size(); ++k) {
      for (const Monomial& t : model_.positive_part(coords[k])) {
        peak = std::max(peak, t.log_coef + t.exponent * xi(static_cast<Eigen::Index>(k)));
      }
    }
    double sum = 0.0;
    if (grad != nullptr) grad->setZero(xi.size());
    for (std::size_t k = 0; k < coords.size(); ++k) {
      for (const Monomial& t : model_.positive_part(coords[k])) {
        const double w = std::exp(t.log_coef + t.exponent * xi(static_cast<Eigen::Index>(k)) - peak);
        sum += w;
        if (grad != nullptr) (*grad)(static_cast<Eigen::Index>(k)) += t.exponent * w;
      }
    }
    if (grad != nullptr) *grad /= sum;
    return peak + std::log(sum);
  }

 private:
  const CostModel& model_;
};

using Smooth = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>;

/// minimize f(x) subject to lo < x < hi and g(x) < 0.
struct BarrierProblem {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  Smooth objective;
  Smooth constraint;
  /// The coupling constraint counts as active once -g <= active_tolerance.
  double active_tolerance = 1e-8;
};

struct BarrierOutcome {
  Eigen::VectorXd x;
  int iterations = 0;
  double stationarity = kInf;  // projected Lagrangian gradient norm
  double slack = kInf;         // -g
  bool multiplier_nonnegative = false;

  /// First-order optimality: a small projected gradient, or an active
  /// constraint whose multiplier has the right sign.
  bool converged(double active_tolerance) const {
    return stationarity <= 1e-6 || (slack <= active_tolerance && multiplier_nonnegative);
  }
};

/// Barrier function F = f - mu (sum log(x - lo) + sum log(hi - x) + log(-g)).
/// When `grad` is given, `curvature` receives the Gauss-Newton part of the
/// constraint barrier Hessian, mu / g^2 * grad g grad g', as (mu / g^2, grad g).
struct RankOne {
  double scale = 0.0;
  Eigen::VectorXd w;
};

double barrier_value(const BarrierProblem& prob, double mu, const Eigen::VectorXd& x, Eigen::VectorXd* grad,
                     RankOne* curvature = nullptr) {
  const Eigen::ArrayXd below = (x - prob.lo).array();
  const Eigen::ArrayXd above = (prob.hi - x).array();
  if ((below <= 0.0).any() || (above <= 0.0).any()) return kInf;
  Eigen::VectorXd gg;
  const double g = prob.constraint(x, grad != nullptr ? &gg : nullptr);
  if (!(g < 0.0)) return kInf;
  Eigen::VectorXd gf;
  const double f = prob.objective(x, grad != nullptr ? &gf : nullptr);
  if (!std::isfinite(f)) return kInf;
  const double value = f - mu * (below.log().sum() + above.log().sum() + std::log(-g));
  if (grad != nullptr) {
    *grad = gf + mu * ((1.0 / above) - (1.0 / below)).matrix() + (mu / -g) * gg;
    if (curvature != nullptr) *curvature = {mu / (g * g), gg};
  }
  return value;
}

/// Optimality measures at x for barrier parameter mu: the projected-gradient
/// norm of the Lagrangian f + lambda g over the box with lambda = mu / -g,
/// the slack -g, and the sign of the least-squares multiplier over the
/// coordinates away from their bounds.
void assess(const BarrierProblem& prob, double mu, const Eigen::VectorXd& x, BarrierOutcome& out) {
  Eigen::VectorXd gf, gg;
  const double g = prob.constraint(x, &gg);
  prob.objective(x, &gf);
  const Eigen::VectorXd lagrangian = gf + (mu / -g) * gg;
  const Eigen::VectorXd projected = (x - lagrangian).cwiseMax(prob.lo).cwiseMin(prob.hi);
  out.stationarity = (projected - x).lpNorm<Eigen::Infinity>();
  out.slack = -g;
  double fg = 0.0, gg2 = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (x(k) - prob.lo(k) > 1e-6 && prob.hi(k) - x(k) > 1e-6) {
      fg += gf(k) * gg(k);
      gg2 += gg(k) * gg(k);
    }
  }
  out.multiplier_nonnegative = gg2 > 0.0 ? -fg / gg2 >= 0.0 : true;
}

/// Solves (diag(D) + a w w') z = r by Sherman-Morrison, where D is the box
/// barrier Hessian plus one.
Eigen::VectorXd precondition(const BarrierProblem& prob, double mu, const Eigen::VectorXd& x, const RankOne& c,
                             const Eigen::VectorXd& r) {
  const Eigen::ArrayXd below = (x - prob.lo).array();
  const Eigen::ArrayXd above = (prob.hi - x).array();
  const Eigen::ArrayXd diag = mu * (below.square().inverse() + above.square().inverse()) + 1.0;
  const Eigen::VectorXd dr = (r.array() / diag).matrix();
  if (c.scale <= 0.0 || c.w.size() != r.size()) return dr;
  const Eigen::VectorXd dw = (c.w.array() / diag).matrix();
  return dr - (c.scale * c.w.dot(dr) / (1.0 + c.scale * c.w.dot(dw))) * dw;
}

/// L-BFGS on the barrier function for a decreasing sequence of mu, with
/// backtracking Armijo line searches.
BarrierOutcome minimize_with_barrier(const BarrierProblem& prob, Eigen::VectorXd x, const SolverOptions& opt) {
  BarrierOutcome out;
  Eigen::VectorXd grad;
  // The schedule runs down to mu_final and then continues, while the
  // constraint is still slack and the point not yet stationary, to at most
  // kMuFloor.
  constexpr double kMuFloor = 1e-16;
  for (double mu = opt.mu_initial;; mu /= opt.mu_divisor) {
    RankOne curvature;
    double value = barrier_value(prob, mu, x, &grad, &curvature);
    std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> history;
    for (int it = 0; it < opt.max_inner_iterations; ++it) {
      ++out.iterations;
      if (grad.lpNorm<Eigen::Infinity>() <= 1e-12) break;
      // Two-loop recursion.
      Eigen::VectorXd d = -grad;
      std::vector<double> alpha(history.size());
      for (std::size_t k = history.size(); k-- > 0;) {
        const auto& [s, y] = history[k];
        alpha[k] = s.dot(d) / y.dot(s);
        d -= alpha[k] * y;
      }
      // The barrier terms' Hessian (diagonal for the box, rank one for the
      // constraint) seeds the quasi-Newton approximation.
      d = precondition(prob, mu, x, curvature, d);
      for (std::size_t k = 0; k < history.size(); ++k) {
        const auto& [s, y] = history[k];
        const double beta = y.dot(d) / y.dot(s);
        d += (alpha[k] - beta) * s;
      }
      double slope = grad.dot(d);
      if (!(slope < 0.0)) {
        history.clear();
        d = precondition(prob, mu, x, curvature, -grad);
        slope = grad.dot(d);
      }
      // Largest step keeping the box strictly feasible.
      double step = 1.0;
      for (Eigen::Index k = 0; k < x.size(); ++k) {
        if (d(k) < 0.0) step = std::min(step, 0.99 * (x(k) - prob.lo(k)) / -d(k));
        if (d(k) > 0.0) step = std::min(step, 0.99 * (prob.hi(k) - x(k)) / d(k));
      }
      Eigen::VectorXd trial;
      double trial_value = kInf;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        trial = x + step * d;
        trial_value = barrier_value(prob, mu, trial, nullptr);
        if (trial_value <= value + opt.armijo * step * slope) {
          accepted = true;
          break;
        }
        step *= opt.shrink;
      }
      if (!accepted) break;
      Eigen::VectorXd trial_grad;
      RankOne trial_curvature;
      trial_value = barrier_value(prob, mu, trial, &trial_grad, &trial_curvature);
      const Eigen::VectorXd s = trial - x;
      const Eigen::VectorXd y = trial_grad - grad;
      if (s.dot(y) > 1e-16 * s.norm() * y.norm()) {
        history.emplace_back(s, y);
        if (static_cast<int>(history.size()) > opt.memory) history.pop_front();
      }
      const double change = value - trial_value;
      x = std::move(trial);
      grad = std::move(trial_grad);
      curvature = std::move(trial_curvature);
      value = trial_value;
      if (change < opt.objective_tolerance) break;
    }
    if (mu <= opt.mu_final * (1.0 + 1e-9)) {
      assess(prob, mu, x, out);
      // A nearly tight constraint is driven all the way to active; a clearly
      // slack one only needs a stationary point.
      const bool active = out.slack <= prob.active_tolerance && out.multiplier_nonnegative;
      const bool interior = out.stationarity <= 1e-6 && out.slack > 1e-4;
      if (active || interior || mu / opt.mu_divisor < kMuFloor) break;
    }
  }
  out.x = std::move(x);
  return out;
}

struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

Box log_box(const CostModel& model) {
  const auto& coords = model.coordinates();
  const auto n = static_cast<Eigen::Index>(coords.size());
  Box box{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const Coordinate& c = coords[static_cast<std::size_t>(k)];
    box.hi(k) = std::log(model.omega(c));
    box.lo(k) = std::log(model.epsilon()) + box.hi(k);
  }
  return box;
}

DependencyMap to_psi(const CostModel& model, const Eigen::VectorXd& xi) {
  DependencyMap psi;
  const auto& coords = model.coordinates();
  for (std::size_t k = 0; k < coords.size(); ++k) {
    const Coordinate& c = coords[k];
    psi[c] = std::clamp(std::exp(xi(static_cast<Eigen::Index>(k))), model.lower(c), model.omega(c));
  }
  return psi;
}

double cost_at(const CostModel& model, const Eigen::VectorXd& xi) { return total_cost(model, to_psi(model, xi)).total; }

/// Fills spend, total cost and rho_after from psi.
void finish(AllocationResult& result, const DsmSet& nominal, const FeedbackDistribution& dist,
            const CostModel& model) {
  result.spend.clear();
  for (const auto& [c, value] : result.psi) result.spend[c] = model.cost_of(c, value);
  result.total_cost = total_cost(model, result.psi).total;
  result.rho_after = feasibility_index(nominal, dist, result.psi);
}

AllocationResult corner(const DsmSet& nominal, const FeedbackDistribution& dist, const CostModel& model,
                        bool full_investment) {
  AllocationResult result;
  for (const Coordinate& c : model.coordinates()) result.psi[c] = full_investment ? model.lower(c) : model.omega(c);
  result.rho_before = feasibility_index(nominal, dist);
  result.converged = true;
  finish(result, nominal, dist, model);
  return result;
}

}  // namespace

double feasibility_index(const DsmSet& nominal, const FeedbackDistribution& dist, const DependencyMap& psi) {
  return spectral_radius(GeneralizedWtmOperator(apply_allocation(nominal, psi), dist));
}

AllocationResult solve_budget_constrained(const DsmSet& nominal, const FeedbackDistribution& dist,
                                          const CostModel& model, double budget, const SolverOptions& options) {
  if (!(budget >= 0.0) || !std::isfinite(budget)) throw InvariantViolation("budget", "must be >= 0");
  validate(nominal);
  const auto& coords = model.coordinates();
  if (coords.empty() || budget == 0.0) return corner(nominal, dist, model, false);

  const Box box = log_box(model);
  // rho is entrywise nondecreasing in Psi, so an affordable corner is optimal.
  if (cost_at(model, box.lo) <= budget) return corner(nominal, dist, model, true);

  // Box centre, pulled toward log Omega until strictly inside the budget.
  Eigen::VectorXd x0 = 0.5 * (box.lo + box.hi);
  for (double scale = 0.5; cost_at(model, x0) >= 0.5 * budget; scale *= 0.5) {
    x0 = box.hi - scale * (box.hi - box.lo);
    if (scale < 1e-300) break;
  }

  LogRhoEvaluator rho(nominal, dist, coords);
  const LogCostEvaluator cost(model);
  const double log_cap = std::log(budget + model.constant_part());
  BarrierProblem prob{box.lo, box.hi,
                      [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
                        if (g == nullptr) return rho.value(x);
                        return rho.value_and_gradient(x, *g);
                      },
                      [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
                        return cost.value_and_gradient(x, g) - log_cap;
                      }};
  // Spend within 1e-8 (relative, for budgets above one) of the budget.
  prob.active_tolerance = 1e-8 * std::max(1.0, budget) / (budget + model.constant_part());
  const BarrierOutcome outcome = minimize_with_barrier(prob, x0, options);

  AllocationResult result;
  result.psi = to_psi(model, outcome.x);
  result.rho_before = feasibility_index(nominal, dist);
  result.iterations = outcome.iterations;
  result.finite_difference_gradients = rho.finite_difference_count;
  result.converged = outcome.converged(prob.active_tolerance);
  finish(result, nominal, dist, model);
  return result;
}

AllocationResult solve_performance_constrained(const DsmSet& nominal, const FeedbackDistribution& dist,
                                               const CostModel& model, double target, const SolverOptions& options) {
  if (!(target >= 0.0 && target < 1.0)) throw InvariantViolation("target", "must lie in [0, 1)");
  validate(nominal);
  const auto& coords = model.coordinates();
  const double rho_nominal = feasibility_index(nominal, dist);
  if (rho_nominal <= target) return corner(nominal, dist, model, false);

  const Box box = log_box(model);
  const double rho_full = feasibility_index(nominal, dist, to_psi(model, box.lo));
  if (rho_full > target) {
    throw Infeasible("full investment reaches rho = " + std::to_string(rho_full) + " > target " +
                     std::to_string(target));
  }
  if (coords.empty() || rho_full >= target * (1.0 - 1e-12)) return corner(nominal, dist, model, true);

  LogRhoEvaluator rho(nominal, dist, coords);
  const double log_target = std::log(target);
  Eigen::VectorXd x0 = box.lo + 0.5 * (box.hi - box.lo);
  for (double scale = 0.25; !(rho.value(x0) < log_target); scale *= 0.5) {
    if (scale < 1e-18) return corner(nominal, dist, model, true);
    x0 = box.lo + scale * (box.hi - box.lo);
  }

  const LogCostEvaluator cost(model);
  BarrierProblem prob{box.lo, box.hi,
                      [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) { return cost.value_and_gradient(x, g); },
                      [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
                        const double v = g == nullptr ? rho.value(x) : rho.value_and_gradient(x, *g);
                        return v - log_target;
                      }};
  // rho within 1e-6 of the target.
  prob.active_tolerance = 1e-6 / target;
  const BarrierOutcome outcome = minimize_with_barrier(prob, x0, options);

  AllocationResult result;
  result.psi = to_psi(model, outcome.x);
  result.rho_before = rho_nominal;
  result.iterations = outcome.iterations;
  result.finite_difference_gradients = rho.finite_difference_count;
  result.converged = outcome.converged(prob.active_tolerance);
  finish(result, nominal, dist, model);
  return result;
}

std::vector<Coordinate> baseline_eligible(const CostModel& model, const std::set<int>& focus_tasks) {
  std::vector<Coordinate> eligible;
  for (const Coordinate& c : model.coordinates()) {
    const bool row = focus_tasks.contains(c.i);
    const bool col = focus_tasks.contains(c.j);
    const bool take = (c.block == Block::L && (row || col)) || (c.block == Block::LS && col) ||
                      (c.block == Block::SL && row);
    if (take) eligible.push_back(c);
  }
  return eligible;
}

AllocationResult baseline_allocation(const DsmSet& nominal, const FeedbackDistribution& dist, const CostModel& model,
                                     double budget, const std::set<int>& focus_tasks) {
  if (!(budget >= 0.0) || !std::isfinite(budget)) throw InvariantViolation("budget", "must be >= 0");
  validate(nominal);
  for (int t : focus_tasks) {
    if (t < 0 || t >= nominal.tasks()) throw InvariantViolation("focus", "task " + std::to_string(t + 1) + " out of range");
  }
  const std::vector<Coordinate> eligible = baseline_eligible(model, focus_tasks);

  // Proportional split; coordinates whose share exceeds their full-investment
  // cost are capped and the remainder is split again among the rest.
  std::map<Coordinate, double> spend;
  std::vector<Coordinate> active = eligible;
  double remaining = budget;
  for (std::size_t round = 0; round <= eligible.size() && !active.empty() && remaining > 0.0; ++round) {
    double weight = 0.0;
    for (const Coordinate& c : active) weight += model.omega(c);
    std::vector<Coordinate> still_active;
    double capped_total = 0.0;
    for (const Coordinate& c : active) {
      const double cap = model.full_investment(c);
      if (remaining * model.omega(c) / weight >= cap) {
        spend[c] = cap;
        capped_total += cap;
      } else {
        still_active.push_back(c);
      }
    }
    if (still_active.size() == active.size()) {
      for (const Coordinate& c : active) spend[c] = remaining * model.omega(c) / weight;
      remaining = 0.0;
      break;
    }
    remaining -= capped_total;
    active = std::move(still_active);
  }

  AllocationResult result;
  for (const Coordinate& c : model.coordinates()) {
    const auto it = spend.find(c);
    result.psi[c] = it == spend.end() ? model.omega(c) : model.invert(c, it->second);
  }
  result.rho_before = feasibility_index(nominal, dist);
  result.converged = true;
  finish(result, nominal, dist, model);
  return result;
}

}  // namespace pdopt
