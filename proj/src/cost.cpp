#include <algorithm>
#include <cmath>

#include "pdopt/optimize.hpp"

namespace pdopt {

double evaluate(const Posynomial& f, double x) {
  const double lx = std::log(x);
  double total = 0.0;
  for (const Monomial& term : f) total += std::exp(term.log_coef + term.exponent * lx);
  return total;
}

namespace {

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvariantViolation("epsilon", "must lie in (0, 1)");
}

}  // namespace

CostModel CostModel::inverse_power(const DsmSet& nominal, double epsilon, double p) {
  check_epsilon(epsilon);
  if (!(p > 0.0) || !std::isfinite(p)) throw InvariantViolation("cost_exponent_p", "must be positive");
  // log c = (p + 1) log Omega - log(epsilon^-p - 1)
  const double log_denominator = std::log(std::expm1(-p * std::log(epsilon)));
  std::map<Coordinate, Posynomial> parts;
  for (const Coordinate& c : tunable_coordinates(nominal)) {
    const double omega = nominal.block(c.block)(c.i, c.j);
    parts[c] = {Monomial{(p + 1.0) * std::log(omega) - log_denominator, -p}};
  }
  CostModel model = posynomial(nominal, epsilon, std::move(parts));
  model.exponent_ = p;
  return model;
}

CostModel CostModel::posynomial(const DsmSet& nominal, double epsilon,
                                std::map<Coordinate, Posynomial> positive_parts) {
  check_epsilon(epsilon);
  CostModel model;
  model.epsilon_ = epsilon;
  model.coords_ = tunable_coordinates(nominal);
  for (const Coordinate& c : model.coords_) {
    auto it = positive_parts.find(c);
    if (it == positive_parts.end() || it->second.empty()) {
      throw InvariantViolation("cost." + to_string(c), "missing posynomial");
    }
    const double omega = nominal.block(c.block)(c.i, c.j);
    const double at_omega = evaluate(it->second, omega);
    model.entries_[c] = Entry{omega, std::move(it->second), at_omega};
    model.constant_part_ += at_omega;
  }
  return model;
}

const CostModel::Entry& CostModel::entry(const Coordinate& c) const {
  const auto it = entries_.find(c);
  if (it == entries_.end()) throw InvariantViolation("cost." + to_string(c), "not a tunable dependency");
  return it->second;
}

double CostModel::coefficient(const Coordinate& c) const {
  return std::exp(entry(c).f_plus.front().log_coef);
}

double CostModel::cost_of(const Coordinate& c, double psi) const {
  const Entry& e = entry(c);
  const double lo = epsilon_ * e.omega;
  if (!(psi >= lo * (1.0 - 1e-12) && psi <= e.omega * (1.0 + 1e-12))) {
    throw InvariantViolation("psi." + to_string(c), "must lie in [epsilon*Omega, Omega]");
  }
  if (psi == e.omega) return 0.0;
  return evaluate(e.f_plus, psi) - e.f_plus_at_omega;
}

double CostModel::full_investment(const Coordinate& c) const { return cost_of(c, lower(c)); }

double CostModel::invert(const Coordinate& c, double spend) const {
  const Entry& e = entry(c);
  if (spend <= 0.0) return e.omega;
  if (exponent_) {
    // Psi = Omega (1 + spend (epsilon^-p - 1) / Omega)^(-1/p)
    const double p = *exponent_;
    const double growth = std::expm1(-p * std::log(epsilon_));
    const double psi = e.omega * std::pow(1.0 + spend * growth / e.omega, -1.0 / p);
    return std::clamp(psi, lower(c), e.omega);
  }
  // Bisection in log Psi; the cost is assumed decreasing on the box.
  double lo = std::log(lower(c));
  double hi = std::log(e.omega);
  if (spend >= full_investment(c)) return lower(c);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (cost_of(c, std::exp(mid)) > spend) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::clamp(std::exp(hi), lower(c), e.omega);
}

CostSplit total_cost(const CostModel& model, const DependencyMap& psi) {
  CostSplit split;
  split.negative = model.constant_part();
  for (const auto& [c, value] : psi) {
    if (std::find(model.coordinates().begin(), model.coordinates().end(), c) == model.coordinates().end()) {
      throw InvariantViolation("psi." + to_string(c), "not a tunable dependency");
    }
  }
  for (const Coordinate& c : model.coordinates()) {
    const auto it = psi.find(c);
    const double value = it == psi.end() ? model.omega(c) : it->second;
    const double cost = model.cost_of(c, value);
    split.total += cost;
  }
  split.positive = split.total + split.negative;
  return split;
}

}  // namespace pdopt
