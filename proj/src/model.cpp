#include "pdopt/model.hpp"

#include <algorithm>
#include <cmath>

namespace pdopt {

std::string_view block_name(Block block) {
  switch (block) {
    case Block::L: return "L";
    case Block::S: return "S";
    case Block::LS: return "LS";
    case Block::SL: return "SL";
  }
  return "?";
}

std::optional<Block> parse_block(std::string_view name) {
  if (name == "L") return Block::L;
  if (name == "S") return Block::S;
  if (name == "LS") return Block::LS;
  if (name == "SL") return Block::SL;
  return std::nullopt;
}

std::string to_string(const Coordinate& c) {
  return std::string(block_name(c.block)) + "(" + std::to_string(c.i + 1) + "," + std::to_string(c.j + 1) + ")";
}

FeedbackDistribution::FeedbackDistribution(std::map<int, double> pmf) : pmf_(std::move(pmf)) {
  if (pmf_.empty()) throw InvariantViolation("interval_pmf", "must not be empty");
  double total = 0.0;
  bool any_positive = false;
  for (const auto& [h, p] : pmf_) {
    const std::string field = "interval_pmf[" + std::to_string(h) + "]";
    if (h < 1) throw InvariantViolation(field, "interval must be >= 1");
    if (!(p >= 0.0) || !std::isfinite(p)) throw InvariantViolation(field, "probability must be nonnegative");
    total += p;
    if (p > 0.0) {
      if (!any_positive) h_min_ = h;
      h_max_ = h;
      any_positive = true;
    }
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvariantViolation("interval_pmf", "must sum to 1");
}

FeedbackDistribution FeedbackDistribution::deterministic(int h) { return FeedbackDistribution({{h, 1.0}}); }

double FeedbackDistribution::probability(int h) const {
  const auto it = pmf_.find(h);
  return it == pmf_.end() ? 0.0 : it->second;
}

double FeedbackDistribution::mean() const {
  double mu = 0.0;
  for (const auto& [h, p] : pmf_) mu += h * p;
  return mu;
}

Eigen::VectorXd ProjectState::stacked() const {
  Eigen::VectorXd x(l.size() + s.size() + h.size());
  x << l, s, h;
  return x;
}

ProjectState ProjectState::from_stacked(const Eigen::VectorXd& x) {
  const Eigen::Index m = x.size() / 3;
  return {x.segment(0, m), x.segment(m, m), x.segment(2 * m, m)};
}

ProjectState ProjectState::unit(Eigen::Index m) {
  return {Eigen::VectorXd::Ones(m), Eigen::VectorXd::Ones(m), Eigen::VectorXd::Zero(m)};
}

void validate(const ProjectState& state, Eigen::Index m) {
  const std::pair<const Eigen::VectorXd*, const char*> parts[] = {
      {&state.l, "initial_state.L"}, {&state.s, "initial_state.S"}, {&state.h, "initial_state.H"}};
  for (const auto& [vec, name] : parts) {
    if (vec->size() != m) throw InvariantViolation(name, "must have length " + std::to_string(m));
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!((*vec)(i) >= 0.0)) {
        throw InvariantViolation(std::string(name) + "[" + std::to_string(i) + "]", "nonnegative");
      }
    }
  }
}

bool is_tunable(const DsmSet& dsms, const Coordinate& c) {
  const Eigen::Index m = dsms.tasks();
  if (c.i < 0 || c.j < 0 || c.i >= m || c.j >= m) return false;
  if ((c.block == Block::L || c.block == Block::S) && c.i == c.j) return false;
  return dsms.block(c.block)(c.i, c.j) != 0.0;
}

std::vector<Coordinate> tunable_coordinates(const DsmSet& dsms) {
  std::vector<Coordinate> coords;
  const int m = static_cast<int>(dsms.tasks());
  for (Block b : {Block::L, Block::S, Block::LS, Block::SL}) {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const Coordinate c{b, i, j};
        if (is_tunable(dsms, c)) coords.push_back(c);
      }
    }
  }
  return coords;
}

DsmSet apply_allocation(const DsmSet& dsms, const DependencyMap& psi, double epsilon) {
  // Values produced as exp(log Omega) may overshoot the box by an ulp or two.
  constexpr double kSlack = 1e-12;
  DsmSet out = dsms;
  for (const auto& [c, value] : psi) {
    const std::string field = "psi." + to_string(c);
    if (!is_tunable(dsms, c)) throw InvariantViolation(field, "not a tunable dependency");
    const double omega = dsms.block(c.block)(c.i, c.j);
    const double lo = epsilon * omega;
    if (!std::isfinite(value) || value > omega * (1.0 + kSlack) || value < lo * (1.0 - kSlack) || value < 0.0) {
      throw InvariantViolation(field, "must lie in [epsilon*Omega, Omega]");
    }
    out.block(c.block)(c.i, c.j) = std::clamp(value, lo, omega);
  }
  return out;
}

}  // namespace pdopt
