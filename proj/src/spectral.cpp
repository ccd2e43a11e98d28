#include "pdopt/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Eigenvalues>

namespace pdopt {

namespace {

constexpr double kPowerTolerance = 1e-12;
constexpr double kResidualTolerance = 1e-9;
constexpr int kMaxIterations = 10000;
// Iterations before switching to M + rho*I, which removes any other
// eigenvalue of modulus rho (periodic or imprimitive M).
constexpr int kUnshiftedIterations = 2000;

Eigen::SparseMatrix<double> to_sparse(const Eigen::MatrixXd& dense) {
  return dense.sparseView(0.0, 0.0);
}

struct PowerResult {
  double rho = 0.0;
  Eigen::VectorXd vec;
  double residual = std::numeric_limits<double>::infinity();
};

Eigen::VectorXd positive_start(Eigen::Index n, const Eigen::VectorXd* warm) {
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  if (warm != nullptr && warm->size() == n && warm->allFinite() && warm->minCoeff() >= 0.0 && warm->sum() > 0.0) {
    x = *warm / warm->sum() + 1e-9 * x;
  }
  return x / x.sum();
}

/// Power iteration for a nonnegative operator from a positive start. The
/// returned residual is ||Mx - rho x||_inf with ||x||_1 = 1.
template <class Apply>
PowerResult power_iterate(const Apply& apply, Eigen::VectorXd x) {
  PowerResult best;
  for (int it = 0; it < kMaxIterations; ++it) {
    const Eigen::VectorXd y = apply(x);
    const double rho = y.sum();
    if (!(rho > 0.0)) {
      // M^k x = 0 for a positive x: M is nilpotent.
      return {0.0, x, 0.0};
    }
    const double residual = (y - rho * x).lpNorm<Eigen::Infinity>();
    if (residual < best.residual) best = {rho, x, residual};
    if (residual <= kPowerTolerance * std::max(rho, 1.0)) return best;
    const double shift = it < kUnshiftedIterations ? 0.0 : rho;
    Eigen::VectorXd next = y + shift * x;
    x = next / next.sum();
  }
  return best;
}

bool acceptable(const PowerResult& r) {
  return r.residual <= kResidualTolerance * std::max(r.rho, 1.0);
}

std::optional<PerronPair> normalize_pair(double rho, Eigen::VectorXd u, Eigen::VectorXd v) {
  if (!(rho > kRhoFloor)) return std::nullopt;
  v /= v.sum();
  u /= u.sum();
  const double overlap = u.dot(v);
  if (!(overlap > 1e-14 * u.lpNorm<Eigen::Infinity>())) return std::nullopt;
  u /= overlap;
  return PerronPair{rho, std::move(u), std::move(v)};
}

bool residuals_ok(const Eigen::MatrixXd& mat, const PerronPair& p) {
  const double scale = kResidualTolerance * std::max(p.rho, 1.0);
  const double rv = (mat * p.v - p.rho * p.v).lpNorm<Eigen::Infinity>();
  const double ru = (mat.transpose() * p.u - p.rho * p.u).lpNorm<Eigen::Infinity>();
  return rv <= scale * std::max(1.0, p.v.lpNorm<Eigen::Infinity>()) &&
         ru <= scale * std::max(1.0, p.u.lpNorm<Eigen::Infinity>());
}

/// Real nonnegative eigenvector of the eigenvalue with largest real part,
/// which for a nonnegative matrix is the Perron root.
std::optional<std::pair<double, Eigen::VectorXd>> dense_perron_vector(const Eigen::MatrixXd& mat) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(mat, true);
  if (solver.info() != Eigen::Success) return std::nullopt;
  const auto& values = solver.eigenvalues();
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < values.size(); ++k) {
    if (values(k).real() > values(best).real()) best = k;
  }
  Eigen::VectorXd vec = solver.eigenvectors().col(best).real();
  if (vec.sum() < 0.0) vec = -vec;
  const double peak = vec.lpNorm<Eigen::Infinity>();
  if (!(peak > 0.0) || vec.minCoeff() < -1e-8 * peak) return std::nullopt;
  vec = vec.cwiseMax(0.0);
  return std::make_pair(values(best).real(), vec);
}

std::optional<PerronPair> dense_perron(const Eigen::MatrixXd& mat) {
  const auto right = dense_perron_vector(mat);
  const auto left = dense_perron_vector(mat.transpose());
  if (!right || !left) return std::nullopt;
  auto pair = normalize_pair(right->first, left->second, right->second);
  if (!pair || !residuals_ok(mat, *pair)) return std::nullopt;
  return pair;
}

double dense_spectral_radius(const Eigen::MatrixXd& mat) {
  if (mat.size() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(mat, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

template <class Apply, class ApplyT>
std::optional<PerronPair> iterative_perron(const Apply& apply, const ApplyT& apply_t, Eigen::Index n,
                                           const PerronPair* warm) {
  const PowerResult right = power_iterate(apply, positive_start(n, warm ? &warm->v : nullptr));
  if (!acceptable(right)) return std::nullopt;
  const PowerResult left = power_iterate(apply_t, positive_start(n, warm ? &warm->u : nullptr));
  if (!acceptable(left)) return std::nullopt;
  if (std::abs(left.rho - right.rho) > kResidualTolerance * std::max(right.rho, 1.0)) return std::nullopt;
  return normalize_pair(right.rho, left.vec, right.vec);
}

}  // namespace

GeneralizedWtmOperator::GeneralizedWtmOperator(const TransitionPair& pair, const FeedbackDistribution& dist)
    : a1_(to_sparse(pair.a1)),
      a2_(to_sparse(pair.a2)),
      a1t_(a1_.transpose()),
      a2t_(a2_.transpose()),
      weights_(static_cast<std::size_t>(dist.h_max()), 0.0) {
  for (int h = 1; h <= dist.h_max(); ++h) weights_[static_cast<std::size_t>(h - 1)] = dist.probability(h);
}

GeneralizedWtmOperator::GeneralizedWtmOperator(const DsmSet& dsms, const FeedbackDistribution& dist)
    : weights_(static_cast<std::size_t>(dist.h_max()), 0.0) {
  for (int h = 1; h <= dist.h_max(); ++h) weights_[static_cast<std::size_t>(h - 1)] = dist.probability(h);
  const Eigen::Index m = dsms.tasks();
  const Eigen::Index n = 3 * m;
  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> t1, t2;
  const auto add = [](std::vector<Triplet>& t, Eigen::Index r, Eigen::Index c, double v) {
    if (v != 0.0) t.emplace_back(static_cast<int>(r), static_cast<int>(c), v);
  };
  for (Eigen::Index j = 0; j < m; ++j) {
    const double dl = dsms.omega_l(j, j);
    const double ds = dsms.omega_s(j, j);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double wl = i == j ? 1.0 - dl : dsms.omega_l(i, j) * dl;
      const double ws = i == j ? 1.0 - ds : dsms.omega_s(i, j) * ds;
      const double wls = dsms.omega_ls(i, j) * dl;
      const double wsl = dsms.omega_sl(i, j) * ds;
      add(t1, i, j, wl);
      add(t1, i, m + j, wsl);
      add(t1, m + i, j, wls);
      add(t1, m + i, m + j, ws);
      add(t2, i, j, wl);
      add(t2, m + i, j, wls);
      add(t2, m + i, m + j, ws);
      add(t2, 2 * m + i, m + j, wsl);
    }
    add(t1, j, 2 * m + j, 1.0);
    add(t2, 2 * m + j, 2 * m + j, 1.0);
  }
  a1_.resize(n, n);
  a2_.resize(n, n);
  a1_.setFromTriplets(t1.begin(), t1.end());
  a2_.setFromTriplets(t2.begin(), t2.end());
  a1t_ = a1_.transpose();
  a2t_ = a2_.transpose();
}

Eigen::VectorXd GeneralizedWtmOperator::apply(const Eigen::VectorXd& x) const {
  // Horner: sum_h p_h A2^(h-1) w = p_1 w + A2 (p_2 w + A2 (p_3 w + ...)).
  const Eigen::VectorXd w = a1_ * x;
  Eigen::VectorXd acc = weights_.back() * w;
  for (std::size_t k = weights_.size() - 1; k-- > 0;) {
    acc = (a2_ * acc).eval();
    if (weights_[k] != 0.0) acc += weights_[k] * w;
  }
  return acc;
}

Eigen::VectorXd GeneralizedWtmOperator::apply_transpose(const Eigen::VectorXd& y) const {
  Eigen::VectorXd acc = weights_.back() * y;
  for (std::size_t k = weights_.size() - 1; k-- > 0;) {
    acc = (a2t_ * acc).eval();
    if (weights_[k] != 0.0) acc += weights_[k] * y;
  }
  return a1t_ * acc;
}

Eigen::MatrixXd GeneralizedWtmOperator::dense() const {
  const Eigen::Index n = size();
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index c = 0; c < n; ++c) out.col(c) = apply(Eigen::VectorXd::Unit(n, c));
  return out;
}

double spectral_radius(const Eigen::MatrixXd& mat) {
  if (mat.size() == 0) return 0.0;
  const auto apply = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return mat * x; };
  const PowerResult r = power_iterate(apply, positive_start(mat.rows(), nullptr));
  if (r.residual <= kPowerTolerance * std::max(r.rho, 1.0)) return r.rho;
  return dense_spectral_radius(mat);
}

double spectral_radius(const GeneralizedWtmOperator& op, Eigen::VectorXd* warm_right) {
  const auto apply = [&](const Eigen::VectorXd& x) { return op.apply(x); };
  const PowerResult r = power_iterate(apply, positive_start(op.size(), warm_right));
  if (r.residual <= kPowerTolerance * std::max(r.rho, 1.0)) {
    if (warm_right != nullptr) *warm_right = r.vec;
    return r.rho;
  }
  return dense_spectral_radius(op.dense());
}

PerronPair perron_pair(const Eigen::MatrixXd& mat) {
  const auto apply = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return mat * x; };
  const auto apply_t = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return mat.transpose() * x; };
  if (auto p = iterative_perron(apply, apply_t, mat.rows(), nullptr); p && residuals_ok(mat, *p)) return *p;
  if (auto p = dense_perron(mat)) return *p;
  throw DegenerateSpectrum("no Perron pair passes the residual checks");
}

PerronPair perron_pair(const GeneralizedWtmOperator& op, const PerronPair* warm) {
  const auto apply = [&](const Eigen::VectorXd& x) { return op.apply(x); };
  const auto apply_t = [&](const Eigen::VectorXd& x) { return op.apply_transpose(x); };
  if (auto p = iterative_perron(apply, apply_t, op.size(), warm)) return *p;
  if (auto p = dense_perron(op.dense())) return *p;
  throw DegenerateSpectrum("no Perron pair passes the residual checks");
}

Eigen::VectorXd grad_log_rho(const GeneralizedWtmOperator& op, const PerronPair& perron, const DsmSet& tuned,
                             std::span<const Coordinate> coords) {
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(coords.size()));
  if (!(perron.rho > kRhoFloor)) return grad;

  const auto& p = op.weights();
  const std::size_t horizon = p.size();
  const Eigen::Index m = tuned.tasks();

  // a[s] = (A2')^s u, b[t] = A2^t A1 v.
  std::vector<Eigen::VectorXd> a(horizon), b(horizon);
  a[0] = perron.u;
  b[0] = op.a1() * perron.v;
  for (std::size_t k = 1; k < horizon; ++k) {
    a[k] = op.a2_transpose() * a[k - 1];
    b[k] = op.a2() * b[k - 1];
  }
  // d(u'A1 v) weight: sum_h p_h u'A2^(h-1) = (K'u)'.
  Eigen::VectorXd ku = Eigen::VectorXd::Zero(op.size());
  for (std::size_t h = 1; h <= horizon; ++h) ku += p[h - 1] * a[h - 1];
  // Perturbing A2 inside A2^(h-1) A1: sum_s u'A2^s dA2 A2^(h-2-s) A1 v.
  // tail[s] = sum_{t} p_{s+t+2} b[t], so the term is sum_s a[s][r] tail[s][c].
  std::vector<Eigen::VectorXd> tail(horizon > 1 ? horizon - 1 : 0);
  for (std::size_t s = 0; s + 1 < horizon; ++s) {
    tail[s] = Eigen::VectorXd::Zero(op.size());
    for (std::size_t t = 0; s + t + 2 <= horizon; ++t) tail[s] += p[s + t + 1] * b[t];
  }
  const auto a1_weight = [&](Eigen::Index r, Eigen::Index c) { return ku(r) * perron.v(c); };
  const auto a2_weight = [&](Eigen::Index r, Eigen::Index c) {
    double acc = 0.0;
    for (std::size_t s = 0; s < tail.size(); ++s) acc += a[s](r) * tail[s](c);
    return acc;
  };

  for (std::size_t k = 0; k < coords.size(); ++k) {
    const Coordinate& c = coords[k];
    const Eigen::Index i = c.i, j = c.j;
    double sens = 0.0;
    switch (c.block) {
      case Block::L: {
        const double w = tuned.omega_l(i, j) * tuned.omega_l(j, j);
        sens = w * (a1_weight(i, j) + a2_weight(i, j));
        break;
      }
      case Block::S: {
        const double w = tuned.omega_s(i, j) * tuned.omega_s(j, j);
        sens = w * (a1_weight(m + i, m + j) + a2_weight(m + i, m + j));
        break;
      }
      case Block::LS: {
        const double w = tuned.omega_ls(i, j) * tuned.omega_l(j, j);
        sens = w * (a1_weight(m + i, j) + a2_weight(m + i, j));
        break;
      }
      case Block::SL: {
        // W_SL sits in A1 and, as W_SH, in A2.
        const double w = tuned.omega_sl(i, j) * tuned.omega_s(j, j);
        sens = w * (a1_weight(i, m + j) + a2_weight(2 * m + i, m + j));
        break;
      }
    }
    grad(static_cast<Eigen::Index>(k)) = sens / perron.rho;
  }
  return grad;
}

DependencyMap grad_log_rho(const DsmSet& dsms, const FeedbackDistribution& dist, const DependencyMap& psi) {
  const DsmSet tuned = apply_allocation(dsms, psi);
  std::vector<Coordinate> coords;
  coords.reserve(psi.size());
  for (const auto& [c, value] : psi) coords.push_back(c);
  const GeneralizedWtmOperator op(tuned, dist);
  const PerronPair perron = perron_pair(op);
  const Eigen::VectorXd g = grad_log_rho(op, perron, tuned, coords);
  DependencyMap out;
  for (std::size_t k = 0; k < coords.size(); ++k) out[coords[k]] = g(static_cast<Eigen::Index>(k));
  return out;
}

}  // namespace pdopt
