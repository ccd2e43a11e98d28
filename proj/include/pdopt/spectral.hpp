#pragma once

// Feasibility index rho(M), Perron vectors and d log rho / d log Psi.

#include <span>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "pdopt/model.hpp"

namespace pdopt {

/// Left/right Perron vectors of a nonnegative matrix, scaled so that
/// ||v||_1 = 1 and u'v = 1.
struct PerronPair {
  double rho = 0.0;
  Eigen::VectorXd u;
  Eigen::VectorXd v;
};

/// Matrix-free M = (sum_h p_h A2^(h-1)) A1. A1 and A2 are held sparse; the
/// products are exact, so this agrees with the dense generalized_wtm().
class GeneralizedWtmOperator {
 public:
  GeneralizedWtmOperator(const TransitionPair& pair, const FeedbackDistribution& dist);
  /// Builds A1 and A2 directly in sparse form. `dsms` is not validated.
  GeneralizedWtmOperator(const DsmSet& dsms, const FeedbackDistribution& dist);

  Eigen::Index size() const { return a1_.rows(); }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& y) const;
  Eigen::MatrixXd dense() const;

  const Eigen::SparseMatrix<double>& a1() const { return a1_; }
  const Eigen::SparseMatrix<double>& a2() const { return a2_; }
  const Eigen::SparseMatrix<double>& a2_transpose() const { return a2t_; }
  /// weights()[h - 1] = p_h for h = 1..h_max.
  const std::vector<double>& weights() const { return weights_; }

 private:
  Eigen::SparseMatrix<double> a1_;
  Eigen::SparseMatrix<double> a2_;
  Eigen::SparseMatrix<double> a1t_;
  Eigen::SparseMatrix<double> a2t_;
  std::vector<double> weights_;
};

/// Largest eigenvalue modulus of a nonnegative matrix.
double spectral_radius(const Eigen::MatrixXd& mat);
/// `warm_right`, when given, seeds the iteration and receives the final
/// right vector.
double spectral_radius(const GeneralizedWtmOperator& op, Eigen::VectorXd* warm_right = nullptr);

/// Power iteration on mat and mat' (tolerance 1e-12, at most 10,000
/// iterations) with a dense QR eigensolver as fallback. Throws
/// DegenerateSpectrum when no pair passes the residual checks or rho <= 1e-12.
PerronPair perron_pair(const Eigen::MatrixXd& mat);

/// Same, matrix-free. `warm` seeds both iterations; the optimizer passes the
/// previous iterate's pair here.
PerronPair perron_pair(const GeneralizedWtmOperator& op, const PerronPair* warm = nullptr);

/// Smallest value of rho used before taking logarithms.
inline constexpr double kRhoFloor = 1e-12;

/// Gradient of log rho(M) with respect to Xi = log Psi at the tuned project
/// `tuned`, for each coordinate in `coords`. `op` and `perron` must describe
/// `tuned`.
Eigen::VectorXd grad_log_rho(const GeneralizedWtmOperator& op, const PerronPair& perron, const DsmSet& tuned,
                             std::span<const Coordinate> coords);

/// Gradient of log rho(M) in Xi at Psi = psi (coordinates not in psi keep
/// their nominal values). Keys of the result are the keys of psi.
DependencyMap grad_log_rho(const DsmSet& dsms, const FeedbackDistribution& dist, const DependencyMap& psi);

}  // namespace pdopt
