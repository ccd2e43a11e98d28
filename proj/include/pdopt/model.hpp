#pragma once

// Project data model: DSM/IDM boundary conditions, work transformation
// matrices, the switched transition pair and the generalized WTM.

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "pdopt/errors.hpp"

namespace pdopt {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Which of the four nominal matrices a dependency lives in.
enum class Block { L, S, LS, SL };

std::string_view block_name(Block block);
std::optional<Block> parse_block(std::string_view name);

/// A dependency entry Omega_{block}(i, j), zero-based.
struct Coordinate {
  Block block;
  int i;
  int j;

  auto operator<=>(const Coordinate&) const = default;
};

std::string to_string(const Coordinate& c);

/// Per-dependency values (tuned dependencies, spends, gradients, ...).
using DependencyMap = std::map<Coordinate, double>;

/// The DSMs within the local and system teams and the two IDMs.
template <typename Scalar>
struct BasicDsmSet {
  Mat<Scalar> omega_l;
  Mat<Scalar> omega_s;
  Mat<Scalar> omega_ls;
  Mat<Scalar> omega_sl;

  Eigen::Index tasks() const { return omega_l.rows(); }

  const Mat<Scalar>& block(Block b) const {
    switch (b) {
      case Block::L: return omega_l;
      case Block::S: return omega_s;
      case Block::LS: return omega_ls;
      case Block::SL: return omega_sl;
    }
    return omega_l;
  }
  Mat<Scalar>& block(Block b) {
    return const_cast<Mat<Scalar>&>(std::as_const(*this).block(b));
  }
};
using DsmSet = BasicDsmSet<double>;

template <typename Scalar>
struct BasicWtmSet {
  Mat<Scalar> w_l;
  Mat<Scalar> w_s;
  Mat<Scalar> w_ls;
  Mat<Scalar> w_sl;
  Mat<Scalar> w_sh;
};
using WtmSet = BasicWtmSet<double>;

/// A1 applies at feedback steps, A2 otherwise. Both are 3m x 3m.
template <typename Scalar>
struct BasicTransitionPair {
  Mat<Scalar> a1;
  Mat<Scalar> a2;

  Eigen::Index tasks() const { return a1.rows() / 3; }
};
using TransitionPair = BasicTransitionPair<double>;

/// Distribution of the number of steps between consecutive feedbacks.
class FeedbackDistribution {
 public:
  /// Throws InvariantViolation unless every h >= 1, every p_h >= 0 and the
  /// probabilities sum to one within 1e-12.
  explicit FeedbackDistribution(std::map<int, double> pmf);

  static FeedbackDistribution deterministic(int h);

  const std::map<int, double>& pmf() const { return pmf_; }
  double probability(int h) const;
  /// Bounds of the positive-probability support.
  int h_min() const { return h_min_; }
  int h_max() const { return h_max_; }
  double mean() const;

 private:
  std::map<int, double> pmf_;
  int h_min_ = 1;
  int h_max_ = 1;
};

/// x(k) = [L(k); S(k); H(k)].
struct ProjectState {
  Eigen::VectorXd l;
  Eigen::VectorXd s;
  Eigen::VectorXd h;

  Eigen::VectorXd stacked() const;
  static ProjectState from_stacked(const Eigen::VectorXd& x);
  /// Sum of L and S. H is finished work waiting for transfer.
  double unfinished() const { return l.sum() + s.sum(); }
  /// L = S = 1, H = 0.
  static ProjectState unit(Eigen::Index m);
};

void validate(const ProjectState& state, Eigen::Index m);

namespace detail {

template <typename Scalar>
void check_block(const Mat<Scalar>& mat, Eigen::Index m, const char* name, bool diagonal_is_completion) {
  if (mat.rows() != m || mat.cols() != m) {
    throw InvariantViolation(name, "must be " + std::to_string(m) + "x" + std::to_string(m));
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const Scalar v = mat(i, j);
      const std::string field = std::string(name) + "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
      if (!(v >= Scalar(0))) throw InvariantViolation(field, "nonnegative");
      if (diagonal_is_completion && i == j && !(v > Scalar(0) && v <= Scalar(1))) {
        throw InvariantViolation(field, "completion coefficient must lie in (0, 1]");
      }
    }
  }
}

}  // namespace detail

template <typename Scalar>
void validate(const BasicDsmSet<Scalar>& dsms) {
  const Eigen::Index m = dsms.tasks();
  if (m < 1) throw InvariantViolation("m", "must be positive");
  detail::check_block(dsms.omega_l, m, "omega_l", true);
  detail::check_block(dsms.omega_s, m, "omega_s", true);
  detail::check_block(dsms.omega_ls, m, "omega_ls", false);
  detail::check_block(dsms.omega_sl, m, "omega_sl", false);
}

/// WTMs from DSMs/IDMs: diagonal 1 - Omega_ii, off-diagonal Omega_ij * Omega_jj
/// (IDMs scaled by the source team's completion coefficient), W_SH = W_SL.
template <typename Scalar>
BasicWtmSet<Scalar> build_wtms(const BasicDsmSet<Scalar>& dsms) {
  validate(dsms);
  const auto within = [](const Mat<Scalar>& omega) {
    Mat<Scalar> w = omega * omega.diagonal().asDiagonal();
    w.diagonal() = Vec<Scalar>::Ones(omega.rows()) - omega.diagonal();
    return w;
  };
  BasicWtmSet<Scalar> w;
  w.w_l = within(dsms.omega_l);
  w.w_s = within(dsms.omega_s);
  w.w_ls = dsms.omega_ls * dsms.omega_l.diagonal().asDiagonal();
  w.w_sl = dsms.omega_sl * dsms.omega_s.diagonal().asDiagonal();
  w.w_sh = w.w_sl;
  return w;
}

template <typename Scalar>
BasicTransitionPair<Scalar> assemble_transitions(const BasicWtmSet<Scalar>& w) {
  const Eigen::Index m = w.w_l.rows();
  const auto eye = Mat<Scalar>::Identity(m, m);
  BasicTransitionPair<Scalar> pair;
  pair.a1 = Mat<Scalar>::Zero(3 * m, 3 * m);
  pair.a1.block(0, 0, m, m) = w.w_l;
  pair.a1.block(0, m, m, m) = w.w_sl;
  pair.a1.block(0, 2 * m, m, m) = eye;
  pair.a1.block(m, 0, m, m) = w.w_ls;
  pair.a1.block(m, m, m, m) = w.w_s;

  pair.a2 = Mat<Scalar>::Zero(3 * m, 3 * m);
  pair.a2.block(0, 0, m, m) = w.w_l;
  pair.a2.block(m, 0, m, m) = w.w_ls;
  pair.a2.block(m, m, m, m) = w.w_s;
  pair.a2.block(2 * m, m, m, m) = w.w_sh;
  pair.a2.block(2 * m, 2 * m, m, m) = eye;
  return pair;
}

/// M = sum_h p_h A2^(h-1) A1, with powers of A2 by repeated multiplication.
template <typename Scalar>
Mat<Scalar> generalized_wtm(const BasicTransitionPair<Scalar>& pair, const FeedbackDistribution& dist) {
  const Eigen::Index n = pair.a1.rows();
  Mat<Scalar> power = Mat<Scalar>::Identity(n, n);
  Mat<Scalar> expected = Mat<Scalar>::Zero(n, n);
  for (int h = 1; h <= dist.h_max(); ++h) {
    const double p = dist.probability(h);
    if (p > 0.0) expected += Scalar(p) * power;
    if (h < dist.h_max()) power = (pair.a2 * power).eval();
  }
  return expected * pair.a1;
}

inline TransitionPair transitions(const DsmSet& dsms) { return assemble_transitions(build_wtms(dsms)); }

inline Eigen::MatrixXd generalized_wtm(const DsmSet& dsms, const FeedbackDistribution& dist) {
  return generalized_wtm(transitions(dsms), dist);
}

/// Nonzero entries that investment may weaken: every nonzero IDM entry and
/// every nonzero off-diagonal DSM entry. Sorted by (block, i, j).
std::vector<Coordinate> tunable_coordinates(const DsmSet& dsms);

bool is_tunable(const DsmSet& dsms, const Coordinate& c);

/// Copy of `dsms` with the tunable entries listed in `psi` replaced.
/// Each value must lie in [epsilon * Omega, Omega].
DsmSet apply_allocation(const DsmSet& dsms, const DependencyMap& psi, double epsilon = 0.0);

}  // namespace pdopt
