#pragma once

// Shared fixtures and independent reference implementations for the tests.
// The references are written element by element on purpose: they must not
// share code paths with the library.

#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "pdopt/model.hpp"

namespace testing {

using pdopt::DsmSet;
using pdopt::FeedbackDistribution;

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(0x5eed);
  return gen;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

/// Random DSM set: diagonals in [diag_lo, 1], off-diagonal and IDM entries
/// nonzero with probability `density`, values in (0, scale].
inline DsmSet random_dsms(int m, double density = 0.6, double scale = 0.5, double diag_lo = 0.2) {
  DsmSet d;
  d.omega_l = Eigen::MatrixXd::Zero(m, m);
  d.omega_s = Eigen::MatrixXd::Zero(m, m);
  d.omega_ls = Eigen::MatrixXd::Zero(m, m);
  d.omega_sl = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::MatrixXd* mat : {&d.omega_l, &d.omega_s, &d.omega_ls, &d.omega_sl}) {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        if (uniform(0, 1) < density) (*mat)(i, j) = uniform(0.01, scale);
      }
    }
  }
  for (int i = 0; i < m; ++i) {
    d.omega_l(i, i) = uniform(diag_lo, 1.0);
    d.omega_s(i, i) = uniform(diag_lo, 1.0);
  }
  return d;
}

/// Random pmf on a random contiguous support within 1..hmax.
inline FeedbackDistribution random_pmf(int hmax = 4) {
  const int lo = std::uniform_int_distribution<int>(1, hmax)(rng());
  const int hi = std::uniform_int_distribution<int>(lo, hmax)(rng());
  std::map<int, double> pmf;
  double total = 0.0;
  for (int h = lo; h <= hi; ++h) total += pmf[h] = uniform(0.1, 1.0);
  // Renormalize, then push the rounding residue onto the first entry.
  double sum = 0.0;
  for (auto& [h, p] : pmf) sum += p /= total;
  pmf.begin()->second += 1.0 - sum;
  return FeedbackDistribution(pmf);
}

struct RefPair {
  Eigen::MatrixXd a1, a2;
};

/// A1/A2 from the DSMs, entry by entry.
inline RefPair reference_transitions(const DsmSet& d) {
  const int m = static_cast<int>(d.omega_l.rows());
  const int n = 3 * m;
  RefPair p{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n)};
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double wl = i == j ? 1.0 - d.omega_l(i, i) : d.omega_l(i, j) * d.omega_l(j, j);
      const double ws = i == j ? 1.0 - d.omega_s(i, i) : d.omega_s(i, j) * d.omega_s(j, j);
      const double wls = d.omega_ls(i, j) * d.omega_l(j, j);
      const double wsl = d.omega_sl(i, j) * d.omega_s(j, j);
      p.a1(i, j) = wl;
      p.a1(i, m + j) = wsl;
      p.a1(m + i, j) = wls;
      p.a1(m + i, m + j) = ws;
      p.a2(i, j) = wl;
      p.a2(m + i, j) = wls;
      p.a2(m + i, m + j) = ws;
      p.a2(2 * m + i, m + j) = wsl;
    }
    p.a1(i, 2 * m + i) = 1.0;
    p.a2(2 * m + i, 2 * m + i) = 1.0;
  }
  return p;
}

inline Eigen::MatrixXd reference_m(const DsmSet& d, const FeedbackDistribution& dist) {
  const RefPair p = reference_transitions(d);
  const Eigen::Index n = p.a1.rows();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [h, ph] : dist.pmf()) {
    Eigen::MatrixXd term = p.a1;
    for (int k = 1; k < h; ++k) term = p.a2 * term;
    m += ph * term;
  }
  return m;
}

/// Largest eigenvalue modulus by a dense nonsymmetric eigensolver.
inline double reference_rho(const Eigen::MatrixXd& mat) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(mat, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline double reference_rho(const DsmSet& d, const FeedbackDistribution& dist) {
  return reference_rho(reference_m(d, dist));
}

}  // namespace testing
