#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "afgm/fdata.hpp"

namespace afgm {

struct CovarianceMatrix {
  std::size_t node = 0;
  Eigen::MatrixXd sigma;  // T x T, sigma(s, s') = n^-1 sum_u X_u(s) X_u(s')
};

/// Eigenpairs of the discretized covariance operator of one node.
///
/// Eigenvalues are sorted in nonincreasing order and clipped at zero. Row r of
/// `eigenfunctions` holds the r-th eigenfunction on the grid, normalized so
/// that its quadrature norm is one and its first value with magnitude above
/// 1e-10 is positive.
struct EigenSystem {
  std::size_t node = 0;
  Eigen::VectorXd eigenvalues;     // m_max
  Eigen::MatrixXd eigenfunctions;  // m_max x T
  std::size_t m_selected = 0;
};

struct ScorePanel {
  std::size_t node = 0;
  Eigen::MatrixXd scores;  // n x m
  bool transformed = false;
};

inline constexpr double kEigenvalueFloor = 1e-10;
inline constexpr std::size_t kDefaultMaxComponents = 25;

CovarianceMatrix estimate_covariance(const FunctionalDataset& ds, std::size_t node);

EigenSystem eigen_decompose(const CovarianceMatrix& cov, const TimeGrid& grid, std::size_t m_max);

/// Smallest m whose leading eigenvalues explain at least `fraction` of the total.
std::size_t select_truncation(const Eigen::VectorXd& eigenvalues, double fraction);

/// Scaled scores lambda_r^{-1/2} <X_u, phi_r> for r < es.m_selected.
ScorePanel compute_scores(const FunctionalDataset& ds, std::size_t node, const EigenSystem& es);

/// Maps scores monotonically into [-1, 1]: divide by max(1, max |x|), clamp,
/// re-center each column, clamp again.
ScorePanel transform_scores(const ScorePanel& sp);

}  // namespace afgm
