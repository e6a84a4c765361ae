#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

#include "afgm/fdata.hpp"
#include "afgm/rng.hpp"
#include "afgm/splines.hpp"

namespace afgm::testing {

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Philox& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.normal();
  return m;
}

inline Eigen::MatrixXd center_columns(Eigen::MatrixXd m) {
  m.rowwise() -= m.colwise().mean();
  return m;
}

// Random centered design with `groups` blocks of width k*m.
inline FullDesign random_design(std::size_t n, std::size_t groups, std::size_t k, std::size_t m, Philox& rng) {
  FullDesign d;
  d.target = 0;
  d.n = n;
  d.p = groups + 1;
  d.k_n = k;
  d.m_n = m;
  for (std::size_t j = 0; j < groups; ++j) {
    CenteredDesignBlock b;
    b.target_excluded = 0;
    b.source = j + 1;
    b.matrix = center_columns(gaussian_matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k * m), rng));
    d.blocks.push_back(std::move(b));
  }
  return d;
}

inline Eigen::MatrixXd stacked(const FullDesign& d) {
  const auto w = static_cast<Eigen::Index>(d.k_n * d.m_n);
  Eigen::MatrixXd X(static_cast<Eigen::Index>(d.n), w * static_cast<Eigen::Index>(d.blocks.size()));
  for (std::size_t j = 0; j < d.blocks.size(); ++j) X.middleCols(static_cast<Eigen::Index>(j) * w, w) = d.blocks[j].matrix;
  return X;
}

// Rows orthonormal under the grid quadrature (weighted Gram-Schmidt of the given rows).
inline Eigen::MatrixXd quadrature_orthonormal(Eigen::MatrixXd rows, const TimeGrid& grid) {
  const Eigen::Map<const Eigen::VectorXd> w(grid.weights().data(), static_cast<Eigen::Index>(grid.size()));
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    for (Eigen::Index q = 0; q < r; ++q) {
      const double proj = (rows.row(r).transpose().cwiseProduct(w)).dot(rows.row(q).transpose());
      rows.row(r) -= proj * rows.row(q);
    }
    rows.row(r) /= std::sqrt((rows.row(r).transpose().cwiseProduct(w)).dot(rows.row(r).transpose()));
  }
  return rows;
}

// n x m matrix with centered columns and Z'Z/n = I exactly (up to roundoff).
inline Eigen::MatrixXd white_scores(Eigen::Index n, Eigen::Index m, Philox& rng) {
  const Eigen::MatrixXd Z = center_columns(gaussian_matrix(n, m, rng));
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Z);
  // The columns of Q span those of Z, which are orthogonal to the constant vector.
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, m);
  return Q * std::sqrt(static_cast<double>(n));
}

}  // namespace afgm::testing
