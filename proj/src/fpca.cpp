#include "afgm/fpca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "afgm/error.hpp"

namespace afgm {

CovarianceMatrix estimate_covariance(const FunctionalDataset& ds, std::size_t node) {
  require(ds.centered(), ErrorKind::precondition, "estimate_covariance requires a centered dataset");
  require(node < ds.p(), ErrorKind::invalid_argument, "node index out of range");
  const auto n = static_cast<Eigen::Index>(ds.n());
  const auto T = static_cast<Eigen::Index>(ds.T());
  Eigen::MatrixXd X(n, T);
  for (Eigen::Index u = 0; u < n; ++u) {
    auto c = ds.curve(static_cast<std::size_t>(u), node);
    for (Eigen::Index s = 0; s < T; ++s) X(u, s) = c[static_cast<std::size_t>(s)];
  }
  CovarianceMatrix cov;
  cov.node = node;
  cov.sigma = (X.transpose() * X) / static_cast<double>(n);
  // Enforce exact symmetry regardless of the product kernel.
  for (Eigen::Index s = 0; s < T; ++s)
    for (Eigen::Index t = s + 1; t < T; ++t) cov.sigma(t, s) = cov.sigma(s, t);
  return cov;
}

EigenSystem eigen_decompose(const CovarianceMatrix& cov, const TimeGrid& grid, std::size_t m_max) {
  const auto T = static_cast<Eigen::Index>(grid.size());
  require(cov.sigma.rows() == T && cov.sigma.cols() == T, ErrorKind::invalid_argument,
          "dimension mismatch: covariance does not match the grid");
  require(m_max >= 1 && m_max <= grid.size(), ErrorKind::invalid_argument,
          "dimension error: m_max must be in [1, T]");

  Eigen::VectorXd sqrt_w(T);
  for (Eigen::Index s = 0; s < T; ++s) sqrt_w(s) = std::sqrt(grid.weights()[static_cast<std::size_t>(s)]);
  Eigen::MatrixXd A = sqrt_w.asDiagonal() * cov.sigma * sqrt_w.asDiagonal();
  A = 0.5 * (A + A.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A);
  require(solver.info() == Eigen::Success, ErrorKind::numerical, "symmetric eigensolver failed");

  // Eigen returns ascending eigenvalues.
  const Eigen::Index m = static_cast<Eigen::Index>(m_max);
  EigenSystem es;
  es.node = cov.node;
  es.eigenvalues.resize(m);
  es.eigenfunctions.resize(m, T);
  for (Eigen::Index r = 0; r < m; ++r) {
    const Eigen::Index col = T - 1 - r;
    es.eigenvalues(r) = std::max(0.0, solver.eigenvalues()(col));
    Eigen::VectorXd phi = solver.eigenvectors().col(col).cwiseQuotient(sqrt_w);
    for (Eigen::Index s = 0; s < T; ++s) {
      if (std::abs(phi(s)) > 1e-10) {
        if (phi(s) < 0.0) phi = -phi;
        break;
      }
    }
    es.eigenfunctions.row(r) = phi.transpose();
  }
  es.m_selected = m_max;
  return es;
}

std::size_t select_truncation(const Eigen::VectorXd& eigenvalues, double fraction) {
  require(fraction > 0.0 && fraction < 1.0, ErrorKind::invalid_argument,
          "variance fraction must lie in (0, 1)");
  double total = 0.0;
  for (Eigen::Index r = 0; r < eigenvalues.size(); ++r) {
    require(eigenvalues(r) >= 0.0, ErrorKind::invalid_argument, "eigenvalues must be nonnegative");
    total += eigenvalues(r);
  }
  require(total > 0.0, ErrorKind::degenerate, "degenerate spectrum: all eigenvalues are zero");
  double acc = 0.0;
  for (Eigen::Index r = 0; r < eigenvalues.size(); ++r) {
    acc += eigenvalues(r);
    if (acc / total >= fraction) return static_cast<std::size_t>(r + 1);
  }
  return static_cast<std::size_t>(eigenvalues.size());
}

ScorePanel compute_scores(const FunctionalDataset& ds, std::size_t node, const EigenSystem& es) {
  require(es.m_selected >= 1, ErrorKind::precondition, "compute_scores requires m_selected >= 1");
  require(es.m_selected <= static_cast<std::size_t>(es.eigenvalues.size()), ErrorKind::invalid_argument,
          "m_selected exceeds the number of computed components");
  require(static_cast<std::size_t>(es.eigenfunctions.cols()) == ds.T(), ErrorKind::invalid_argument,
          "dimension mismatch: eigenfunctions do not match the dataset grid");
  const double floor = kEigenvalueFloor * es.eigenvalues(0);
  const auto m = static_cast<Eigen::Index>(es.m_selected);
  for (Eigen::Index r = 0; r < m; ++r)
    require(es.eigenvalues(r) > floor && es.eigenvalues(r) > 0.0, ErrorKind::degenerate,
            "ill-conditioned component: eigenvalue " + std::to_string(r + 1) + " of node " +
                std::to_string(node + 1) + " is below the floor");

  const auto n = static_cast<Eigen::Index>(ds.n());
  const std::size_t T = ds.T();
  ScorePanel sp;
  sp.node = node;
  sp.scores.resize(n, m);
  std::vector<double> phi(T);
  for (Eigen::Index r = 0; r < m; ++r) {
    for (std::size_t s = 0; s < T; ++s) phi[s] = es.eigenfunctions(r, static_cast<Eigen::Index>(s));
    const double scale = 1.0 / std::sqrt(es.eigenvalues(r));
    for (Eigen::Index u = 0; u < n; ++u)
      sp.scores(u, r) = scale * inner_product(ds.curve(static_cast<std::size_t>(u), node), phi, ds.grid());
  }
  return sp;
}

ScorePanel transform_scores(const ScorePanel& sp) {
  require(!sp.transformed, ErrorKind::precondition, "scores are already transformed");
  ScorePanel out = sp;
  const double c = sp.scores.size() ? std::max(1.0, sp.scores.cwiseAbs().maxCoeff()) : 1.0;
  auto clamp = [](Eigen::MatrixXd& M) { M = M.cwiseMax(-1.0).cwiseMin(1.0); };
  out.scores /= c;
  clamp(out.scores);
  if (out.scores.rows() > 0) {
    Eigen::RowVectorXd mean = out.scores.colwise().mean();
    out.scores.rowwise() -= mean;
  }
  clamp(out.scores);
  out.transformed = true;
  return out;
}

}  // namespace afgm
