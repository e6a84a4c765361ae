#include "afgm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "afgm/error.hpp"

namespace afgm {

GroupLassoProblem::GroupLassoProblem(Eigen::MatrixXd response, FullDesign design)
    : response_(std::move(response)), design_(std::move(design)) {
  require(static_cast<std::size_t>(response_.rows()) == design_.n, ErrorKind::invalid_argument,
          "dimension mismatch: response rows must equal n");
  require(response_.allFinite(), ErrorKind::invalid_argument, "response contains non-finite values");
  const auto width = static_cast<Eigen::Index>(block_width());
  gram_.reserve(design_.blocks.size());
  lipschitz_.reserve(design_.blocks.size());
  const double inv_n = design_.n > 0 ? 1.0 / static_cast<double>(design_.n) : 0.0;
  for (const auto& b : design_.blocks) {
    require(b.matrix.rows() == response_.rows() && b.matrix.cols() == width, ErrorKind::invalid_argument,
            "dimension mismatch: design block has the wrong shape");
    Eigen::MatrixXd g = inv_n * (b.matrix.transpose() * b.matrix);
    g = 0.5 * (g + g.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    require(es.info() == Eigen::Success, ErrorKind::numerical, "eigensolver failed on a block Gram matrix");
    Eigen::VectorXd values = es.eigenvalues().cwiseMax(0.0);
    const double top = values.size() > 0 ? values(values.size() - 1) : 0.0;
    // Directions at roundoff level are treated as exact null directions of the block.
    for (Eigen::Index k = 0; k < values.size(); ++k)
      if (values(k) <= 1e-12 * top) values(k) = 0.0;
    Eigen::MatrixXd rotated = b.matrix * es.eigenvectors();
    for (Eigen::Index k = 0; k < values.size(); ++k)
      if (values(k) == 0.0) rotated.col(k).setZero();
    rotated_.push_back(std::move(rotated));
    gram_.push_back(std::move(g));
    gram_vectors_.push_back(es.eigenvectors());
    gram_values_.push_back(std::move(values));
    lipschitz_.push_back(top);
  }
}

CoefficientBlocks CoefficientBlocks::zeros(const GroupLassoProblem& prob) {
  CoefficientBlocks B;
  B.blocks.assign(prob.group_count(),
                  Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(prob.block_width()),
                                        static_cast<Eigen::Index>(prob.m())));
  return B;
}

std::vector<std::size_t> CoefficientBlocks::active_set() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < blocks.size(); ++j)
    if (blocks[j].norm() > 0.0) out.push_back(j);
  return out;
}

namespace {

void check_shape(const GroupLassoProblem& prob, const CoefficientBlocks& B) {
  require(B.blocks.size() == prob.group_count(), ErrorKind::invalid_argument,
          "dimension mismatch: coefficient block count");
  for (const auto& b : B.blocks)
    require(static_cast<std::size_t>(b.rows()) == prob.block_width() &&
                static_cast<std::size_t>(b.cols()) == prob.m(),
            ErrorKind::invalid_argument, "dimension mismatch: coefficient block shape");
}

Eigen::MatrixXd fitted(const GroupLassoProblem& prob, const CoefficientBlocks& B) {
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(prob.response().rows(), prob.response().cols());
  for (std::size_t j = 0; j < prob.group_count(); ++j)
    if (B.blocks[j].norm() > 0.0) F.noalias() += prob.block(j) * B.blocks[j];
  return F;
}

double penalty(const CoefficientBlocks& B) {
  double s = 0.0;
  for (const auto& b : B.blocks) s += b.norm();
  return s;
}

double objective_from_residual(const Eigen::MatrixXd& R, const CoefficientBlocks& B, double lambda,
                               std::size_t n) {
  return R.squaredNorm() / (2.0 * static_cast<double>(n)) + lambda * penalty(B);
}

// Group soft-threshold: Z * max(0, 1 - t / ||Z||_F), exact zero when shrunk away.
void group_shrink(Eigen::MatrixXd& Z, double t) {
  const double norm = Z.norm();
  if (norm <= t)
    Z.setZero();
  else
    Z *= (1.0 - t / norm);
}

// Exact minimizer of 0.5 b'Db - c'b + lambda ||b||_F for diagonal D (rows of
// Ct are the eigen-coordinates), given ||Ct||_F > lambda. The solution is
// b_k = c_k t / (d_k t + lambda) where t = ||b||_F is the root of
// phi(t) = sum_k |c_k|^2 / (d_k t + lambda)^2 - 1. phi is convex and
// decreasing, so Newton from t = 0 increases monotonically to the root.
void exact_block_minimizer(const Eigen::VectorXd& d, Eigen::MatrixXd& Ct, double lambda) {
  for (Eigen::Index k = 0; k < d.size(); ++k)
    if (d(k) == 0.0) Ct.row(k).setZero();
  if (lambda == 0.0) {
    for (Eigen::Index k = 0; k < d.size(); ++k)
      if (d(k) > 0.0) Ct.row(k) /= d(k);
    return;
  }
  const Eigen::VectorXd c2 = Ct.rowwise().squaredNorm();
  if (std::sqrt(c2.sum()) <= lambda) {
    Ct.setZero();
    return;
  }
  double t = 0.0;
  for (int it = 0; it < 200; ++it) {
    double phi = -1.0, dphi = 0.0;
    for (Eigen::Index k = 0; k < d.size(); ++k) {
      if (c2(k) == 0.0) continue;
      const double den = d(k) * t + lambda;
      phi += c2(k) / (den * den);
      dphi -= 2.0 * c2(k) * d(k) / (den * den * den);
    }
    if (phi <= 0.0 || dphi >= 0.0) break;
    const double next = t - phi / dphi;
    if (!(next > t)) break;
    const bool done = (next - t) <= 1e-15 * next;
    t = next;
    if (done) break;
  }
  for (Eigen::Index k = 0; k < d.size(); ++k) Ct.row(k) *= t / (d(k) * t + lambda);
}

// (1/n) X_j' R. lambda_max and the solver's zero-block screen share this
// expression so that lambda = lambda_max screens every block bitwise.
Eigen::MatrixXd block_score(const Eigen::MatrixXd& X, const Eigen::MatrixXd& R, double inv_n) {
  Eigen::MatrixXd G = X.transpose() * R;
  G *= inv_n;
  return G;
}

bool design_rank_deficient(const GroupLassoProblem& prob) {
  const std::size_t cols = prob.group_count() * prob.block_width();
  if (cols == 0) return false;
  if (cols > prob.n()) return true;
  Eigen::MatrixXd X(static_cast<Eigen::Index>(prob.n()), static_cast<Eigen::Index>(cols));
  const auto w = static_cast<Eigen::Index>(prob.block_width());
  for (std::size_t j = 0; j < prob.group_count(); ++j) X.middleCols(static_cast<Eigen::Index>(j) * w, w) = prob.block(j);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  return qr.rank() < static_cast<Eigen::Index>(cols);
}

}  // namespace

double objective(const GroupLassoProblem& prob, const CoefficientBlocks& B, double lambda) {
  require(lambda >= 0.0, ErrorKind::invalid_argument, "lambda must be nonnegative");
  check_shape(prob, B);
  const Eigen::MatrixXd R = prob.response() - fitted(prob, B);
  return objective_from_residual(R, B, lambda, prob.n());
}

double lambda_max(const GroupLassoProblem& prob) {
  double top = 0.0;
  const double inv_n = 1.0 / static_cast<double>(prob.n());
  for (std::size_t j = 0; j < prob.group_count(); ++j)
    top = std::max(top, block_score(prob.block(j), prob.response(), inv_n).norm());
  return top;
}

KktReport kkt_residual(const GroupLassoProblem& prob, const CoefficientBlocks& B, double lambda,
                       double kkt_tol) {
  check_shape(prob, B);
  const Eigen::MatrixXd R = fitted(prob, B) - prob.response();
  const double inv_n = 1.0 / static_cast<double>(prob.n());
  KktReport rep;
  for (std::size_t j = 0; j < prob.group_count(); ++j) {
    const Eigen::MatrixXd G = inv_n * (prob.block(j).transpose() * R);
    const double bn = B.blocks[j].norm();
    if (bn > 0.0) {
      rep.max_active_residual = std::max(rep.max_active_residual, (G + (lambda / bn) * B.blocks[j]).norm());
    } else {
      rep.max_inactive_excess = std::max(rep.max_inactive_excess, std::max(0.0, G.norm() - lambda));
    }
  }
  rep.satisfied = rep.max_active_residual <= kkt_tol && rep.max_inactive_excess <= kkt_tol;
  return rep;
}

CoefficientBlocks solve(const GroupLassoProblem& prob, double lambda,
                        const std::optional<CoefficientBlocks>& warm, const SolverConfig& cfg) {
  require(std::isfinite(lambda) && lambda >= 0.0, ErrorKind::invalid_argument, "lambda must be nonnegative");
  require(cfg.tol > 0.0 && cfg.max_sweeps >= 1, ErrorKind::config, "solver tol must be > 0 and max_sweeps >= 1");

  const std::size_t J = prob.group_count();
  const double inv_n = 1.0 / static_cast<double>(prob.n());

  // Iterate on rotated coefficients Q_j' B_j; the rotation is orthogonal, so
  // block norms, the penalty and the fit are unchanged.
  CoefficientBlocks B = CoefficientBlocks::zeros(prob);
  if (warm) {
    check_shape(prob, *warm);
    for (std::size_t j = 0; j < J; ++j)
      if (warm->blocks[j].norm() > 0.0) B.blocks[j].noalias() = prob.gram_vectors(j).transpose() * warm->blocks[j];
  }
  Eigen::MatrixXd R = prob.response();
  for (std::size_t j = 0; j < J; ++j)
    if (B.blocks[j].norm() > 0.0) R.noalias() -= prob.rotated_block(j) * B.blocks[j];

  Eigen::MatrixXd C, Bn, delta;

  // Visits block j; returns the Frobenius norm of its change.
  auto visit = [&](std::size_t j) -> double {
    Eigen::MatrixXd& Bj = B.blocks[j];
    const double L = prob.lipschitz(j);
    if (!(L > 0.0)) {
      // A zero design block does not affect the fit, so the penalty pins it at zero.
      const double dn = Bj.norm();
      Bj.setZero();
      return dn;
    }
    const auto& Xj = prob.rotated_block(j);
    const auto& d = prob.gram_values(j);
    const bool was_zero = Bj.isZero(0.0);
    if (was_zero) {
      // Screen in the original coordinates; an inactive block that stays inactive costs one product.
      const Eigen::MatrixXd G = block_score(prob.block(j), R, inv_n);
      if (G.norm() <= lambda) return 0.0;
      C.noalias() = prob.gram_vectors(j).transpose() * G;
    } else {
      C.noalias() = inv_n * (Xj.transpose() * R);
      C += d.asDiagonal() * Bj;
    }
    if (C.norm() <= lambda) {
      Bn.setZero(Bj.rows(), Bj.cols());
    } else if (cfg.update == BlockUpdate::exact) {
      Bn = C;
      exact_block_minimizer(d, Bn, lambda);
    } else {
      Bn = Bj - (d.asDiagonal() * Bj - C) / L;
      group_shrink(Bn, lambda / L);
    }
    delta = Bn - Bj;
    const double dn = delta.norm();
    if (dn > 0.0) {
      R.noalias() -= Xj * delta;
      Bj = Bn;
    }
    return dn;
  };
  auto coef_norm = [&] {
    double s2 = 0.0;
    for (const auto& b : B.blocks) s2 += b.squaredNorm();
    return std::sqrt(s2);
  };
  auto kkt_ok = [&] {
    for (std::size_t j = 0; j < J; ++j) {
      const Eigen::MatrixXd G = -inv_n * (prob.rotated_block(j).transpose() * R);
      const double bn = B.blocks[j].norm();
      const double r = bn > 0.0 ? (G + (lambda / bn) * B.blocks[j]).norm() : G.norm() - lambda;
      if (r > cfg.kkt_tol) return false;
    }
    return true;
  };
  auto end_sweep = [&] {
    ++B.info.sweeps;
    if (!R.allFinite()) fail(ErrorKind::numerical, "numerical failure: non-finite residual in solver");
    if (cfg.record_trace) B.info.objective_trace.push_back(objective_from_residual(R, B, lambda, prob.n()));
  };

  if (cfg.record_trace) B.info.objective_trace.push_back(objective_from_residual(R, B, lambda, prob.n()));

  std::vector<std::size_t> active;
  while (B.info.sweeps < cfg.max_sweeps) {
    double max_update = 0.0;
    for (std::size_t j = 0; j < J; ++j) max_update = std::max(max_update, visit(j));
    end_sweep();
    if (max_update <= cfg.tol * (1.0 + coef_norm()) && kkt_ok()) {
      B.info.converged = true;
      break;
    }
    active = B.active_set();
    while (!active.empty() && B.info.sweeps < cfg.max_sweeps) {
      double active_update = 0.0;
      for (std::size_t j : active) active_update = std::max(active_update, visit(j));
      end_sweep();
      if (active_update <= cfg.tol * (1.0 + coef_norm())) break;
    }
  }
  B.info.final_objective = objective_from_residual(R, B, lambda, prob.n());
  if (lambda == 0.0) B.info.non_unique = design_rank_deficient(prob);
  for (std::size_t j = 0; j < J; ++j)
    if (B.blocks[j].norm() > 0.0) B.blocks[j] = prob.gram_vectors(j) * B.blocks[j].eval();
  return B;
}

std::vector<CoefficientBlocks> solve_path(const GroupLassoProblem& prob, const std::vector<double>& lambdas,
                                          const SolverConfig& cfg) {
  require(!lambdas.empty(), ErrorKind::invalid_argument, "lambda grid is empty");
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    require(lambdas[l] > 0.0, ErrorKind::invalid_argument, "lambda grid must be positive");
    if (l > 0)
      require(lambdas[l] < lambdas[l - 1], ErrorKind::invalid_argument, "lambda grid must be strictly descending");
  }
  std::vector<CoefficientBlocks> path;
  path.reserve(lambdas.size());
  std::optional<CoefficientBlocks> warm;
  for (double lam : lambdas) {
    path.push_back(solve(prob, lam, warm, cfg));
    warm = path.back();
  }
  return path;
}

std::vector<double> log_lambda_grid(double top, std::size_t count, double min_ratio) {
  require(count >= 1, ErrorKind::invalid_argument, "lambda grid needs at least one value");
  require(min_ratio > 0.0 && min_ratio < 1.0, ErrorKind::invalid_argument, "lambda min_ratio must lie in (0, 1)");
  require(top > 0.0 && std::isfinite(top), ErrorKind::invalid_argument, "lambda grid top must be positive");
  std::vector<double> grid(count);
  if (count == 1) {
    grid[0] = top;
    return grid;
  }
  const double log_top = std::log(top);
  const double log_bot = std::log(top * min_ratio);
  for (std::size_t l = 0; l < count; ++l)
    grid[l] = std::exp(log_top + (log_bot - log_top) * static_cast<double>(l) / static_cast<double>(count - 1));
  grid[0] = top;
  return grid;
}

}  // namespace afgm
