#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "afgm/splines.hpp"

namespace afgm {

/// Multiresponse block group-lasso problem
///   (2n)^-1 ||Y - sum_j X_j B_j||_F^2 + lambda sum_j ||B_j||_F.
///
/// Construction precomputes the per-block Gram matrices X_j'X_j / n and their
/// largest eigenvalues, which serve as block Lipschitz constants.
class GroupLassoProblem {
 public:
  GroupLassoProblem(Eigen::MatrixXd response, FullDesign design);

  const Eigen::MatrixXd& response() const { return response_; }
  const FullDesign& design() const { return design_; }
  std::size_t n() const { return design_.n; }
  std::size_t m() const { return static_cast<std::size_t>(response_.cols()); }
  std::size_t group_count() const { return design_.blocks.size(); }
  std::size_t block_width() const { return design_.k_n * design_.m_n; }

  const Eigen::MatrixXd& block(std::size_t j) const { return design_.blocks[j].matrix; }
  const Eigen::MatrixXd& gram(std::size_t j) const { return gram_[j]; }
  double lipschitz(std::size_t j) const { return lipschitz_[j]; }
  /// Eigenvectors (columns) and eigenvalues of gram(j), eigenvalues ascending.
  const Eigen::MatrixXd& gram_vectors(std::size_t j) const { return gram_vectors_[j]; }
  const Eigen::VectorXd& gram_values(std::size_t j) const { return gram_values_[j]; }
  /// block(j) * gram_vectors(j): the block in coordinates where its Gram matrix is diagonal.
  const Eigen::MatrixXd& rotated_block(std::size_t j) const { return rotated_[j]; }

 private:
  Eigen::MatrixXd response_;
  FullDesign design_;
  std::vector<Eigen::MatrixXd> gram_;
  std::vector<Eigen::MatrixXd> gram_vectors_;
  std::vector<Eigen::VectorXd> gram_values_;
  std::vector<Eigen::MatrixXd> rotated_;
  std::vector<double> lipschitz_;
};

struct SolveInfo {
  std::size_t sweeps = 0;
  bool converged = false;  // false means max_sweeps was exhausted
  bool non_unique = false; // lambda == 0 on a rank-deficient design
  double final_objective = 0.0;
  std::vector<double> objective_trace;  // filled only when SolverConfig::record_trace
};

struct CoefficientBlocks {
  std::vector<Eigen::MatrixXd> blocks;  // one (k*m) x m matrix per group
  SolveInfo info;

  static CoefficientBlocks zeros(const GroupLassoProblem& prob);

  std::vector<std::size_t> active_set() const;
  double block_norm(std::size_t j) const { return blocks[j].norm(); }
};

enum class BlockUpdate {
  exact,     // minimize the block subproblem exactly (eigenbasis of the block Gram + Newton on ||B||)
  proximal,  // one proximal-gradient step with step size 1/L_j
};

struct SolverConfig {
  double tol = 1e-6;
  std::size_t max_sweeps = 1000;
  double kkt_tol = 1e-5;
  BlockUpdate update = BlockUpdate::exact;
  bool record_trace = false;
};

struct KktReport {
  double max_active_residual = 0.0;
  double max_inactive_excess = 0.0;
  bool satisfied = false;
};

double objective(const GroupLassoProblem& prob, const CoefficientBlocks& B, double lambda);

/// Smallest lambda at which the all-zero solution is optimal.
double lambda_max(const GroupLassoProblem& prob);

/// Cyclic block coordinate descent over ascending blocks. Each visit either
/// screens the block to exact zero or decreases the block subproblem (exactly
/// or by one proximal step), so the objective never increases. After a full
/// sweep, sweeps restricted to the active blocks run until they settle; the
/// solve ends when a full sweep moves nothing beyond tol and the KKT
/// conditions hold at kkt_tol.
CoefficientBlocks solve(const GroupLassoProblem& prob, double lambda,
                        const std::optional<CoefficientBlocks>& warm, const SolverConfig& cfg);

/// Warm-started solutions along a strictly descending lambda grid.
std::vector<CoefficientBlocks> solve_path(const GroupLassoProblem& prob, const std::vector<double>& lambdas,
                                          const SolverConfig& cfg);

KktReport kkt_residual(const GroupLassoProblem& prob, const CoefficientBlocks& B, double lambda,
                       double kkt_tol = SolverConfig{}.kkt_tol);

/// `count` log-spaced values from `top` down to `top * min_ratio`.
std::vector<double> log_lambda_grid(double top, std::size_t count, double min_ratio);

}  // namespace afgm
