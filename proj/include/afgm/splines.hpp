#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "afgm/fpca.hpp"

namespace afgm {

/// Clamped B-spline basis with equidistant interior knots.
struct SplineBasis {
  int degree = 3;
  std::size_t interior_knot_count = 0;
  std::vector<double> knots;  // (degree+1)-fold endpoints
  std::size_t k_n = 0;        // interior_knot_count + degree + 1
  double lo = -1.0;
  double hi = 1.0;
};

/// The single identity feature x -> x; turns the block design into a linear one.
struct LinearFeature {};

using FeatureBasis = std::variant<SplineBasis, LinearFeature>;

/// Basis on [-1,1] with k_n = 4 + ceil(sqrt(n_samples)).
SplineBasis make_basis(std::size_t n_samples, int degree = 3);

/// Basis on [lo, hi] with a prescribed number of functions.
SplineBasis make_uniform_basis(double lo, double hi, std::size_t basis_size, int degree);

/// Cox-de Boor evaluation; the last interval is closed on the right.
std::vector<double> eval_basis(const SplineBasis& basis, double x);

/// Same as eval_basis but writes into `out` (size k_n) without allocating.
void eval_basis_into(const SplineBasis& basis, double x, std::span<double> out);

std::size_t basis_size(const FeatureBasis& basis);

struct CenteredDesignBlock {
  std::size_t target_excluded = 0;
  std::size_t source = 0;
  Eigen::MatrixXd matrix;  // n x (k * m); column r*k + b holds feature b of score r
};

struct FullDesign {
  std::size_t target = 0;
  std::vector<CenteredDesignBlock> blocks;  // ascending source, skipping target
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t k_n = 0;
  std::size_t m_n = 0;

  std::size_t column_count() const { return blocks.size() * k_n * m_n; }
};

CenteredDesignBlock build_block(const ScorePanel& scores, const FeatureBasis& basis);

/// Stacks centered blocks for every node except `target`. `panels` is indexed by node.
FullDesign assemble_design(const std::vector<ScorePanel>& panels, std::size_t target,
                           const FeatureBasis& basis);

}  // namespace afgm
