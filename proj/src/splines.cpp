#include "afgm/splines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "afgm/error.hpp"

namespace afgm {

SplineBasis make_uniform_basis(double lo, double hi, std::size_t basis_size, int degree) {
  require(degree >= 1, ErrorKind::invalid_argument, "spline degree must be at least 1");
  require(hi > lo, ErrorKind::invalid_argument, "spline domain must be nonempty");
  require(basis_size >= static_cast<std::size_t>(degree) + 2, ErrorKind::invalid_argument,
          "too few knots: basis size must be at least degree + 2");
  SplineBasis b;
  b.degree = degree;
  b.k_n = basis_size;
  b.interior_knot_count = basis_size - static_cast<std::size_t>(degree) - 1;
  b.lo = lo;
  b.hi = hi;
  const std::size_t segments = b.interior_knot_count + 1;
  b.knots.reserve(basis_size + static_cast<std::size_t>(degree) + 1);
  for (int d = 0; d <= degree; ++d) b.knots.push_back(lo);
  for (std::size_t k = 1; k <= b.interior_knot_count; ++k)
    b.knots.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(segments));
  for (int d = 0; d <= degree; ++d) b.knots.push_back(hi);
  return b;
}

SplineBasis make_basis(std::size_t n_samples, int degree) {
  require(n_samples >= 1, ErrorKind::invalid_argument, "make_basis requires n_samples >= 1");
  const auto root = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_samples))));
  return make_uniform_basis(-1.0, 1.0, 4 + root, degree);
}

void eval_basis_into(const SplineBasis& basis, double x, std::span<double> out) {
  require(x >= basis.lo && x <= basis.hi, ErrorKind::invalid_argument,
          "domain error: spline argument outside the basis interval");
  require(out.size() == basis.k_n, ErrorKind::invalid_argument, "output span must have k_n entries");
  const int p = basis.degree;
  const auto& t = basis.knots;
  // Span index mu with t[mu] <= x < t[mu+1]; x == hi belongs to the last span.
  std::size_t mu;
  if (x >= basis.hi) {
    mu = basis.k_n - 1;
  } else {
    auto it = std::upper_bound(t.begin() + p, t.begin() + static_cast<std::ptrdiff_t>(basis.k_n) + 1, x);
    mu = static_cast<std::size_t>(it - t.begin()) - 1;
  }

  double N[32];
  double left[32];
  double right[32];
  require(p < 31, ErrorKind::invalid_argument, "spline degree too large");
  N[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - t[mu + 1 - static_cast<std::size_t>(j)];
    right[j] = t[mu + static_cast<std::size_t>(j)] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = N[r] / (right[r + 1] + left[j - r]);
      N[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    N[j] = saved;
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (int j = 0; j <= p; ++j) out[mu - static_cast<std::size_t>(p) + static_cast<std::size_t>(j)] = N[j];
}

std::vector<double> eval_basis(const SplineBasis& basis, double x) {
  std::vector<double> out(basis.k_n);
  eval_basis_into(basis, x, out);
  return out;
}

std::size_t basis_size(const FeatureBasis& basis) {
  return std::visit(
      [](const auto& b) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(b)>, SplineBasis>)
          return b.k_n;
        else
          return 1;
      },
      basis);
}

CenteredDesignBlock build_block(const ScorePanel& scores, const FeatureBasis& basis) {
  require(scores.transformed, ErrorKind::precondition,
          "build_block requires transformed scores in [-1, 1]");
  const Eigen::Index n = scores.scores.rows();
  const Eigen::Index m = scores.scores.cols();
  const auto k = static_cast<Eigen::Index>(basis_size(basis));

  CenteredDesignBlock block;
  block.source = scores.node;
  block.matrix.resize(n, k * m);
  if (const auto* spline = std::get_if<SplineBasis>(&basis)) {
    std::vector<double> h(static_cast<std::size_t>(k));
    for (Eigen::Index r = 0; r < m; ++r)
      for (Eigen::Index u = 0; u < n; ++u) {
        eval_basis_into(*spline, scores.scores(u, r), h);
        for (Eigen::Index b = 0; b < k; ++b) block.matrix(u, r * k + b) = h[static_cast<std::size_t>(b)];
      }
  } else {
    block.matrix = scores.scores;
  }
  if (n > 0) {
    Eigen::RowVectorXd mean = block.matrix.colwise().mean();
    block.matrix.rowwise() -= mean;
  }
  return block;
}

FullDesign assemble_design(const std::vector<ScorePanel>& panels, std::size_t target,
                           const FeatureBasis& basis) {
  require(panels.size() >= 2, ErrorKind::invalid_argument, "assemble_design needs at least two nodes");
  require(target < panels.size(), ErrorKind::invalid_argument, "target node out of range");
  FullDesign d;
  d.target = target;
  d.p = panels.size();
  d.n = static_cast<std::size_t>(panels.front().scores.rows());
  d.m_n = static_cast<std::size_t>(panels.front().scores.cols());
  d.k_n = basis_size(basis);
  for (std::size_t j = 0; j < panels.size(); ++j) {
    require(static_cast<std::size_t>(panels[j].scores.rows()) == d.n &&
                static_cast<std::size_t>(panels[j].scores.cols()) == d.m_n,
            ErrorKind::invalid_argument,
            "dimension error: score panel of node " + std::to_string(j + 1) + " has inconsistent n or m_n");
  }
  d.blocks.reserve(panels.size() - 1);
  for (std::size_t j = 0; j < panels.size(); ++j) {
    if (j == target) continue;
    CenteredDesignBlock b = build_block(panels[j], basis);
    b.target_excluded = target;
    b.source = j;
    d.blocks.push_back(std::move(b));
  }
  return d;
}

}  // namespace afgm
