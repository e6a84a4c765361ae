#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "afgm/fdata.hpp"
#include "afgm/solver.hpp"

namespace afgm {

/// Undirected graph on vertices 1..p; edges stored as canonical (min, max) pairs.
class Graph {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;

  Graph() = default;
  explicit Graph(std::size_t p) : p_(p) {}

  std::size_t p() const { return p_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::set<Edge>& edges() const { return edges_; }

  /// Adds {i, j} (1-based). Self-loops and out-of-range vertices are rejected.
  void add_edge(std::size_t i, std::size_t j);
  bool has_edge(std::size_t i, std::size_t j) const;

  static std::size_t pair_count(std::size_t p) { return p * (p - 1) / 2; }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::size_t p_ = 0;
  std::set<Edge> edges_;
};

/// DAG whose edges point from lower to higher vertex index.
class Dag {
 public:
  using Arc = std::pair<std::size_t, std::size_t>;  // (parent, child), 1-based

  Dag() = default;
  explicit Dag(std::size_t p) : p_(p) {}

  std::size_t p() const { return p_; }
  const std::set<Arc>& arcs() const { return arcs_; }
  void add_arc(std::size_t parent, std::size_t child);
  /// Parents of `child` in ascending order.
  std::vector<std::size_t> parents(std::size_t child) const;

  friend bool operator==(const Dag&, const Dag&) = default;

 private:
  std::size_t p_ = 0;
  std::set<Arc> arcs_;
};

/// round(x) with halves rounded up; tolerant of representation error at .5.
std::size_t round_half_up(double x);

Dag random_dag(std::size_t p, double density, std::uint64_t seed);
/// Same as random_dag with the number of arcs given explicitly.
Dag random_dag_with_count(std::size_t p, std::size_t arc_count, std::uint64_t seed);

Graph moralize(const Dag& dag);

struct LambdaGridSpec {
  std::size_t count = 50;
  double min_ratio = 1e-3;
  std::vector<double> explicit_values;  // overrides count/min_ratio when nonempty
};

/// Which score matrix a node contributes as its own response.
enum class ResponseScores {
  scaled,       // unit-variance FPCA scores
  transformed,  // the same scores after the [-1, 1] range transform used for the design
};

struct AfgmConfig {
  double variance_fraction = 0.9;
  std::optional<std::size_t> m_override;
  int spline_degree = 3;
  std::size_t max_components = kDefaultMaxComponents;
  ResponseScores response = ResponseScores::transformed;
  LambdaGridSpec lambda_grid;
  SolverConfig solver;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  bool keep_coefficients = true;
};

struct NeighborhoodFit {
  std::size_t target = 0;
  std::vector<double> lambdas;
  std::vector<CoefficientBlocks> path;       // empty unless keep_coefficients
  std::vector<std::vector<double>> norms;    // [lambda][node], zero at the target itself
  std::vector<bool> converged;               // per lambda
  std::vector<std::size_t> sweeps;           // per lambda
  std::size_t m_n = 0;
  std::size_t k_n = 0;
};

enum class FeatureKind { spline, linear };

/// FPCA -> range transform -> centered designs -> group-lasso path for every target node.
std::vector<NeighborhoodFit> fit_neighborhoods(const FunctionalDataset& ds, const AfgmConfig& cfg,
                                               FeatureKind kind);

std::vector<NeighborhoodFit> fit_afgm(const FunctionalDataset& ds, const AfgmConfig& cfg);

/// OR rule: {i, j} is an edge when either directed block is nonzero at lambda index `index`.
Graph edges_from_fits(const std::vector<NeighborhoodFit>& fits, std::size_t index);

/// Lambda index whose edge count is closest to round(density * p(p-1)/2); ties go to the sparser end.
std::size_t select_lambda_by_density(const std::vector<NeighborhoodFit>& fits, double target_density);

}  // namespace afgm
