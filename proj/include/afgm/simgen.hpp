#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "afgm/fdata.hpp"
#include "afgm/graph.hpp"

namespace afgm {

enum class SimModel { I, II, III };

/// How a node's curves are assembled from scores.
enum class Assembly {
  literal,         // children: parents' f-sums on every Fourier function; roots: own scores
  karhunen_loeve,  // every node: its own structural-equation scores on the Fourier basis
};

struct ScenarioConfig {
  SimModel model = SimModel::I;
  std::size_t p = 100;
  std::size_t n = 100;
  std::size_t T = 100;
  double dag_density = 0.01;
  std::optional<std::size_t> dag_edge_count;  // overrides dag_density
  double noise_sd_obs = 0.5;
  std::optional<double> score_noise_sd;       // model default when unset
  std::size_t n_components = 5;
  std::size_t smoothing_basis_size = 10;
  int smoothing_order = 4;
  bool standardize_child_scores = true;
  Assembly assembly = Assembly::literal;
  std::uint64_t seed = 0;

  double effective_score_noise_sd() const;
};

struct GeneratedData {
  FunctionalDataset dataset;
  Graph truth;
  Dag dag;
  std::vector<Eigen::MatrixXd> scores;  // per node, n x n_components
};

std::string model_name(SimModel m);
SimModel parse_model(const std::string& name);

/// The additive link function of each simulation model.
double model_fn(SimModel model, double x);

/// Orthonormal Fourier functions on [0,1], q = 1..5.
double fourier_value(std::size_t q, double t);

std::vector<Eigen::MatrixXd> generate_scores(const Dag& dag, SimModel model, const ScenarioConfig& cfg,
                                             std::uint64_t seed);

GeneratedData generate_functions(const std::vector<Eigen::MatrixXd>& scores, const Dag& dag, SimModel model,
                                 const ScenarioConfig& cfg, std::uint64_t seed);

/// random_dag -> generate_scores -> generate_functions, keyed by cfg.seed.
GeneratedData generate_scenario(const ScenarioConfig& cfg);

/// Least-squares projection of a grid function onto a clamped B-spline basis on [0,1].
class SplineSmoother {
 public:
  SplineSmoother(const TimeGrid& grid, std::size_t basis_size, int order);
  void apply(std::span<double> curve) const;

 private:
  Eigen::MatrixXd projection_;
};

}  // namespace afgm
