#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "afgm/graph.hpp"
#include "afgm/simgen.hpp"

namespace afgm {

struct Rates {
  double tp = 0.0;
  double fp = 0.0;
};

/// True- and false-positive rates over unordered vertex pairs.
Rates tp_fp(const Graph& estimated, const Graph& truth);

struct RocCurve {
  std::vector<double> lambdas;
  std::vector<Rates> points;  // one per lambda; (0,0) and (1,1) are implied
};

RocCurve roc_from_path(const std::vector<Graph>& graphs, const std::vector<double>& lambdas, const Graph& truth);

/// Trapezoid area under the anchored curve, points sorted by FP keeping the max TP per FP.
double auc(const RocCurve& curve);

/// The same pipeline with each score entering linearly (one centered feature per score).
std::vector<NeighborhoodFit> fit_linear_baseline(const FunctionalDataset& ds, const AfgmConfig& cfg);

enum class Method { afgm, linear };
std::string method_name(Method m);
Method parse_method(const std::string& name);

struct MethodSummary {
  Method method = Method::afgm;
  double mean_auc = 0.0;
  double se_auc = 0.0;
  std::vector<double> aucs;          // per replicate
  std::vector<RocCurve> curves;      // per replicate
};

struct BenchmarkReport {
  SimModel model = SimModel::I;
  std::size_t replicates = 0;
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> seeds;  // scenario seed of each replicate
  std::vector<MethodSummary> methods;
};

struct BenchmarkOptions {
  std::vector<Method> methods{Method::afgm, Method::linear};
  std::size_t replicates = 20;
  std::size_t lambda_count = 30;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  bool identical_replicates = false;  // reuse one scenario seed for every replicate
  AfgmConfig fit;                     // lambda count and threads are overridden
};

/// Replicates run in parallel; each generates a scenario, fits every method
/// along its lambda path and scores the ROC curve against the moralized truth.
BenchmarkReport run_benchmark(const ScenarioConfig& scenario, const BenchmarkOptions& opts);

}  // namespace afgm
