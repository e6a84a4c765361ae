#include "afgm/evalrep.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "afgm/error.hpp"
#include "afgm/parallel.hpp"
#include "afgm/rng.hpp"

namespace afgm {

Rates tp_fp(const Graph& estimated, const Graph& truth) {
  require(estimated.p() == truth.p(), ErrorKind::invalid_argument, "tp_fp: graphs have different vertex counts");
  const std::size_t pairs = Graph::pair_count(truth.p());
  const std::size_t positives = truth.edge_count();
  require(positives >= 1 && positives < pairs, ErrorKind::degenerate,
          "tp_fp: truth graph must have at least one edge and one non-edge");
  std::size_t hit = 0, false_hit = 0;
  for (const auto& [i, j] : estimated.edges()) {
    if (truth.has_edge(i, j))
      ++hit;
    else
      ++false_hit;
  }
  return {static_cast<double>(hit) / static_cast<double>(positives),
          static_cast<double>(false_hit) / static_cast<double>(pairs - positives)};
}

RocCurve roc_from_path(const std::vector<Graph>& graphs, const std::vector<double>& lambdas, const Graph& truth) {
  require(!graphs.empty(), ErrorKind::invalid_argument, "roc_from_path: empty path");
  require(lambdas.size() == graphs.size(), ErrorKind::invalid_argument, "roc_from_path: one lambda per graph");
  RocCurve c;
  c.lambdas = lambdas;
  c.points.reserve(graphs.size());
  for (const auto& g : graphs) c.points.push_back(tp_fp(g, truth));
  return c;
}

double auc(const RocCurve& curve) {
  std::map<double, double> best;  // fp -> max tp
  auto add = [&](double fp, double tp) {
    auto [it, inserted] = best.emplace(fp, tp);
    if (!inserted) it->second = std::max(it->second, tp);
  };
  add(0.0, 0.0);
  add(1.0, 1.0);
  for (const auto& pt : curve.points) add(pt.fp, pt.tp);
  double area = 0.0;
  for (auto it = best.begin(), nx = std::next(best.begin()); nx != best.end(); ++it, ++nx)
    area += (nx->first - it->first) * 0.5 * (nx->second + it->second);
  return std::clamp(area, 0.0, 1.0);
}

std::vector<NeighborhoodFit> fit_linear_baseline(const FunctionalDataset& ds, const AfgmConfig& cfg) {
  return fit_neighborhoods(ds, cfg, FeatureKind::linear);
}

std::string method_name(Method m) { return m == Method::afgm ? "afgm" : "linear"; }

Method parse_method(const std::string& name) {
  if (name == "afgm") return Method::afgm;
  if (name == "linear") return Method::linear;
  fail(ErrorKind::config, "methods: unknown method '" + name + "' (expected afgm or linear)");
}

BenchmarkReport run_benchmark(const ScenarioConfig& scenario, const BenchmarkOptions& opts) {
  require(opts.replicates >= 2, ErrorKind::config, "replicates: must be at least 2");
  require(opts.lambda_count >= 1, ErrorKind::config, "lambdas: must be at least 1");
  require(!opts.methods.empty(), ErrorKind::config, "methods: at least one method is required");

  BenchmarkReport rep;
  rep.model = scenario.model;
  rep.replicates = opts.replicates;
  rep.master_seed = opts.seed;
  for (std::size_t r = 0; r < opts.replicates; ++r)
    rep.seeds.push_back(derive_seed(opts.seed, {opts.identical_replicates ? 0 : r}));

  AfgmConfig fit = opts.fit;
  fit.lambda_grid.count = opts.lambda_count;
  fit.lambda_grid.explicit_values.clear();
  fit.threads = 1;
  fit.keep_coefficients = false;

  const std::size_t M = opts.methods.size();
  std::vector<std::vector<RocCurve>> curves(M, std::vector<RocCurve>(opts.replicates));
  parallel_for(opts.replicates, opts.threads, [&](std::size_t r) {
    ScenarioConfig sc = scenario;
    sc.seed = rep.seeds[r];
    const GeneratedData data = generate_scenario(sc);
    for (std::size_t k = 0; k < M; ++k) {
      const auto fits = opts.methods[k] == Method::afgm ? fit_afgm(data.dataset, fit)
                                                         : fit_linear_baseline(data.dataset, fit);
      std::vector<Graph> graphs;
      for (std::size_t l = 0; l < fits.front().lambdas.size(); ++l) graphs.push_back(edges_from_fits(fits, l));
      curves[k][r] = roc_from_path(graphs, fits.front().lambdas, data.truth);
    }
  });

  for (std::size_t k = 0; k < M; ++k) {
    MethodSummary s;
    s.method = opts.methods[k];
    s.curves = std::move(curves[k]);
    for (const auto& c : s.curves) s.aucs.push_back(auc(c));
    double sum = 0.0;
    for (double a : s.aucs) sum += a;
    const double R = static_cast<double>(s.aucs.size());
    s.mean_auc = sum / R;
    double ss = 0.0;
    for (double a : s.aucs) ss += (a - s.mean_auc) * (a - s.mean_auc);
    s.se_auc = std::sqrt(ss / (R - 1.0)) / std::sqrt(R);
    rep.methods.push_back(std::move(s));
  }
  return rep;
}

}  // namespace afgm
