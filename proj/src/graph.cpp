#include "afgm/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "afgm/error.hpp"
#include "afgm/fpca.hpp"
#include "afgm/parallel.hpp"
#include "afgm/rng.hpp"
#include "afgm/splines.hpp"

namespace afgm {

void Graph::add_edge(std::size_t i, std::size_t j) {
  require(i != j, ErrorKind::invalid_argument, "graph edges cannot be self-loops");
  require(i >= 1 && j >= 1 && i <= p_ && j <= p_, ErrorKind::invalid_argument, "graph vertex out of range");
  edges_.emplace(std::min(i, j), std::max(i, j));
}

bool Graph::has_edge(std::size_t i, std::size_t j) const {
  return edges_.count({std::min(i, j), std::max(i, j)}) > 0;
}

void Dag::add_arc(std::size_t parent, std::size_t child) {
  require(parent >= 1 && child <= p_ && parent < child, ErrorKind::invalid_argument,
          "dag arcs must point from a lower to a higher vertex index");
  arcs_.emplace(parent, child);
}

std::vector<std::size_t> Dag::parents(std::size_t child) const {
  std::vector<std::size_t> out;
  for (const auto& [a, b] : arcs_)
    if (b == child) out.push_back(a);
  return out;
}

std::size_t round_half_up(double x) {
  require(x >= 0.0 && std::isfinite(x), ErrorKind::invalid_argument, "round_half_up expects a finite x >= 0");
  return static_cast<std::size_t>(std::floor(x + 0.5 + 1e-9));
}

Dag random_dag_with_count(std::size_t p, std::size_t arc_count, std::uint64_t seed) {
  const std::size_t pairs = Graph::pair_count(p);
  require(arc_count <= pairs, ErrorKind::invalid_argument, "more arcs requested than vertex pairs");
  Philox rng(derive_seed(seed, {0xDA6}));
  // Floyd's algorithm: uniform subset of size arc_count from [0, pairs).
  std::set<std::size_t> chosen;
  for (std::size_t j = pairs - arc_count; j < pairs; ++j) {
    const auto t = static_cast<std::size_t>(rng.below(j + 1));
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  Dag dag(p);
  // Pair index enumerates (a, b), a < b, row by row.
  std::size_t a = 1, row_start = 0;
  for (std::size_t idx : chosen) {
    while (idx >= row_start + (p - a)) {
      row_start += p - a;
      ++a;
    }
    dag.add_arc(a, a + 1 + (idx - row_start));
  }
  return dag;
}

Dag random_dag(std::size_t p, double density, std::uint64_t seed) {
  require(density >= 0.0 && density <= 1.0, ErrorKind::invalid_argument, "dag density must lie in [0, 1]");
  return random_dag_with_count(p, round_half_up(density * static_cast<double>(Graph::pair_count(p))), seed);
}

Graph moralize(const Dag& dag) {
  Graph g(dag.p());
  for (const auto& [a, b] : dag.arcs()) g.add_edge(a, b);
  for (std::size_t child = 1; child <= dag.p(); ++child) {
    const auto par = dag.parents(child);
    for (std::size_t x = 0; x < par.size(); ++x)
      for (std::size_t y = x + 1; y < par.size(); ++y) g.add_edge(par[x], par[y]);
  }
  return g;
}

namespace {

struct NodeScores {
  std::vector<ScorePanel> scaled;
  std::vector<ScorePanel> transformed;
};

NodeScores node_scores(const FunctionalDataset& ds, const AfgmConfig& cfg, std::size_t& m_n) {
  const std::size_t p = ds.p();
  const std::size_t m_max = std::min(ds.T(), cfg.max_components);
  std::vector<EigenSystem> systems(p);
  std::vector<std::size_t> chosen(p);
  parallel_for(p, cfg.threads, [&](std::size_t i) {
    systems[i] = eigen_decompose(estimate_covariance(ds, i), ds.grid(), m_max);
    if (!cfg.m_override) chosen[i] = select_truncation(systems[i].eigenvalues, cfg.variance_fraction);
  });
  if (cfg.m_override) {
    m_n = *cfg.m_override;
    require(m_n >= 1 && m_n <= m_max, ErrorKind::config, "m_n override must lie in [1, min(T, max_components)]");
  } else {
    m_n = *std::max_element(chosen.begin(), chosen.end());
  }
  NodeScores out{std::vector<ScorePanel>(p), std::vector<ScorePanel>(p)};
  parallel_for(p, cfg.threads, [&](std::size_t i) {
    systems[i].m_selected = m_n;
    out.scaled[i] = compute_scores(ds, i, systems[i]);
    out.transformed[i] = transform_scores(out.scaled[i]);
  });
  return out;
}

}  // namespace

std::vector<NeighborhoodFit> fit_neighborhoods(const FunctionalDataset& ds, const AfgmConfig& cfg,
                                               FeatureKind kind) {
  require(ds.centered(), ErrorKind::precondition, "fit requires a centered dataset");
  require(ds.n() >= 2 && ds.p() >= 2, ErrorKind::precondition, "fit requires n >= 2 and p >= 2");
  require(cfg.variance_fraction > 0.0 && cfg.variance_fraction < 1.0, ErrorKind::config,
          "variance_fraction must lie in (0, 1)");

  std::size_t m_n = 0;
  const NodeScores scores = node_scores(ds, cfg, m_n);
  const std::vector<ScorePanel>& panels = scores.transformed;
  const std::vector<ScorePanel>& responses =
      cfg.response == ResponseScores::scaled ? scores.scaled : scores.transformed;
  const FeatureBasis basis =
      kind == FeatureKind::spline ? FeatureBasis{make_basis(ds.n(), cfg.spline_degree)} : FeatureBasis{LinearFeature{}};

  const std::size_t p = ds.p();
  // One lambda grid shared by every node, topped by the largest per-node lambda_max.
  std::vector<double> lambdas = cfg.lambda_grid.explicit_values;
  if (lambdas.empty()) {
    std::vector<double> tops(p);
    parallel_for(p, cfg.threads, [&](std::size_t i) {
      tops[i] = lambda_max(GroupLassoProblem(responses[i].scores, assemble_design(panels, i, basis)));
    });
    double top = *std::max_element(tops.begin(), tops.end());
    if (!(top > 0.0)) top = 1.0;
    lambdas = log_lambda_grid(top, cfg.lambda_grid.count, cfg.lambda_grid.min_ratio);
  }

  std::vector<NeighborhoodFit> fits(p);
  parallel_for(p, cfg.threads, [&](std::size_t i) {
    GroupLassoProblem prob(responses[i].scores, assemble_design(panels, i, basis));
    auto path = solve_path(prob, lambdas, cfg.solver);
    NeighborhoodFit& f = fits[i];
    f.target = i;
    f.lambdas = lambdas;
    f.m_n = m_n;
    f.k_n = basis_size(basis);
    for (const auto& B : path) {
      std::vector<double> row(p, 0.0);
      for (std::size_t b = 0; b < prob.group_count(); ++b) row[prob.design().blocks[b].source] = B.block_norm(b);
      f.norms.push_back(std::move(row));
      f.converged.push_back(B.info.converged);
      f.sweeps.push_back(B.info.sweeps);
    }
    if (cfg.keep_coefficients) f.path = std::move(path);
  });
  return fits;
}

std::vector<NeighborhoodFit> fit_afgm(const FunctionalDataset& ds, const AfgmConfig& cfg) {
  return fit_neighborhoods(ds, cfg, FeatureKind::spline);
}

Graph edges_from_fits(const std::vector<NeighborhoodFit>& fits, std::size_t index) {
  const std::size_t p = fits.size();
  Graph g(p);
  for (const auto& f : fits) {
    require(index < f.norms.size(), ErrorKind::invalid_argument, "lambda index out of range");
    require(f.norms[index].size() == p, ErrorKind::invalid_argument, "fit norms do not match the node count");
    for (std::size_t j = 0; j < p; ++j)
      if (j != f.target && f.norms[index][j] > 0.0) g.add_edge(f.target + 1, j + 1);
  }
  return g;
}

std::size_t select_lambda_by_density(const std::vector<NeighborhoodFit>& fits, double target_density) {
  require(target_density > 0.0 && target_density < 1.0, ErrorKind::invalid_argument,
          "target density must lie in (0, 1)");
  require(!fits.empty() && !fits.front().norms.empty(), ErrorKind::invalid_argument, "no fits to select from");
  const std::size_t p = fits.size();
  const auto target = static_cast<long long>(round_half_up(target_density * static_cast<double>(Graph::pair_count(p))));
  std::size_t best = 0;
  long long best_gap = -1;
  for (std::size_t l = 0; l < fits.front().norms.size(); ++l) {
    const long long gap = std::llabs(static_cast<long long>(edges_from_fits(fits, l).edge_count()) - target);
    if (best_gap < 0 || gap < best_gap) {
      best = l;
      best_gap = gap;
    }
  }
  return best;
}

}  // namespace afgm
