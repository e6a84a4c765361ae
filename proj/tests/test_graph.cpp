#include <algorithm>
#include <cmath>

#include "afgm/error.hpp"
#include "afgm/graph.hpp"
#include "afgm/simgen.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace afgm;

namespace {

// Fits whose lambda index l switches on the first counts[l] node pairs (in lexicographic order)
// through the i -> j direction only.
std::vector<NeighborhoodFit> staged_fits(std::size_t p, const std::vector<std::size_t>& counts) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) pairs.emplace_back(i, j);
  std::vector<NeighborhoodFit> fits(p);
  for (std::size_t i = 0; i < p; ++i) {
    fits[i].target = i;
    fits[i].norms.assign(counts.size(), std::vector<double>(p, 0.0));
    for (std::size_t l = 0; l < counts.size(); ++l) fits[i].lambdas.push_back(1.0 / static_cast<double>(l + 1));
  }
  for (std::size_t l = 0; l < counts.size(); ++l)
    for (std::size_t e = 0; e < counts[l]; ++e) fits[pairs[e].first].norms[l][pairs[e].second] = 1.0;
  return fits;
}

FunctionalDataset small_dataset(std::size_t p, std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.p = p;
  cfg.n = 100;
  cfg.T = 30;
  cfg.dag_edge_count = 1;
  cfg.seed = seed;
  return generate_scenario(cfg).dataset;
}

}  // namespace

TEST_CASE("graph edges are canonical") {
  Graph g(4);
  g.add_edge(3, 1);
  CHECK(g.has_edge(1, 3));
  CHECK(g.has_edge(3, 1));
  CHECK(g.edges().begin()->first == 1);
  g.add_edge(1, 3);
  CHECK(g.edge_count() == 1);
  CHECK_THROWS_AS(g.add_edge(2, 2), Error);
  CHECK_THROWS_AS(g.add_edge(0, 2), Error);
  CHECK_THROWS_AS(g.add_edge(1, 5), Error);
  CHECK(Graph::pair_count(64) == 2016);
}

TEST_CASE("moralization examples") {
  Dag v(3);
  v.add_arc(1, 3);
  v.add_arc(2, 3);
  Graph expect(3);
  expect.add_edge(1, 3);
  expect.add_edge(2, 3);
  expect.add_edge(1, 2);
  CHECK(moralize(v) == expect);

  Dag chain(3);
  chain.add_arc(1, 2);
  chain.add_arc(2, 3);
  Graph c(3);
  c.add_edge(1, 2);
  c.add_edge(2, 3);
  CHECK(moralize(chain) == c);

  CHECK(moralize(Dag(5)).edge_count() == 0);
  Dag wrong(3);
  CHECK_THROWS_AS(wrong.add_arc(3, 1), Error);
}

TEST_CASE("random DAG sizes and determinism") {
  CHECK(random_dag(10, 0.0, 1).arcs().empty());
  auto d = random_dag(100, 0.01, 42);
  CHECK(d.arcs().size() == 50);
  for (const auto& [a, b] : d.arcs()) CHECK(a < b);
  CHECK(random_dag(100, 0.01, 42) == d);
  CHECK_FALSE(random_dag(100, 0.01, 43) == d);
  CHECK(random_dag(5, 1.0, 3).arcs().size() == 10);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto g = random_dag(30, 0.1, seed);
    auto m = moralize(g);
    for (const auto& [a, b] : g.arcs()) CHECK(m.has_edge(a, b));
  }
}

TEST_CASE("half-up rounding") {
  CHECK(round_half_up(49.5) == 50);
  CHECK(round_half_up(100.8) == 101);
  CHECK(round_half_up(0.05 * 2016) == 101);
  CHECK(round_half_up(0.01 * 4950) == 50);
  CHECK(round_half_up(2.4999) == 2);
}

TEST_CASE("OR rule") {
  auto fits = staged_fits(3, {0, 1});
  CHECK(edges_from_fits(fits, 0).edge_count() == 0);
  auto g = edges_from_fits(fits, 1);
  CHECK(g.has_edge(1, 2));
  CHECK(fits[1].norms[1][0] == 0.0);

  // Symmetric fits read the same either way.
  fits[1].norms[1][0] = 1.0;
  CHECK(edges_from_fits(fits, 1) == g);
  CHECK_THROWS_AS(edges_from_fits(fits, 2), Error);
}

TEST_CASE("edges_from_fits commutes with relabeling") {
  auto fits = staged_fits(4, {0, 2, 4});
  const std::vector<std::size_t> perm{2, 0, 3, 1};
  std::vector<NeighborhoodFit> relabeled(4);
  for (std::size_t i = 0; i < 4; ++i) {
    auto f = fits[i];
    f.target = perm[i];
    for (auto& row : f.norms) {
      std::vector<double> moved(4);
      for (std::size_t j = 0; j < 4; ++j) moved[perm[j]] = row[j];
      row = moved;
    }
    relabeled[perm[i]] = f;
  }
  for (std::size_t l = 0; l < 3; ++l) {
    Graph expect(4);
    const Graph g = edges_from_fits(fits, l);
    for (const auto& [a, b] : g.edges()) expect.add_edge(perm[a - 1] + 1, perm[b - 1] + 1);
    CHECK(edges_from_fits(relabeled, l) == expect);
  }
}

TEST_CASE("density selection") {
  // p = 64, density 0.05: target 101 edges; counts 99 and 103 tie and the larger lambda wins.
  auto fits = staged_fits(64, {0, 50, 99, 103, 150});
  CHECK(select_lambda_by_density(fits, 0.05) == 2);
  CHECK(edges_from_fits(fits, 3).edge_count() == 103);

  auto empty = staged_fits(10, {0, 0, 0});
  CHECK(select_lambda_by_density(empty, 0.2) == 0);

  auto half = staged_fits(10, {0, 10, 20, 23, 30, 45});
  CHECK(select_lambda_by_density(half, 0.5) == 3);  // target round(22.5) = 23

  CHECK_THROWS_AS(select_lambda_by_density(half, 0.0), Error);
  CHECK_THROWS_AS(select_lambda_by_density(half, 1.0), Error);
}

TEST_CASE("pipeline dimensions, determinism and screening at the top of the path") {
  auto ds = small_dataset(3, 5);
  AfgmConfig cfg;
  cfg.m_override = 5;
  cfg.lambda_grid.count = 4;
  cfg.lambda_grid.min_ratio = 0.2;
  cfg.threads = 2;
  auto fits = fit_afgm(ds, cfg);
  REQUIRE(fits.size() == 3);
  CHECK(fits[0].k_n == 14);
  CHECK(fits[0].m_n == 5);
  REQUIRE(fits[0].path.size() == 4);
  CHECK(fits[0].path[0].blocks.size() == 2);
  CHECK(fits[0].path[0].blocks[0].rows() == 70);  // (p-1) * 14 * 5 design columns in total
  CHECK(fits[0].path[0].blocks[0].cols() == 5);
  CHECK(edges_from_fits(fits, 0).edge_count() == 0);
  for (const auto& f : fits) {
    CHECK(f.lambdas == fits[0].lambdas);
    for (std::size_t l = 0; l < f.norms.size(); ++l) {
      CHECK(f.norms[l][f.target] == 0.0);
      for (std::size_t j = 0, b = 0; j < 3; ++j) {
        if (j == f.target) continue;
        CHECK(std::abs(f.norms[l][j] - f.path[l].block_norm(b)) <= 1e-12);
        ++b;
      }
    }
  }

  cfg.threads = 1;
  auto again = fit_afgm(ds, cfg);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(again[i].norms == fits[i].norms);
    CHECK(again[i].lambdas == fits[i].lambdas);
  }

  AfgmConfig raw = cfg;
  CHECK_THROWS_AS(fit_afgm(FunctionalDataset(ds.grid(), 100, 3, ds.values(), false), raw), Error);
}

TEST_CASE("independent noise nodes stay disconnected near the top of the path") {
  Philox rng(99);
  const auto grid = make_equispaced_grid(20);
  std::vector<double> v(100 * 2 * 20);
  for (double& x : v) x = rng.normal();
  auto ds = center_dataset(FunctionalDataset(grid, 100, 2, v));
  AfgmConfig cfg;
  cfg.m_override = 2;
  cfg.lambda_grid.explicit_values = {10.0, 1.0};
  auto fits = fit_afgm(ds, cfg);
  CHECK(edges_from_fits(fits, 0).edge_count() == 0);
  CHECK(fits[0].converged[0]);
}
