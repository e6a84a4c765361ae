#include <cmath>
#include <optional>

#include "afgm/error.hpp"
#include "afgm/solver.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace afgm;
using afgm::testing::gaussian_matrix;
using afgm::testing::random_design;
using afgm::testing::stacked;

namespace {

// Full-gradient proximal descent on the stacked coefficient matrix with step
// 1/L, L the top eigenvalue of X'X/n. Shares no code with the library solver.
Eigen::MatrixXd reference_solve(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, std::size_t groups,
                                double lambda) {
  const double n = static_cast<double>(X.rows());
  const Eigen::Index w = X.cols() / static_cast<Eigen::Index>(groups);
  const Eigen::MatrixXd G = X.transpose() * X / n;
  const Eigen::MatrixXd XtY = X.transpose() * Y / n;
  const double L = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G).eigenvalues().maxCoeff();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(X.cols(), Y.cols());
  for (int it = 0; it < 2000000; ++it) {
    Eigen::MatrixXd Z = B - (G * B - XtY) / L;
    for (std::size_t j = 0; j < groups; ++j) {
      auto blk = Z.middleRows(static_cast<Eigen::Index>(j) * w, w);
      const double nrm = blk.norm();
      if (nrm <= lambda / L)
        blk.setZero();
      else
        blk *= 1.0 - lambda / (L * nrm);
    }
    const double change = (Z - B).norm();
    B = Z;
    if (change < 1e-15) break;
  }
  return B;
}

double reference_objective(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const Eigen::MatrixXd& B,
                           std::size_t groups, double lambda) {
  const Eigen::Index w = X.cols() / static_cast<Eigen::Index>(groups);
  double pen = 0.0;
  for (std::size_t j = 0; j < groups; ++j) pen += B.middleRows(static_cast<Eigen::Index>(j) * w, w).norm();
  return (Y - X * B).squaredNorm() / (2.0 * static_cast<double>(X.rows())) + lambda * pen;
}

Eigen::MatrixXd stack_coefficients(const CoefficientBlocks& B) {
  Eigen::Index rows = 0;
  for (const auto& b : B.blocks) rows += b.rows();
  Eigen::MatrixXd out(rows, B.blocks.front().cols());
  Eigen::Index at = 0;
  for (const auto& b : B.blocks) {
    out.middleRows(at, b.rows()) = b;
    at += b.rows();
  }
  return out;
}

bool all_bitwise_zero(const CoefficientBlocks& B) {
  for (const auto& b : B.blocks)
    for (Eigen::Index k = 0; k < b.size(); ++k)
      if (b.data()[k] != 0.0 || std::signbit(b.data()[k])) return false;
  return true;
}

}  // namespace

TEST_CASE("objective examples and normal-equation oracle") {
  Philox rng(21);
  auto d = random_design(20, 3, 2, 1, rng);
  const Eigen::MatrixXd Y = gaussian_matrix(20, 1, rng);
  GroupLassoProblem prob(Y, d);
  auto zero = CoefficientBlocks::zeros(prob);
  CHECK(objective(prob, zero, 0.7) == doctest::Approx(Y.squaredNorm() / 40.0).epsilon(1e-15));
  GroupLassoProblem quiet(Eigen::MatrixXd::Zero(20, 1), d);
  CHECK(objective(quiet, zero, 1.0) == 0.0);

  const Eigen::MatrixXd X = stacked(d);
  const Eigen::MatrixXd Bls = (X.transpose() * X).ldlt().solve(X.transpose() * Y);
  const double ls_objective = (Y - X * Bls).squaredNorm() / 40.0;
  auto B = solve(prob, 0.0, std::nullopt, SolverConfig{});
  CHECK(B.info.converged);
  CHECK_FALSE(B.info.non_unique);
  CHECK(std::abs(objective(prob, B, 0.0) - ls_objective) < 1e-10);

  CHECK_THROWS_AS(objective(prob, zero, -1.0), Error);
  CoefficientBlocks bad = zero;
  bad.blocks.pop_back();
  CHECK_THROWS_AS(objective(prob, bad, 0.1), Error);
}

TEST_CASE("lambda_max examples") {
  FullDesign d;
  d.n = 4;
  d.p = 2;
  d.k_n = 2;
  d.m_n = 1;
  CenteredDesignBlock b;
  b.matrix = Eigen::MatrixXd::Zero(4, 2);
  b.matrix(0, 0) = 2.0;
  b.matrix(1, 1) = 2.0;
  d.blocks.push_back(b);
  Eigen::MatrixXd Y(4, 1);
  Y << 1, 2, 3, 4;
  GroupLassoProblem prob(Y, d);
  CHECK(lambda_max(prob) == doctest::Approx(std::sqrt(1.25)).epsilon(1e-15));
  CHECK(lambda_max(GroupLassoProblem(Eigen::MatrixXd::Zero(4, 1), d)) == 0.0);

  Philox rng(4);
  auto rd = random_design(30, 4, 3, 2, rng);
  GroupLassoProblem p2(gaussian_matrix(30, 2, rng), rd);
  const double top = lambda_max(p2);
  auto B = solve(p2, top * (1.0 + 1e-9), std::nullopt, SolverConfig{});
  CHECK(B.active_set().empty());
  CHECK(all_bitwise_zero(B));
  auto below = solve(p2, top * 0.99, std::nullopt, SolverConfig{});
  CHECK_FALSE(below.active_set().empty());
}

TEST_CASE("zero response gives the zero solution") {
  Philox rng(8);
  auto d = random_design(25, 3, 4, 2, rng);
  GroupLassoProblem prob(Eigen::MatrixXd::Zero(25, 2), d);
  for (double lam : {0.0, 0.01, 1.0}) CHECK(all_bitwise_zero(solve(prob, lam, std::nullopt, SolverConfig{})));
}

TEST_CASE("tiny instance matches the full-gradient reference") {
  Philox rng(2024);
  // n = 20, p = 3 nodes (two neighbor blocks), m_n = 1, k_n = 2
  auto d = random_design(20, 2, 2, 1, rng);
  const Eigen::MatrixXd Y = gaussian_matrix(20, 1, rng);
  GroupLassoProblem prob(Y, d);
  const Eigen::MatrixXd X = stacked(d);
  const double top = lambda_max(prob);
  for (double frac : {0.9, 0.7, 0.5, 0.3, 0.1}) {
    const double lam = frac * top;
    const Eigen::MatrixXd Bref = reference_solve(X, Y, 2, lam);
    const double ref = reference_objective(X, Y, Bref, 2, lam);
    auto B = solve(prob, lam, std::nullopt, SolverConfig{});
    CHECK(B.info.converged);
    CHECK(std::abs(objective(prob, B, lam) - ref) < 1e-8);
    CHECK(std::abs(reference_objective(X, Y, stack_coefficients(B), 2, lam) - ref) < 1e-8);
  }
}

TEST_CASE("KKT certificates, exact zeros and monotone descent on random problems") {
  SolverConfig cfg;
  cfg.record_trace = true;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Philox rng(derive_seed(77, {seed}));
    auto d = random_design(50, 4, 6, 2, rng);
    GroupLassoProblem prob(gaussian_matrix(50, 2, rng), d);
    const double top = lambda_max(prob);
    const double lam = top * rng.uniform(0.05, 0.95);
    auto B = solve(prob, lam, std::nullopt, cfg);
    CHECK(B.info.converged);
    CHECK(kkt_residual(prob, B, lam, 1e-5).satisfied);
    for (std::size_t s = 1; s < B.info.objective_trace.size(); ++s)
      CHECK(B.info.objective_trace[s] <= B.info.objective_trace[s - 1] + 1e-12);
    for (std::size_t j = 0; j < B.blocks.size(); ++j)
      if (B.block_norm(j) == 0.0) CHECK(B.blocks[j].cwiseAbs().maxCoeff() == 0.0);
    CHECK(all_bitwise_zero(solve(prob, top, std::nullopt, cfg)));
  }
}

TEST_CASE("proximal block update reaches the same optimum") {
  Philox rng(31);
  auto d = random_design(40, 3, 5, 2, rng);
  GroupLassoProblem prob(gaussian_matrix(40, 2, rng), d);
  const double lam = 0.3 * lambda_max(prob);
  SolverConfig prox;
  prox.update = BlockUpdate::proximal;
  prox.max_sweeps = 100000;
  prox.record_trace = true;
  auto a = solve(prob, lam, std::nullopt, SolverConfig{});
  auto b = solve(prob, lam, std::nullopt, prox);
  CHECK(b.info.converged);
  CHECK(kkt_residual(prob, b, lam).satisfied);
  CHECK(std::abs(objective(prob, a, lam) - objective(prob, b, lam)) < 1e-8);
  for (std::size_t s = 1; s < b.info.objective_trace.size(); ++s)
    CHECK(b.info.objective_trace[s] <= b.info.objective_trace[s - 1] + 1e-12);
}

TEST_CASE("kkt_residual examples") {
  Philox rng(12);
  auto d = random_design(30, 3, 2, 2, rng);
  GroupLassoProblem prob(gaussian_matrix(30, 2, rng), d);
  auto zero = CoefficientBlocks::zeros(prob);
  const double top = lambda_max(prob);
  auto at_top = kkt_residual(prob, zero, top);
  CHECK(at_top.satisfied);
  CHECK(at_top.max_inactive_excess <= 1e-12);
  CHECK_FALSE(kkt_residual(prob, zero, 0.5 * top).satisfied);
}

TEST_CASE("solution scales with the response") {
  Philox rng(13);
  auto d = random_design(40, 3, 3, 2, rng);
  const Eigen::MatrixXd Y = gaussian_matrix(40, 2, rng);
  GroupLassoProblem a(Y, d), b(3.0 * Y, d);
  const double lam = 0.4 * lambda_max(a);
  SolverConfig tight;
  tight.tol = 1e-10;
  tight.kkt_tol = 1e-9;
  auto Ba = solve(a, lam, std::nullopt, tight);
  auto Bb = solve(b, 3.0 * lam, std::nullopt, tight);
  for (std::size_t j = 0; j < Ba.blocks.size(); ++j) CHECK((Bb.blocks[j] - 3.0 * Ba.blocks[j]).norm() < 1e-7);
}

TEST_CASE("regularization path") {
  Philox rng(14);
  auto d = random_design(30, 4, 3, 2, rng);
  GroupLassoProblem prob(gaussian_matrix(30, 2, rng), d);
  const double top = lambda_max(prob);

  auto single = solve_path(prob, {1.1 * top}, SolverConfig{});
  REQUIRE(single.size() == 1);
  CHECK(all_bitwise_zero(single[0]));

  const auto grid = log_lambda_grid(top, 8, 0.05);
  auto path = solve_path(prob, grid, SolverConfig{});
  REQUIRE(path.size() == grid.size());
  for (std::size_t l = 0; l < grid.size(); ++l) {
    auto cold = solve(prob, grid[l], std::nullopt, SolverConfig{});
    CHECK(std::abs(objective(prob, path[l], grid[l]) - objective(prob, cold, grid[l])) < 1e-6);
    CHECK(kkt_residual(prob, path[l], grid[l]).satisfied);
  }

  CHECK_THROWS_AS(solve_path(prob, {0.1, 0.2}, SolverConfig{}), Error);
  CHECK_THROWS_AS(solve_path(prob, {0.2, 0.2}, SolverConfig{}), Error);
  CHECK_THROWS_AS(solve_path(prob, {0.2, 0.0}, SolverConfig{}), Error);
  CHECK_THROWS_AS(solve_path(prob, {}, SolverConfig{}), Error);
}

TEST_CASE("lambda grid endpoints") {
  auto g = log_lambda_grid(2.0, 5, 0.01);
  CHECK(g.front() == 2.0);
  CHECK(g.back() == doctest::Approx(0.02).epsilon(1e-12));
  for (std::size_t l = 1; l < g.size(); ++l) CHECK(g[l] < g[l - 1]);
  CHECK(log_lambda_grid(3.0, 1, 0.5) == std::vector<double>{3.0});
  CHECK_THROWS_AS(log_lambda_grid(0.0, 5, 0.1), Error);
  CHECK_THROWS_AS(log_lambda_grid(1.0, 5, 1.0), Error);
}

TEST_CASE("rank-deficient design at lambda zero is flagged non-unique") {
  Philox rng(15);
  auto d = random_design(10, 3, 4, 1, rng);  // 12 columns, 10 rows
  GroupLassoProblem prob(afgm::testing::center_columns(gaussian_matrix(10, 1, rng)), d);
  SolverConfig cfg;
  cfg.max_sweeps = 20000;
  auto B = solve(prob, 0.0, std::nullopt, cfg);
  CHECK(B.info.non_unique);
  CHECK(objective(prob, B, 0.0) < 1e-6);
}

TEST_CASE("max_sweeps exhaustion is reported, not thrown") {
  Philox rng(16);
  auto d = random_design(30, 5, 3, 2, rng);
  GroupLassoProblem prob(gaussian_matrix(30, 2, rng), d);
  SolverConfig cfg;
  cfg.max_sweeps = 1;
  auto B = solve(prob, 0.05 * lambda_max(prob), std::nullopt, cfg);
  CHECK_FALSE(B.info.converged);
  CHECK(B.info.sweeps == 1);
}

TEST_CASE("problem construction validates its inputs") {
  Philox rng(17);
  auto d = random_design(10, 2, 2, 1, rng);
  CHECK_THROWS_AS(GroupLassoProblem(Eigen::MatrixXd::Zero(9, 1), d), Error);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(10, 1);
  bad(0, 0) = NAN;
  CHECK_THROWS_AS(GroupLassoProblem(bad, d), Error);
}
