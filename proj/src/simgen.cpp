#include "afgm/simgen.hpp"

#include <cmath>
#include <numbers>

#include "afgm/error.hpp"
#include "afgm/rng.hpp"
#include "afgm/splines.hpp"

namespace afgm {

namespace {
enum Stream : std::uint64_t { kDagStream = 1, kScoreStream = 2, kCurveStream = 3 };
}

double ScenarioConfig::effective_score_noise_sd() const {
  if (score_noise_sd) return *score_noise_sd;
  switch (model) {
    case SimModel::I: return 0.5;
    case SimModel::II: return 1.0;
    case SimModel::III: return 0.5;
  }
  return 0.5;
}

std::string model_name(SimModel m) {
  switch (m) {
    case SimModel::I: return "I";
    case SimModel::II: return "II";
    case SimModel::III: return "III";
  }
  return "?";
}

SimModel parse_model(const std::string& name) {
  if (name == "I" || name == "1") return SimModel::I;
  if (name == "II" || name == "2") return SimModel::II;
  if (name == "III" || name == "3") return SimModel::III;
  fail(ErrorKind::config, "model: expected one of I, II, III but got '" + name + "'");
}

double model_fn(SimModel model, double x) {
  using std::numbers::pi;
  switch (model) {
    case SimModel::I:
      return 1.4 + 3.0 * x - 0.5 + std::sin(2.0 * pi * (x - 0.5)) + 8.0 * (x - 1.0 / 3.0) * (x - 1.0 / 3.0) -
             8.0 / 9.0;
    case SimModel::II:
      return -std::sin(2.0 * x) + x * x - 25.0 / 12.0 + x + std::exp(-x) - 0.4 * std::sinh(2.5);
    case SimModel::III:
      return x;
  }
  return x;
}

double fourier_value(std::size_t q, double t) {
  using std::numbers::pi;
  using std::numbers::sqrt2;
  switch (q) {
    case 1: return 1.0;
    case 2: return sqrt2 * std::sin(2.0 * pi * t);
    case 3: return sqrt2 * std::cos(2.0 * pi * t);
    case 4: return sqrt2 * std::sin(4.0 * pi * t);
    case 5: return sqrt2 * std::cos(4.0 * pi * t);
    default: fail(ErrorKind::invalid_argument, "fourier_value: q must lie in 1..5");
  }
}

namespace {

double root_draw(SimModel model, Philox& rng) {
  switch (model) {
    case SimModel::I: return rng.uniform(-1.0, 1.0);
    case SimModel::II: return rng.uniform(-2.5, 2.5);
    case SimModel::III: return rng.normal();
  }
  return 0.0;
}

// Per-subject sum over parents j and components r of f(xi^j_r), each (j, r)
// column centered to empirical mean zero.
Eigen::VectorXd centered_parent_sum(const std::vector<Eigen::MatrixXd>& scores, const std::vector<std::size_t>& parents,
                                    SimModel model, std::size_t n) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t j : parents) {
    const Eigen::MatrixXd& xi = scores[j - 1];
    for (Eigen::Index r = 0; r < xi.cols(); ++r) {
      Eigen::VectorXd f(xi.rows());
      for (Eigen::Index u = 0; u < xi.rows(); ++u) f(u) = model_fn(model, xi(u, r));
      f.array() -= f.mean();
      sum += f;
    }
  }
  return sum;
}

void validate(const ScenarioConfig& cfg) {
  require(cfg.p >= 2, ErrorKind::config, "p: must be at least 2");
  require(cfg.n >= 2, ErrorKind::config, "n: must be at least 2");
  require(cfg.T >= 2, ErrorKind::config, "T: must be at least 2");
  require(cfg.n_components >= 1 && cfg.n_components <= 5, ErrorKind::config, "n_components: must lie in 1..5");
  require(cfg.dag_density >= 0.0 && cfg.dag_density <= 1.0, ErrorKind::config, "dag_density: must lie in [0, 1]");
  require(cfg.noise_sd_obs >= 0.0, ErrorKind::config, "noise_sd_obs: must be nonnegative");
  require(cfg.effective_score_noise_sd() >= 0.0, ErrorKind::config, "score_noise_sd: must be nonnegative");
  require(cfg.smoothing_order >= 2, ErrorKind::config, "smoothing_order: must be at least 2");
  require(cfg.smoothing_basis_size >= static_cast<std::size_t>(cfg.smoothing_order), ErrorKind::config,
          "smoothing_basis_size: must be at least smoothing_order");
}

}  // namespace

std::vector<Eigen::MatrixXd> generate_scores(const Dag& dag, SimModel model, const ScenarioConfig& cfg,
                                             std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(cfg.n);
  const auto m = static_cast<Eigen::Index>(cfg.n_components);
  const double noise_sd = cfg.effective_score_noise_sd();
  std::vector<Eigen::MatrixXd> scores(dag.p());
  // Index order is a topological order because arcs point upward.
  for (std::size_t i = 1; i <= dag.p(); ++i) {
    Philox rng(derive_seed(seed, {kScoreStream, i}));
    Eigen::MatrixXd& xi = scores[i - 1];
    xi.resize(n, m);
    const auto parents = dag.parents(i);
    if (parents.empty()) {
      for (Eigen::Index r = 0; r < m; ++r)
        for (Eigen::Index u = 0; u < n; ++u) xi(u, r) = root_draw(model, rng);
      continue;
    }
    const Eigen::VectorXd signal = centered_parent_sum(scores, parents, model, cfg.n);
    for (Eigen::Index q = 0; q < m; ++q)
      for (Eigen::Index u = 0; u < n; ++u) xi(u, q) = signal(u) + noise_sd * rng.normal();
    if (cfg.standardize_child_scores) {
      for (Eigen::Index q = 0; q < m; ++q) {
        const double mean = xi.col(q).mean();
        const double sd = std::sqrt((xi.col(q).array() - mean).square().mean());
        if (sd > 0.0) xi.col(q) /= sd;
      }
    }
  }
  return scores;
}

SplineSmoother::SplineSmoother(const TimeGrid& grid, std::size_t basis_size, int order) {
  const SplineBasis basis = make_uniform_basis(0.0, 1.0, basis_size, order - 1);
  const auto T = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd H(T, static_cast<Eigen::Index>(basis_size));
  for (Eigen::Index s = 0; s < T; ++s) {
    const auto h = eval_basis(basis, grid.points()[static_cast<std::size_t>(s)]);
    for (std::size_t k = 0; k < basis_size; ++k) H(s, static_cast<Eigen::Index>(k)) = h[k];
  }
  const Eigen::MatrixXd HtH = H.transpose() * H;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(HtH);
  require(ldlt.info() == Eigen::Success, ErrorKind::numerical, "smoothing basis is singular on the grid");
  projection_ = H * ldlt.solve(H.transpose());
}

void SplineSmoother::apply(std::span<double> curve) const {
  Eigen::Map<Eigen::VectorXd> x(curve.data(), static_cast<Eigen::Index>(curve.size()));
  const Eigen::VectorXd y = projection_ * x;
  x = y;
}

GeneratedData generate_functions(const std::vector<Eigen::MatrixXd>& scores, const Dag& dag, SimModel model,
                                 const ScenarioConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  require(scores.size() == dag.p(), ErrorKind::invalid_argument, "scores do not match the dag");
  const TimeGrid grid = make_equispaced_grid(cfg.T);
  const std::size_t T = cfg.T;
  const std::size_t m = cfg.n_components;

  // Fourier functions on the grid, and their sum for the literal assembly.
  std::vector<std::vector<double>> phi(m, std::vector<double>(T));
  std::vector<double> phi_sum(T, 0.0);
  for (std::size_t q = 0; q < m; ++q)
    for (std::size_t s = 0; s < T; ++s) {
      phi[q][s] = fourier_value(q + 1, grid.points()[s]);
      phi_sum[s] += phi[q][s];
    }

  const SplineSmoother smoother(grid, cfg.smoothing_basis_size, cfg.smoothing_order);
  FunctionalDataset raw(grid, cfg.n, dag.p());
  for (std::size_t i = 1; i <= dag.p(); ++i) {
    Philox rng(derive_seed(seed, {kCurveStream, i}));
    const auto parents = dag.parents(i);
    const bool literal_child = cfg.assembly == Assembly::literal && !parents.empty();
    Eigen::VectorXd signal;
    if (literal_child) signal = centered_parent_sum(scores, parents, model, cfg.n);
    const Eigen::MatrixXd& own = scores[i - 1];
    for (std::size_t u = 0; u < cfg.n; ++u) {
      auto curve = raw.curve(u, i - 1);
      for (std::size_t s = 0; s < T; ++s) {
        double v = 0.0;
        if (literal_child) {
          v = signal(static_cast<Eigen::Index>(u)) * phi_sum[s];
        } else {
          for (std::size_t q = 0; q < m; ++q)
            v += own(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(q)) * phi[q][s];
        }
        curve[s] = v + cfg.noise_sd_obs * rng.normal();
      }
      smoother.apply(curve);
    }
  }
  GeneratedData out;
  out.dataset = center_dataset(raw);
  out.truth = moralize(dag);
  out.dag = dag;
  out.scores = scores;
  return out;
}

GeneratedData generate_scenario(const ScenarioConfig& cfg) {
  validate(cfg);
  const Dag dag = cfg.dag_edge_count ? random_dag_with_count(cfg.p, *cfg.dag_edge_count, derive_seed(cfg.seed, {kDagStream}))
                                     : random_dag(cfg.p, cfg.dag_density, derive_seed(cfg.seed, {kDagStream}));
  auto scores = generate_scores(dag, cfg.model, cfg, cfg.seed);
  return generate_functions(scores, dag, cfg.model, cfg, cfg.seed);
}

}  // namespace afgm
