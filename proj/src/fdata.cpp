#include "afgm/fdata.hpp"

#include <cmath>
#include <string>

#include "afgm/error.hpp"

namespace afgm {

TimeGrid make_trapezoid_grid(std::vector<double> points) {
  const std::size_t T = points.size();
  require(T >= 2, ErrorKind::invalid_argument, "invalid grid: need at least 2 points");
  for (std::size_t s = 0; s < T; ++s) {
    require(std::isfinite(points[s]) && points[s] >= 0.0 && points[s] <= 1.0,
            ErrorKind::invalid_argument,
            "invalid grid: point " + std::to_string(s) + " outside [0,1]");
    if (s > 0)
      require(points[s] > points[s - 1], ErrorKind::invalid_argument,
              "invalid grid: points not strictly increasing at index " + std::to_string(s));
  }
  std::vector<double> w(T);
  w.front() = 0.5 * (points[1] - points[0]);
  w.back() = 0.5 * (points[T - 1] - points[T - 2]);
  for (std::size_t s = 1; s + 1 < T; ++s) w[s] = 0.5 * (points[s + 1] - points[s - 1]);

  TimeGrid grid;
  grid.points_ = std::move(points);
  grid.weights_ = std::move(w);
  return grid;
}

TimeGrid make_equispaced_grid(std::size_t T) {
  require(T >= 2, ErrorKind::invalid_argument, "invalid grid: need at least 2 points");
  std::vector<double> pts(T);
  for (std::size_t s = 0; s < T; ++s) pts[s] = static_cast<double>(s) / static_cast<double>(T - 1);
  return make_trapezoid_grid(std::move(pts));
}

double inner_product(std::span<const double> f, std::span<const double> g, const TimeGrid& grid) {
  require(f.size() == grid.size() && g.size() == grid.size(), ErrorKind::invalid_argument,
          "dimension mismatch: inner_product operands must match the grid length");
  const auto& w = grid.weights();
  double acc = 0.0;
  for (std::size_t s = 0; s < w.size(); ++s) acc += w[s] * (f[s] * g[s]);
  return acc;
}

FunctionalDataset::FunctionalDataset(TimeGrid grid, std::size_t n, std::size_t p,
                                     std::vector<double> values, bool centered)
    : grid_(std::move(grid)), n_(n), p_(p), values_(std::move(values)), centered_(centered) {
  require(values_.size() == n_ * p_ * grid_.size(), ErrorKind::invalid_argument,
          "dimension mismatch: dataset values must have n*p*T entries");
  for (double v : values_)
    require(std::isfinite(v), ErrorKind::invalid_argument, "dataset contains non-finite values");
}

FunctionalDataset::FunctionalDataset(TimeGrid grid, std::size_t n, std::size_t p)
    : grid_(std::move(grid)), n_(n), p_(p), values_(n * p * grid_.size(), 0.0) {}

FunctionalDataset center_dataset(const FunctionalDataset& ds) {
  FunctionalDataset out = ds;
  const std::size_t T = ds.T();
  std::vector<double> mean(T);
  for (std::size_t i = 0; i < ds.p(); ++i) {
    std::fill(mean.begin(), mean.end(), 0.0);
    for (std::size_t u = 0; u < ds.n(); ++u) {
      auto c = ds.curve(u, i);
      for (std::size_t s = 0; s < T; ++s) mean[s] += c[s];
    }
    for (double& m : mean) m /= static_cast<double>(ds.n());
    for (std::size_t u = 0; u < ds.n(); ++u) {
      auto c = out.curve(u, i);
      for (std::size_t s = 0; s < T; ++s) c[s] -= mean[s];
    }
  }
  out.centered_ = true;
  return out;
}

}  // namespace afgm
