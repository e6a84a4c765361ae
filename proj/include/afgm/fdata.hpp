#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace afgm {

/// Observation grid on [0,1] with trapezoid quadrature weights.
class TimeGrid {
 public:
  TimeGrid() = default;

  std::size_t size() const { return points_.size(); }
  const std::vector<double>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }

  friend TimeGrid make_trapezoid_grid(std::vector<double> points);

 private:
  std::vector<double> points_;
  std::vector<double> weights_;
};

/// Trapezoid weights for >= 2 strictly increasing points in [0,1].
TimeGrid make_trapezoid_grid(std::vector<double> points);

/// T equispaced points 0 = t_1 < ... < t_T = 1.
TimeGrid make_equispaced_grid(std::size_t T);

/// Quadrature of f*g on the grid, summed in ascending index order.
double inner_product(std::span<const double> f, std::span<const double> g, const TimeGrid& grid);

/// n subjects x p nodes x T time points of curve values, stored subject-major.
class FunctionalDataset {
 public:
  FunctionalDataset() = default;
  FunctionalDataset(TimeGrid grid, std::size_t n, std::size_t p, std::vector<double> values,
                    bool centered = false);
  FunctionalDataset(TimeGrid grid, std::size_t n, std::size_t p);

  std::size_t n() const { return n_; }
  std::size_t p() const { return p_; }
  std::size_t T() const { return grid_.size(); }
  const TimeGrid& grid() const { return grid_; }
  bool centered() const { return centered_; }
  const std::vector<double>& values() const { return values_; }

  std::span<const double> curve(std::size_t subject, std::size_t node) const {
    return {values_.data() + offset(subject, node), T()};
  }
  std::span<double> curve(std::size_t subject, std::size_t node) {
    return {values_.data() + offset(subject, node), T()};
  }
  double at(std::size_t subject, std::size_t node, std::size_t s) const {
    return values_[offset(subject, node) + s];
  }

  friend FunctionalDataset center_dataset(const FunctionalDataset& ds);

 private:
  std::size_t offset(std::size_t subject, std::size_t node) const {
    return (subject * p_ + node) * T();
  }

  TimeGrid grid_;
  std::size_t n_ = 0;
  std::size_t p_ = 0;
  std::vector<double> values_;
  bool centered_ = false;
};

/// Subtracts the cross-subject mean at every (node, time) entry.
FunctionalDataset center_dataset(const FunctionalDataset& ds);

}  // namespace afgm
