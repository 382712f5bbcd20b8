#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <utility>

#include "funreg/errors.hpp"

namespace funreg {

// Trapezoid quadrature weights for a strictly increasing set of points.
Eigen::VectorXd trapezoid_weights(const Eigen::VectorXd& points);

// A shared 1-D observation grid on [0, 1] with positive quadrature weights.
// Immutable after construction; copies share storage, so functions sampled
// on the same grid compare grids by identity first and by value second.
class Grid {
 public:
  // Placeholder two-point grid; real grids come from the other constructors.
  Grid() : Grid(placeholder_points()) {}

  explicit Grid(Eigen::VectorXd points)
      : Grid(std::move(points), Eigen::VectorXd()) {}

  Grid(Eigen::VectorXd points, Eigen::VectorXd weights);

  // n equally spaced points spanning [0, 1].
  static Grid uniform(Eigen::Index n);

  const Eigen::VectorXd& points() const noexcept { return data_->points; }
  const Eigen::VectorXd& weights() const noexcept { return data_->weights; }
  Eigen::Index size() const noexcept { return data_->points.size(); }
  double length() const noexcept {
    return data_->points(data_->points.size() - 1) - data_->points(0);
  }

  bool same_as(const Grid& other) const noexcept {
    if (data_ == other.data_) return true;
    return data_->points.size() == other.data_->points.size() &&
           data_->points == other.data_->points;
  }

 private:
  static Eigen::VectorXd placeholder_points() {
    return Eigen::VectorXd::LinSpaced(2, 0.0, 1.0);
  }

  struct Data {
    Eigen::VectorXd points;
    Eigen::VectorXd weights;
  };
  std::shared_ptr<const Data> data_;
};

// A real-valued function sampled on a grid.
class FunctionOnGrid {
 public:
  FunctionOnGrid() : grid_(), values_(Eigen::VectorXd::Zero(2)) {}

  FunctionOnGrid(Grid grid, Eigen::VectorXd values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size())
      throw InvalidGridError("function has " + std::to_string(values_.size()) +
                             " values on a grid of size " +
                             std::to_string(grid_.size()));
  }

  const Grid& grid() const noexcept { return grid_; }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  double operator()(Eigen::Index j) const { return values_(j); }

 private:
  Grid grid_;
  Eigen::VectorXd values_;
};

namespace detail {
inline void require_same_grid(const Grid& a, const Grid& b) {
  if (!a.same_as(b)) throw GridMismatchError("functions live on different grids");
}
}  // namespace detail

// Quadrature realization of the L2 inner product over the grid's domain.
// Accepts any Eigen vector expressions of matching length.
template <class A, class B>
double inner_product(const Grid& grid, const Eigen::MatrixBase<A>& f,
                     const Eigen::MatrixBase<B>& g) {
  return (grid.weights().array() * f.derived().array() * g.derived().array())
      .sum();
}

template <class A>
double l2_norm(const Grid& grid, const Eigen::MatrixBase<A>& f) {
  return std::sqrt(
      (grid.weights().array() * f.derived().array().square()).sum());
}

inline double inner_product(const FunctionOnGrid& f, const FunctionOnGrid& g) {
  detail::require_same_grid(f.grid(), g.grid());
  return inner_product(f.grid(), f.values(), g.values());
}

inline double l2_norm(const FunctionOnGrid& f) {
  return l2_norm(f.grid(), f.values());
}

inline double l2_correlation(const FunctionOnGrid& f, const FunctionOnGrid& g) {
  detail::require_same_grid(f.grid(), g.grid());
  const double nf = l2_norm(f);
  const double ng = l2_norm(g);
  if (nf == 0.0 || ng == 0.0)
    throw DegenerateFunctionError("l2_correlation of a zero-norm function");
  return inner_product(f.grid(), f.values(), g.values()) / (nf * ng);
}

}  // namespace funreg
