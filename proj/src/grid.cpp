#include "funreg/grid.hpp"

#include <algorithm>
#include <cmath>

namespace funreg {

Eigen::VectorXd trapezoid_weights(const Eigen::VectorXd& points) {
  const Eigen::Index p = points.size();
  if (p < 2) throw InvalidGridError("grid needs at least 2 points");
  for (Eigen::Index j = 1; j < p; ++j)
    if (!(points(j) > points(j - 1)))
      throw InvalidGridError("grid points must be strictly increasing at index " +
                             std::to_string(j));
  Eigen::VectorXd w(p);
  w(0) = (points(1) - points(0)) / 2.0;
  w(p - 1) = (points(p - 1) - points(p - 2)) / 2.0;
  for (Eigen::Index j = 1; j < p - 1; ++j)
    w(j) = (points(j + 1) - points(j - 1)) / 2.0;
  return w;
}

Grid::Grid(Eigen::VectorXd points, Eigen::VectorXd weights) {
  if (weights.size() == 0) weights = trapezoid_weights(points);
  const Eigen::Index p = points.size();
  if (p < 2) throw InvalidGridError("grid needs at least 2 points");
  if (weights.size() != p)
    throw InvalidGridError("weights size does not match points size");
  for (Eigen::Index j = 1; j < p; ++j)
    if (!(points(j) > points(j - 1)))
      throw InvalidGridError("grid points must be strictly increasing at index " +
                             std::to_string(j));
  constexpr double kTol = 1e-9;
  if (points(0) < -kTol || points(p - 1) > 1.0 + kTol)
    throw InvalidGridError("grid points must lie within [0, 1]");
  if ((weights.array() <= 0.0).any())
    throw InvalidGridError("quadrature weights must all be positive");
  const double span = points(p - 1) - points(0);
  if (std::abs(weights.sum() - span) > 1e-8 * std::max(span, 1.0))
    throw InvalidGridError("quadrature weights must sum to the domain length");
  data_ = std::make_shared<const Data>(Data{std::move(points), std::move(weights)});
}

Grid Grid::uniform(Eigen::Index n) {
  if (n < 2) throw InvalidGridError("grid needs at least 2 points");
  return Grid(Eigen::VectorXd::LinSpaced(n, 0.0, 1.0));
}

}  // namespace funreg
