#pragma once

#include <Eigen/Dense>

#include "funreg/grid.hpp"

namespace funreg {

// B-spline basis evaluated on a grid, with a squared second-difference
// penalty on the coefficients (P-spline style). Knots are equally spaced
// across the grid's span with clamped (repeated) boundary knots.
struct SplineBasis {
  Eigen::MatrixXd values;   // P x K evaluations
  Eigen::MatrixXd penalty;  // K x K, positive semidefinite
  Eigen::VectorXd knots;
  int n_basis = 0;
  int degree = 3;
  Grid grid;

  // Pseudo log-determinant and nullity of the penalty, fixed by K.
  double penalty_log_pdet = 0.0;
  int penalty_nullity = 0;
};

SplineBasis build_spline_basis(const Grid& grid, int n_basis = 30,
                               int degree = 3);

// Values of the n_basis B-splines at a single point.
Eigen::VectorXd bspline_row(const Eigen::VectorXd& knots, int degree,
                            int n_basis, double x);

}  // namespace funreg
