#include "funreg/spline.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "funreg/errors.hpp"

namespace funreg {

Eigen::VectorXd bspline_row(const Eigen::VectorXd& knots, int degree,
                            int n_basis, double x) {
  // Cox-de Boor recursion over the full basis. The bases have compact
  // support, so most entries stay zero; grids here are small enough that
  // the dense recursion is not worth optimizing.
  const int n_knots = static_cast<int>(knots.size());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n_knots - 1);

  // Degree-0 indicator functions; the last interval is closed at the top
  // so that the clamped basis sums to one at the right boundary.
  for (int i = 0; i < n_knots - 1; ++i) {
    const bool last_span = knots(i) < knots(i + 1) &&
                           (i + 1 == n_knots - 1 || knots(i + 1) == knots(n_knots - 1));
    if ((x >= knots(i) && x < knots(i + 1)) ||
        (last_span && x >= knots(i) && x <= knots(i + 1)))
      b(i) = 1.0;
  }

  for (int d = 1; d <= degree; ++d) {
    for (int i = 0; i + d + 1 < n_knots; ++i) {
      double left = 0.0;
      if (knots(i + d) > knots(i))
        left = (x - knots(i)) / (knots(i + d) - knots(i)) * b(i);
      double right = 0.0;
      if (knots(i + d + 1) > knots(i + 1))
        right = (knots(i + d + 1) - x) / (knots(i + d + 1) - knots(i + 1)) *
                b(i + 1);
      b(i) = left + right;
    }
  }
  return b.head(n_basis);
}

SplineBasis build_spline_basis(const Grid& grid, int n_basis, int degree) {
  if (degree < 1) throw ConfigError("spline degree must be at least 1");
  if (n_basis < degree + 1)
    throw ConfigError("n_basis must be at least degree + 1");
  if (grid.size() < n_basis)
    throw ConfigError("grid too coarse: " + std::to_string(grid.size()) +
                      " points for " + std::to_string(n_basis) +
                      " basis functions");

  const double lo = grid.points()(0);
  const double hi = grid.points()(grid.size() - 1);
  const int n_interior = n_basis - degree - 1;

  Eigen::VectorXd knots(n_basis + degree + 1);
  for (int i = 0; i <= degree; ++i) {
    knots(i) = lo;
    knots(n_basis + i) = hi;
  }
  const double h = (hi - lo) / (n_interior + 1);
  for (int i = 1; i <= n_interior; ++i) knots(degree + i) = lo + i * h;

  SplineBasis basis{Eigen::MatrixXd(grid.size(), n_basis),
                    Eigen::MatrixXd(),
                    knots,
                    n_basis,
                    degree,
                    grid};
  for (Eigen::Index j = 0; j < grid.size(); ++j)
    basis.values.row(j) =
        bspline_row(knots, degree, n_basis, grid.points()(j)).transpose();

  // Second-order difference penalty D2' D2.
  Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(n_basis - 2, n_basis);
  for (int i = 0; i < n_basis - 2; ++i) {
    d2(i, i) = 1.0;
    d2(i, i + 1) = -2.0;
    d2(i, i + 2) = 1.0;
  }
  basis.penalty = d2.transpose() * d2;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(basis.penalty);
  const Eigen::VectorXd ev = solver.eigenvalues();
  const double tol = ev(ev.size() - 1) * 1e-12;
  double log_pdet = 0.0;
  int nullity = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > tol)
      log_pdet += std::log(ev(i));
    else
      ++nullity;
  }
  basis.penalty_log_pdet = log_pdet;
  basis.penalty_nullity = nullity;
  return basis;
}

}  // namespace funreg
