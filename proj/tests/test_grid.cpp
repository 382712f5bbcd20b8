#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "funreg/errors.hpp"
#include "funreg/grid.hpp"
#include "funreg/rng.hpp"
#include "funreg/synth.hpp"

using namespace funreg;

namespace {

FunctionOnGrid sine(const Grid& grid, int multiple) {
  Eigen::VectorXd v = std::sqrt(2.0) *
                      (2.0 * std::numbers::pi * multiple * grid.points().array())
                          .sin();
  return FunctionOnGrid(grid, v);
}

}  // namespace

TEST_CASE("trapezoid weights on small grids") {
  Eigen::Vector3d points(0.0, 0.5, 1.0);
  Eigen::VectorXd w = trapezoid_weights(points);
  CHECK(w(0) == doctest::Approx(0.25));
  CHECK(w(1) == doctest::Approx(0.5));
  CHECK(w(2) == doctest::Approx(0.25));

  Eigen::Vector2d two(0.0, 1.0);
  Eigen::VectorXd w2 = trapezoid_weights(two);
  CHECK(w2(0) == doctest::Approx(0.5));
  CHECK(w2(1) == doctest::Approx(0.5));
}

TEST_CASE("uniform 101-point weights sum to one") {
  Grid grid = Grid::uniform(101);
  double total = 0.0;
  for (Eigen::Index j = 0; j < grid.size(); ++j) total += grid.weights()(j);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(grid.weights()(0) == doctest::Approx(0.005));
  CHECK(grid.weights()(50) == doctest::Approx(0.01));
}

TEST_CASE("invalid grids are rejected") {
  Eigen::VectorXd one(1);
  one << 0.5;
  CHECK_THROWS_AS(trapezoid_weights(one), InvalidGridError);

  Eigen::Vector3d decreasing(0.0, 0.6, 0.4);
  CHECK_THROWS_AS(trapezoid_weights(decreasing), InvalidGridError);
  CHECK_THROWS_AS((Grid{Eigen::VectorXd(decreasing)}), InvalidGridError);

  Eigen::Vector2d outside(0.0, 1.5);
  CHECK_THROWS_AS((Grid{Eigen::VectorXd(outside)}), InvalidGridError);

  Eigen::Vector2d ok(0.0, 1.0);
  Eigen::Vector2d negative(0.5, -0.5);
  CHECK_THROWS_AS((Grid{Eigen::VectorXd(ok), Eigen::VectorXd(negative)}),
                  InvalidGridError);
  Eigen::Vector2d wrong_sum(0.9, 0.9);
  CHECK_THROWS_AS((Grid{Eigen::VectorXd(ok), Eigen::VectorXd(wrong_sum)}),
                  InvalidGridError);
}

TEST_CASE("inner products of the Fourier basis") {
  Grid grid = Grid::uniform(201);
  FunctionOnGrid f = sine(grid, 1);
  Eigen::VectorXd cos_values =
      std::sqrt(2.0) * (2.0 * std::numbers::pi * grid.points().array()).cos();
  FunctionOnGrid g(grid, cos_values);

  CHECK(inner_product(f, f) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(inner_product(f, g) == doctest::Approx(0.0).epsilon(1e-3));
  CHECK(l2_norm(f) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("projection of the scenario-1 coefficient onto phi_1") {
  Grid grid = Grid::uniform(201);
  FunctionOnGrid beta = beta_tm1(1.0, 0.5, grid);
  FunctionOnGrid phi1 = sine(grid, 1);
  CHECK(inner_product(beta, phi1) == doctest::Approx(0.5).epsilon(1e-3));

  const double expected = 0.5 / std::sqrt(0.25 + 0.25);
  CHECK(l2_correlation(beta, phi1) == doctest::Approx(expected).epsilon(2e-3));
  CHECK(l2_correlation(beta, beta) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("grid mismatch and degenerate inputs raise") {
  Grid a = Grid::uniform(11);
  Grid b = Grid::uniform(12);
  FunctionOnGrid f(a, Eigen::VectorXd::Ones(11));
  FunctionOnGrid g(b, Eigen::VectorXd::Ones(12));
  CHECK_THROWS_AS(inner_product(f, g), GridMismatchError);

  FunctionOnGrid zero(a, Eigen::VectorXd::Zero(11));
  CHECK_THROWS_AS(l2_correlation(f, zero), DegenerateFunctionError);
}

TEST_CASE("Cauchy-Schwarz holds for random function pairs") {
  Grid grid = Grid::uniform(53);
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd a(grid.size()), b(grid.size());
    for (Eigen::Index j = 0; j < grid.size(); ++j) {
      a(j) = rng.normal();
      b(j) = rng.normal() * (1.0 + rng.uniform());
    }
    FunctionOnGrid f(grid, a), g(grid, b);
    CHECK(std::abs(inner_product(f, g)) <= l2_norm(f) * l2_norm(g) + 1e-12);
  }
}

TEST_CASE("orthonormality error shrinks as the grid refines") {
  auto gram_error = [](const Grid& grid) {
    double worst = 0.0;
    for (int a = 1; a <= 4; ++a)
      for (int b = 1; b <= 4; ++b) {
        const double v = inner_product(fourier_eigenfunction(a, grid),
                                       fourier_eigenfunction(b, grid));
        worst = std::max(worst, std::abs(v - (a == b ? 1.0 : 0.0)));
      }
    return worst;
  };
  CHECK(gram_error(Grid::uniform(201)) < gram_error(Grid::uniform(51)));
}

TEST_CASE("jittered grids agree with the uniform grid") {
  Grid uniform = Grid::uniform(201);
  Rng rng(11);
  Eigen::VectorXd jittered = uniform.points();
  for (Eigen::Index j = 1; j + 1 < jittered.size(); ++j)
    jittered(j) += (rng.uniform() - 0.5) * 0.2 / 200.0;
  Grid rough(jittered);

  for (int a = 1; a <= 4; ++a)
    for (int b = a; b <= 4; ++b) {
      const double u = inner_product(fourier_eigenfunction(a, uniform),
                                     fourier_eigenfunction(b, uniform));
      const double r = inner_product(fourier_eigenfunction(a, rough),
                                     fourier_eigenfunction(b, rough));
      CHECK(std::abs(u - r) < 1e-2);
    }
}
