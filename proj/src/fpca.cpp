#include "funreg/fpca.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "funreg/errors.hpp"
#include "funreg/spline.hpp"

namespace funreg {

namespace {

// Penalized-spline smoother matrix S = B (B'B + lambda D)^-1 B'.
Eigen::MatrixXd smoother_matrix(const Grid& grid, double lambda) {
  const int k = static_cast<int>(std::min<Eigen::Index>(35, grid.size()));
  SplineBasis basis = build_spline_basis(grid, k);
  Eigen::MatrixXd gram = basis.values.transpose() * basis.values +
                         lambda * basis.penalty;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success)
    throw SingularSystemError("covariance smoother system is singular");
  return basis.values * ldlt.solve(basis.values.transpose());
}

}  // namespace

EigenSystem fit_fpca(const FunctionalDataset& data, const FpcaOptions& options) {
  const Eigen::Index n = data.n_subjects();
  const Eigen::Index p = data.n_points();
  if (n < 2) throw RankDeficiencyError("fpca needs at least 2 subjects");
  if (p < 2) throw InvalidGridError("fpca needs at least 2 grid points");

  const Grid& grid = data.grid;
  Eigen::VectorXd mean = data.response.colwise().mean();
  Eigen::MatrixXd centered = data.response.rowwise() - mean.transpose();

  Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(n - 1);
  cov = ((cov + cov.transpose()) / 2.0).eval();
  if (options.smooth_covariance) {
    Eigen::MatrixXd s = smoother_matrix(grid, options.smoothing_lambda);
    cov = (s * cov * s.transpose()).eval();
    cov = ((cov + cov.transpose()) / 2.0).eval();
  }

  // Eigendecompose in the quadrature metric: with W = diag(weights), the
  // L2 covariance operator maps to the symmetric matrix W^1/2 C W^1/2.
  Eigen::VectorXd sqrt_w = grid.weights().array().sqrt();
  Eigen::MatrixXd sym =
      sqrt_w.asDiagonal() * cov * sqrt_w.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success)
    throw SingularSystemError("covariance eigendecomposition failed");

  // Eigen returns ascending order; flip to descending and clip tiny
  // negative values produced by rounding.
  Eigen::VectorXd values = solver.eigenvalues().reverse();
  Eigen::MatrixXd vectors = solver.eigenvectors().rowwise().reverse();
  values = values.cwiseMax(0.0);

  const double total_variance = values.sum();
  if (total_variance <= 0.0)
    throw RankDeficiencyError("data have no variance around the mean");

  const Eigen::Index max_rank = std::min<Eigen::Index>(n - 1, p);
  int n_components = options.n_components;
  if (n_components > max_rank)
    throw RankDeficiencyError("requested " + std::to_string(n_components) +
                              " components but rank is at most " +
                              std::to_string(max_rank));
  if (n_components <= 0) {
    double cum = 0.0;
    n_components = static_cast<int>(max_rank);
    for (Eigen::Index l = 0; l < max_rank; ++l) {
      cum += values(l);
      if (cum / total_variance >= options.pve_threshold) {
        n_components = static_cast<int>(l + 1);
        break;
      }
    }
  }

  EigenSystem system{FunctionOnGrid(grid, mean), {}, {}, {}, {}, 0.0};
  system.eigenvalues = values.head(n_components);
  system.pve.resize(n_components);
  double cum = 0.0;
  for (int l = 0; l < n_components; ++l) {
    cum += values(l);
    system.pve(l) = cum / total_variance;
  }
  system.residual_variance =
      (total_variance - cum) / grid.length();

  Eigen::VectorXd inv_sqrt_w = sqrt_w.cwiseInverse();
  system.eigenfunctions.reserve(n_components);
  for (int l = 0; l < n_components; ++l) {
    Eigen::VectorXd phi = inv_sqrt_w.asDiagonal() * vectors.col(l);
    phi /= l2_norm(grid, phi);
    system.eigenfunctions.emplace_back(grid, std::move(phi));
  }

  system.scores = compute_scores(centered, grid, system.eigenfunctions);
  return system;
}

Eigen::MatrixXd compute_scores(
    const Eigen::MatrixXd& centered, const Grid& grid,
    const std::vector<FunctionOnGrid>& eigenfunctions) {
  if (centered.cols() != grid.size())
    throw GridMismatchError("centered data do not match the grid");
  Eigen::MatrixXd weighted_phi(grid.size(),
                               static_cast<Eigen::Index>(eigenfunctions.size()));
  for (std::size_t l = 0; l < eigenfunctions.size(); ++l) {
    detail::require_same_grid(eigenfunctions[l].grid(), grid);
    weighted_phi.col(static_cast<Eigen::Index>(l)) =
        grid.weights().cwiseProduct(eigenfunctions[l].values());
  }
  return centered * weighted_phi;
}

EigenSystem sign_align(EigenSystem system,
                       const std::vector<FunctionOnGrid>& reference) {
  const std::size_t m =
      std::min(reference.size(), system.eigenfunctions.size());
  for (std::size_t l = 0; l < m; ++l) {
    if (inner_product(system.eigenfunctions[l], reference[l]) < 0.0) {
      system.eigenfunctions[l] = FunctionOnGrid(
          system.eigenfunctions[l].grid(), -system.eigenfunctions[l].values());
      system.scores.col(static_cast<Eigen::Index>(l)) *= -1.0;
    }
  }
  return system;
}

EigenSystem sign_align(EigenSystem system) {
  for (std::size_t l = 0; l < system.eigenfunctions.size(); ++l) {
    const Eigen::VectorXd& v = system.eigenfunctions[l].values();
    Eigen::Index peak;
    v.cwiseAbs().maxCoeff(&peak);
    if (v(peak) < 0.0) {
      system.eigenfunctions[l] =
          FunctionOnGrid(system.eigenfunctions[l].grid(), -v);
      system.scores.col(static_cast<Eigen::Index>(l)) *= -1.0;
    }
  }
  return system;
}

}  // namespace funreg
