#pragma once

#include <Eigen/Dense>
#include <vector>

#include "funreg/dataset.hpp"
#include "funreg/grid.hpp"

namespace funreg {

// Result of a functional PCA fit. Eigenfunctions have unit L2 norm under
// the grid's quadrature; eigenvalues are the L2-operator eigenvalues and
// decrease; scores are quadrature projections of the centered curves; pve
// is the cumulative proportion of variance explained.
struct EigenSystem {
  FunctionOnGrid mean;
  std::vector<FunctionOnGrid> eigenfunctions;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd scores;  // N x L
  Eigen::VectorXd pve;     // cumulative, length L
  double residual_variance = 0.0;

  int n_components() const { return static_cast<int>(eigenfunctions.size()); }
};

struct FpcaOptions {
  // Fixed component count; 0 selects the smallest L with pve >= threshold.
  int n_components = 0;
  double pve_threshold = 0.90;
  // Optional penalized smoothing of the sample covariance along each axis.
  bool smooth_covariance = false;
  double smoothing_lambda = 1e-4;
};

EigenSystem fit_fpca(const FunctionalDataset& data,
                     const FpcaOptions& options = {});

// Quadrature scores of already-centered curves against the eigenfunctions.
Eigen::MatrixXd compute_scores(const Eigen::MatrixXd& centered,
                               const Grid& grid,
                               const std::vector<FunctionOnGrid>& eigenfunctions);

// Flips eigenfunction signs (and score columns) so each aligns with the
// matching reference function.
EigenSystem sign_align(EigenSystem system,
                       const std::vector<FunctionOnGrid>& reference);

// Canonical rule: the grid point of maximum |phi| takes a positive value.
EigenSystem sign_align(EigenSystem system);

}  // namespace funreg
