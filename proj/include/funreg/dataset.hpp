#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "funreg/grid.hpp"

namespace funreg {

// Functional observations on a shared grid plus scalar covariates.
// response is N x P, covariates is N x Q; rows are matched by position and
// identified by ids. The grid lives on [0, 1]; grid_offset/grid_scale map
// back to the original units (original = offset + scale * s).
struct FunctionalDataset {
  Grid grid;
  Eigen::MatrixXd response;
  Eigen::MatrixXd covariates;
  std::vector<std::string> ids;
  std::vector<std::string> covariate_names;
  double grid_offset = 0.0;
  double grid_scale = 1.0;

  Eigen::Index n_subjects() const { return response.rows(); }
  Eigen::Index n_points() const { return response.cols(); }
  Eigen::Index n_covariates() const { return covariates.cols(); }
};

}  // namespace funreg
