#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "funreg/dataset.hpp"
#include "funreg/grid.hpp"

namespace funreg {

// Scenario 1: a single fixed effect and a single principal component.
//   W_i(s) = X_i1 beta(s) + xi_i1 phi_1(s) + eps_i(s)
// with phi_1(s) = sqrt(2) sin(2 pi s),
//      beta(s)  = d { w + (1 - w) sqrt(2) sin(2 pi s) }.
struct Tm1Config {
  int n_subjects = 300;
  Grid grid = Grid::uniform(101);
  double d = 0.0;
  double w = 0.0;
  double lambda1 = 0.5;
  double sigma_eps = 0.5;
  std::uint64_t seed = 0;
};

// Scenario 2: two fixed effects and four Fourier principal components with
// eigenvalues lambda_l = eigenvalues(l-1). case_id in 1..6 selects the
// (beta_1 shape, f_2 shape) combination:
//   cases 1-3: beta_1 = 1;  cases 4-6: beta_1 = sqrt(2) sin(2 pi s)
//   f_2 = sqrt(2) sin(2 pi s) for {1,4}, sqrt(2) sin(4 pi s) for {2,5},
//         sqrt(2) sin(6 pi s) for {3,6}
//   beta_2 = w * 1 + (1 - w) * f_2, both betas scaled by d.
struct Tm2Config {
  int n_subjects = 300;
  Grid grid = Grid::uniform(101);
  double d = 0.0;
  double w = 0.0;
  int case_id = 1;
  Eigen::Vector4d eigenvalues{1.0, 0.5, 0.25, 0.125};
  double sigma_eps = 0.5;
  double beta0 = 0.0;
  std::uint64_t seed = 0;
};

// A generated dataset together with its ground truth. The response matrix
// equals covariates * beta-matrix + scores * phi-matrix + noise (plus the
// TM2 intercept), term for term.
struct SyntheticDataset {
  FunctionalDataset data;
  std::vector<FunctionOnGrid> true_betas;
  std::vector<FunctionOnGrid> true_eigenfunctions;
  Eigen::MatrixXd true_scores;  // N x L_true
  Eigen::MatrixXd noise;        // N x P
  double intercept = 0.0;
};

// The four Fourier principal components, index in 1..4:
// sqrt(2) sin(2 pi s), sqrt(2) cos(2 pi s), sqrt(2) sin(4 pi s),
// sqrt(2) cos(4 pi s).
FunctionOnGrid fourier_eigenfunction(int index, const Grid& grid);

FunctionOnGrid beta_tm1(double d, double w, const Grid& grid);

std::pair<FunctionOnGrid, FunctionOnGrid> beta_pair_tm2(int case_id, double d,
                                                        double w,
                                                        const Grid& grid);

SyntheticDataset generate_tm1(const Tm1Config& config);
SyntheticDataset generate_tm2(const Tm2Config& config);

}  // namespace funreg
