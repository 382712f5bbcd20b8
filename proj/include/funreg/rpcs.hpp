#pragma once

#include <Eigen/Dense>
#include <vector>

#include "funreg/fpca.hpp"
#include "funreg/grid.hpp"
#include "funreg/ols.hpp"

namespace funreg {

// Per-component score regressions: row l holds the OLS fit of score column
// l on the covariates, with column 0 the intercept.
struct RPCSFit {
  Eigen::MatrixXd slopes;           // L x (Q+1)
  Eigen::MatrixXd standard_errors;  // L x (Q+1)
  Eigen::MatrixXd t_statistics;     // L x (Q+1)
  Eigen::MatrixXd p_values;         // L x (Q+1)
  Eigen::VectorXd residual_variances;
  Eigen::Index n_subjects = 0;
  Eigen::Index n_components = 0;
  Eigen::Index n_covariates = 0;
};

RPCSFit rpcs_regress(const Eigen::MatrixXd& scores,
                     const Eigen::MatrixXd& covariates);

enum class Correction { none, bonferroni };

// Joint test of H0: b_ql = 0 for all components l, for covariate q (1-based).
// Uncorrected: global p = min_l p_l (anti-conservative). Bonferroni:
// global p = min(1, L * min_l p_l).
struct JointTestResult {
  int covariate = 0;
  Eigen::VectorXd component_p_values;
  Correction correction = Correction::none;
  double global_p = 1.0;
  double alpha = 0.05;
  bool reject = false;
};

JointTestResult rpcs_joint_test(const RPCSFit& fit, int covariate, double alpha,
                                Correction correction);

enum class ReconstructionMode { all, significant };

struct ReconstructedEffect {
  FunctionOnGrid effect;
  std::vector<int> components_used;  // 1-based
  bool empty_selection = false;
};

// Implied functional effect sum_l b_ql phi_l. In significant mode only
// components with p_ql < alpha enter (alpha / L when bonferroni_filter).
ReconstructedEffect reconstruct_effect(const RPCSFit& fit,
                                       const EigenSystem& system,
                                       int covariate, ReconstructionMode mode,
                                       double alpha,
                                       bool bonferroni_filter = false);

// Inner products of a coefficient function with each eigenfunction: the
// population values the score-regression slopes estimate.
Eigen::VectorXd theoretical_projection(const FunctionOnGrid& beta,
                                       const EigenSystem& system);

}  // namespace funreg
