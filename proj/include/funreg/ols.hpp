#pragma once

#include <Eigen/Dense>

namespace funreg {

// Ordinary least squares with an intercept prepended to the design.
// Coefficient 0 is the intercept; standard errors are classical
// homoskedastic ones and p-values are two-sided t-tests on n - q - 1
// degrees of freedom.
struct OlsFit {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd standard_errors;
  Eigen::VectorXd t_statistics;
  Eigen::VectorXd p_values;
  double residual_variance = 0.0;
  Eigen::Index n = 0;
  double df = 0.0;
};

OlsFit ols_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& covariates);

}  // namespace funreg
