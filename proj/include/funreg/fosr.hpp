#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "funreg/dataset.hpp"
#include "funreg/fpca.hpp"
#include "funreg/grid.hpp"
#include "funreg/rng.hpp"
#include "funreg/spline.hpp"

namespace funreg {

// Coefficient covariance flavor. The posterior (bayesian) form
// H^-1 = (A' Sigma^-1 A + S)^-1 absorbs smoothing-selection noise and
// calibrates the band tests; the plain sandwich H^-1 (A' Sigma^-1 A) H^-1
// understates variability once the smoothing parameters are data-chosen.
enum class CovarianceType { bayesian, sandwich };

struct FosrOptions {
  int n_basis = 30;
  // Residual FPCA selection: fixed count, or pve threshold when 0.
  int residual_components = 0;
  double residual_pve = 0.90;
  // Penalized GLS iterations (residual FPCA + refit). 0 keeps the
  // working-independence fit.
  int max_iterations = 4;
  double tolerance = 1e-4;
  // REML grid search range for log10(lambda), refined by golden section.
  double log10_lambda_min = -6.0;
  double log10_lambda_max = 8.0;
  CovarianceType covariance = CovarianceType::bayesian;
};

// Penalized-spline function-on-scalar fit. Coefficient block q (0 is the
// functional intercept) spans rows [q*K, (q+1)*K) of spline_coefficients
// and coefficient_covariance.
struct FoSRFit {
  SplineBasis basis;
  std::vector<FunctionOnGrid> coefficient_functions;  // Q+1 entries
  Eigen::VectorXd spline_coefficients;                // (Q+1)*K
  Eigen::MatrixXd coefficient_covariance;             // (Q+1)K square
  Eigen::VectorXd smoothing_parameters;               // Q+1
  EigenSystem residual_structure;
  Eigen::VectorXd variance_components;  // residual eigenvalues
  double residual_noise_variance = 0.0;
  double working_scale = 0.0;  // REML scale of the working-independence fit
  int iterations = 0;
  double last_rel_change = 0.0;
  bool converged = false;
  Eigen::Index n_subjects = 0;
  Eigen::Index n_covariates = 0;
  std::vector<std::string> covariate_names;

  int n_coefficients() const {
    return static_cast<int>(coefficient_functions.size());
  }
};

FoSRFit fit_fosr(const FunctionalDataset& data, const FosrOptions& options = {});

// Pointwise and simultaneous bands for one coefficient function
// (covariate 0 is the intercept). Bands are evaluated on an even subgrid
// of at most 300 points when the grid is larger; s holds the evaluation
// points in grid ([0,1]) coordinates.
struct BandSet {
  Eigen::VectorXd s;
  Eigen::VectorXd estimate;
  Eigen::VectorXd se;
  Eigen::VectorXd pointwise_lower, pointwise_upper;
  Eigen::VectorXd simultaneous_lower, simultaneous_upper;
  double pointwise_multiplier = 0.0;
  double simultaneous_multiplier = 0.0;
  double global_p = 1.0;
  double alpha = 0.05;
  bool subsampled = false;
};

BandSet pointwise_band(const FoSRFit& fit, int covariate, double alpha);

BandSet cma_band(const FoSRFit& fit, int covariate, double alpha,
                 int n_draws = 10000, std::uint64_t seed = 0);

struct GlobalTest {
  double p = 1.0;
  bool reject = false;
};

GlobalTest fosr_global_test(const FoSRFit& fit, int covariate, double alpha,
                            int n_draws = 10000, std::uint64_t seed = 0);

// Max-|t| calibration over a Gaussian coefficient draw mapped through a
// basis: multiplier is the empirical (1-alpha) quantile of
// max_j |(basis * draw)_j| / se_j and global_p the share of draws at or
// above the observed maximum.
struct MaxTCalibration {
  double multiplier = 0.0;
  double global_p = 1.0;
};

MaxTCalibration calibrate_max_t(const Eigen::MatrixXd& coef_cov,
                                const Eigen::MatrixXd& basis_rows,
                                const Eigen::VectorXd& se,
                                const Eigen::VectorXd& estimate, double alpha,
                                int n_draws, Rng rng);

}  // namespace funreg
