#include "funreg/rpcs.hpp"

#include <algorithm>
#include <string>

#include "funreg/errors.hpp"

namespace funreg {

RPCSFit rpcs_regress(const Eigen::MatrixXd& scores,
                     const Eigen::MatrixXd& covariates) {
  if (scores.rows() != covariates.rows())
    throw RankDeficiencyError("scores and covariates have different row counts");
  const Eigen::Index l_count = scores.cols();
  const Eigen::Index q = covariates.cols();
  if (l_count < 1) throw ConfigError("need at least one score column");

  RPCSFit fit;
  fit.n_subjects = scores.rows();
  fit.n_components = l_count;
  fit.n_covariates = q;
  fit.slopes.resize(l_count, q + 1);
  fit.standard_errors.resize(l_count, q + 1);
  fit.t_statistics.resize(l_count, q + 1);
  fit.p_values.resize(l_count, q + 1);
  fit.residual_variances.resize(l_count);

  for (Eigen::Index l = 0; l < l_count; ++l) {
    OlsFit ols = ols_fit(scores.col(l), covariates);
    fit.slopes.row(l) = ols.coefficients.transpose();
    fit.standard_errors.row(l) = ols.standard_errors.transpose();
    fit.t_statistics.row(l) = ols.t_statistics.transpose();
    fit.p_values.row(l) = ols.p_values.transpose();
    fit.residual_variances(l) = ols.residual_variance;
  }
  return fit;
}

namespace {

void check_covariate_index(const RPCSFit& fit, int covariate) {
  if (covariate < 1 || covariate > fit.n_covariates)
    throw ConfigError("covariate index " + std::to_string(covariate) +
                      " out of range 1.." + std::to_string(fit.n_covariates));
}

}  // namespace

JointTestResult rpcs_joint_test(const RPCSFit& fit, int covariate, double alpha,
                                Correction correction) {
  check_covariate_index(fit, covariate);
  JointTestResult result;
  result.covariate = covariate;
  result.correction = correction;
  result.alpha = alpha;
  result.component_p_values = fit.p_values.col(covariate);

  const double min_p = result.component_p_values.minCoeff();
  if (correction == Correction::bonferroni)
    result.global_p =
        std::min(1.0, static_cast<double>(fit.n_components) * min_p);
  else
    result.global_p = min_p;
  result.reject = result.global_p < alpha;
  return result;
}

ReconstructedEffect reconstruct_effect(const RPCSFit& fit,
                                       const EigenSystem& system,
                                       int covariate, ReconstructionMode mode,
                                       double alpha, bool bonferroni_filter) {
  check_covariate_index(fit, covariate);
  if (system.n_components() != fit.n_components)
    throw ConfigError("eigensystem has " +
                      std::to_string(system.n_components()) +
                      " components but the fit has " +
                      std::to_string(fit.n_components));

  const Grid& grid = system.mean.grid();
  const double threshold =
      bonferroni_filter ? alpha / static_cast<double>(fit.n_components) : alpha;

  Eigen::VectorXd effect = Eigen::VectorXd::Zero(grid.size());
  ReconstructedEffect out{FunctionOnGrid(grid, effect), {}, false};
  for (Eigen::Index l = 0; l < fit.n_components; ++l) {
    if (mode == ReconstructionMode::significant &&
        !(fit.p_values(l, covariate) < threshold))
      continue;
    effect += fit.slopes(l, covariate) *
              system.eigenfunctions[static_cast<std::size_t>(l)].values();
    out.components_used.push_back(static_cast<int>(l) + 1);
  }
  out.effect = FunctionOnGrid(grid, std::move(effect));
  out.empty_selection = out.components_used.empty();
  return out;
}

Eigen::VectorXd theoretical_projection(const FunctionOnGrid& beta,
                                       const EigenSystem& system) {
  Eigen::VectorXd projections(system.n_components());
  for (int l = 0; l < system.n_components(); ++l)
    projections(l) =
        inner_product(beta, system.eigenfunctions[static_cast<std::size_t>(l)]);
  return projections;
}

}  // namespace funreg
