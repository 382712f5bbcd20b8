#include "funreg/ols.hpp"

#include <cmath>
#include <string>

#include "funreg/errors.hpp"
#include "funreg/stats.hpp"

namespace funreg {

OlsFit ols_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& covariates) {
  const Eigen::Index n = y.size();
  const Eigen::Index q = covariates.cols();
  if (covariates.rows() != n)
    throw RankDeficiencyError("response and design have different row counts");
  if (n <= q + 1)
    throw RankDeficiencyError("need more than q + 1 observations, got " +
                              std::to_string(n));

  Eigen::MatrixXd design(n, q + 1);
  design.col(0).setOnes();
  design.rightCols(q) = covariates;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < q + 1)
    throw RankDeficiencyError("design matrix is rank deficient (rank " +
                              std::to_string(qr.rank()) + " of " +
                              std::to_string(q + 1) + ")");

  OlsFit fit;
  fit.n = n;
  fit.df = static_cast<double>(n - q - 1);
  fit.coefficients = qr.solve(y);

  const Eigen::VectorXd residuals = y - design * fit.coefficients;
  fit.residual_variance = residuals.squaredNorm() / fit.df;

  const Eigen::MatrixXd xtx_inv =
      (design.transpose() * design).ldlt().solve(
          Eigen::MatrixXd::Identity(q + 1, q + 1));
  fit.standard_errors =
      (fit.residual_variance * xtx_inv.diagonal()).cwiseSqrt();

  fit.t_statistics.resize(q + 1);
  fit.p_values.resize(q + 1);
  for (Eigen::Index j = 0; j <= q; ++j) {
    fit.t_statistics(j) = fit.coefficients(j) / fit.standard_errors(j);
    fit.p_values(j) = student_t_two_sided_p(fit.t_statistics(j), fit.df);
  }
  return fit;
}

}  // namespace funreg
