#include "funreg/fosr.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "funreg/errors.hpp"
#include "funreg/stats.hpp"

namespace funreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Stacked-model normal equations in Kronecker form. With design row x_i and
// basis B, the per-subject design is x_i' (x) B, so
//   A' A = (X'X) (x) (B'B)   and   A' y = vec(B' W' X)
// never materializing the N*P x (Q+1)*K design.
struct StackedModel {
  Eigen::MatrixXd m0;        // X'X, (Q+1) x (Q+1)
  Eigen::MatrixXd gram;      // B' Sigma^-1 B (identity Sigma in step 1)
  Eigen::MatrixXd rhs;       // B' Sigma^-1 W' X, K x (Q+1)
  double yty = 0.0;          // y' Sigma^-1 y over all subjects
  Eigen::Index n_obs = 0;
  int k = 0;
  int n_blocks = 0;  // Q+1

  // H = m0 (x) gram + blockdiag(penalty_scale_q * D)
  Eigen::MatrixXd penalized_system(const Eigen::MatrixXd& penalty,
                                   const Eigen::VectorXd& penalty_scales) const {
    Eigen::MatrixXd h(n_blocks * k, n_blocks * k);
    for (int a = 0; a < n_blocks; ++a)
      for (int b = 0; b < n_blocks; ++b)
        h.block(a * k, b * k, k, k) = m0(a, b) * gram;
    for (int a = 0; a < n_blocks; ++a)
      h.block(a * k, a * k, k, k) += penalty_scales(a) * penalty;
    return h;
  }

  Eigen::VectorXd rhs_vec() const {
    Eigen::VectorXd b(n_blocks * k);
    for (int a = 0; a < n_blocks; ++a) b.segment(a * k, k) = rhs.col(a);
    return b;
  }

  // theta' (A'A) theta via the Kronecker identity (M (x) G) vec(T) = vec(G T M).
  double quad_form(const Eigen::VectorXd& theta) const {
    Eigen::Map<const Eigen::MatrixXd> t(theta.data(), k, n_blocks);
    return (t.cwiseProduct(gram * t * m0)).sum();
  }
};

struct RemlEval {
  double value = kInf;
  Eigen::VectorXd theta;
  double scale = 1.0;  // profiled phi
};

// Restricted likelihood of the working-independence model with the scale
// profiled out:
//   -2 l_R = (n - M_p)(1 + log(2 pi phi_hat)) + log|H| - log|S|_+
// where H = A'A + S, S = blockdiag(lambda_q D), phi_hat = D_p / (n - M_p).
RemlEval reml_objective(const StackedModel& model, const SplineBasis& basis,
                        const Eigen::VectorXd& lambdas) {
  RemlEval eval;
  Eigen::MatrixXd h = model.penalized_system(basis.penalty, lambdas);
  Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() != Eigen::Success) return eval;

  const Eigen::VectorXd b = model.rhs_vec();
  eval.theta = llt.solve(b);

  double penalty_term = 0.0;
  for (int a = 0; a < model.n_blocks; ++a)
    penalty_term += lambdas(a) * eval.theta.segment(a * model.k, model.k)
                                     .dot(basis.penalty *
                                          eval.theta.segment(a * model.k, model.k));
  const double rss = model.yty - 2.0 * eval.theta.dot(b) +
                     model.quad_form(eval.theta);
  const double dp = rss + penalty_term;

  const double nullity_total =
      static_cast<double>(model.n_blocks * basis.penalty_nullity);
  const double df = static_cast<double>(model.n_obs) - nullity_total;
  if (dp <= 0.0 || df <= 0.0) return eval;
  eval.scale = dp / df;

  double log_det_h = 0.0;
  for (int i = 0; i < h.rows(); ++i)
    log_det_h += 2.0 * std::log(llt.matrixLLT()(i, i));

  double log_pdet_s =
      static_cast<double>(model.n_blocks) * basis.penalty_log_pdet;
  const double rank_per_block =
      static_cast<double>(basis.n_basis - basis.penalty_nullity);
  for (int a = 0; a < model.n_blocks; ++a)
    log_pdet_s += rank_per_block * std::log(lambdas(a));

  eval.value = df * (1.0 + std::log(2.0 * std::numbers::pi * eval.scale)) +
               log_det_h - log_pdet_s;
  return eval;
}

// Coordinate-wise smoothing selection: log-spaced grid per coefficient,
// refined by golden section around the best grid point.
Eigen::VectorXd select_lambdas(const StackedModel& model,
                               const SplineBasis& basis,
                               const FosrOptions& options) {
  const int blocks = model.n_blocks;
  Eigen::VectorXd log_lambda = Eigen::VectorXd::Zero(blocks);

  auto objective = [&](const Eigen::VectorXd& ll) {
    return reml_objective(model, basis, ll.array().exp().matrix()).value;
  };

  const double lo = options.log10_lambda_min * std::numbers::ln10;
  const double hi = options.log10_lambda_max * std::numbers::ln10;
  const double step = std::numbers::ln10;
  constexpr double kGolden = 0.6180339887498949;

  for (int sweep = 0; sweep < 2; ++sweep) {
    for (int q = 0; q < blocks; ++q) {
      double best_val = kInf;
      double best_ll = 0.0;
      for (double ll = lo; ll <= hi + 1e-9; ll += step) {
        log_lambda(q) = ll;
        const double val = objective(log_lambda);
        if (val < best_val) {
          best_val = val;
          best_ll = ll;
        }
      }
      double a = std::max(lo, best_ll - step);
      double b = std::min(hi, best_ll + step);
      double x1 = b - kGolden * (b - a);
      double x2 = a + kGolden * (b - a);
      log_lambda(q) = x1;
      double f1 = objective(log_lambda);
      log_lambda(q) = x2;
      double f2 = objective(log_lambda);
      while (b - a > 0.02) {
        if (f1 < f2) {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - kGolden * (b - a);
          log_lambda(q) = x1;
          f1 = objective(log_lambda);
        } else {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + kGolden * (b - a);
          log_lambda(q) = x2;
          f2 = objective(log_lambda);
        }
      }
      log_lambda(q) = f1 < f2 ? x1 : x2;
    }
  }
  return log_lambda.array().exp().matrix();
}

// Sigma^-1 for Sigma = Phi Lambda Phi' + sigma2 I via Woodbury.
Eigen::MatrixXd residual_precision(const EigenSystem& structure,
                                   double sigma2, Eigen::Index p) {
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(p, p);
  int keep = 0;
  for (int l = 0; l < structure.n_components(); ++l)
    if (structure.eigenvalues(l) > 1e-10 * structure.eigenvalues(0)) ++keep;
  if (keep == 0) return identity / sigma2;

  Eigen::MatrixXd phi(p, keep);
  for (int l = 0; l < keep; ++l)
    phi.col(l) = structure.eigenfunctions[static_cast<std::size_t>(l)].values();
  Eigen::MatrixXd core = structure.eigenvalues.head(keep)
                             .cwiseInverse()
                             .asDiagonal()
                             .toDenseMatrix();
  core += phi.transpose() * phi / sigma2;
  Eigen::LLT<Eigen::MatrixXd> llt(core);
  if (llt.info() != Eigen::Success)
    throw SingularSystemError("residual covariance core is not positive definite");
  return (identity - phi * llt.solve(phi.transpose()) / sigma2) / sigma2;
}

std::vector<Eigen::Index> band_subgrid(Eigen::Index p) {
  constexpr Eigen::Index kMaxBandPoints = 300;
  std::vector<Eigen::Index> idx;
  if (p <= kMaxBandPoints) {
    idx.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) idx[j] = j;
    return idx;
  }
  idx.reserve(kMaxBandPoints);
  for (Eigen::Index j = 0; j < kMaxBandPoints; ++j) {
    Eigen::Index v = (j * (p - 1)) / (kMaxBandPoints - 1);
    if (idx.empty() || v != idx.back()) idx.push_back(v);
  }
  return idx;
}

void check_coefficient_index(const FoSRFit& fit, int covariate) {
  if (covariate < 0 || covariate > fit.n_covariates)
    throw ConfigError("coefficient index " + std::to_string(covariate) +
                      " out of range 0.." + std::to_string(fit.n_covariates));
}

}  // namespace

FoSRFit fit_fosr(const FunctionalDataset& data, const FosrOptions& options) {
  const Eigen::Index n = data.n_subjects();
  const Eigen::Index p = data.n_points();
  const Eigen::Index q = data.n_covariates();
  if (n < 2) throw RankDeficiencyError("fosr needs at least 2 subjects");
  if (!data.response.allFinite() || !data.covariates.allFinite())
    throw ConfigError("response and covariates must be finite");

  SplineBasis basis = build_spline_basis(data.grid, options.n_basis);
  const int k = basis.n_basis;
  const int blocks = static_cast<int>(q) + 1;

  Eigen::MatrixXd design(n, blocks);
  design.col(0).setOnes();
  design.rightCols(q) = data.covariates;
  {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < blocks)
      throw RankDeficiencyError("covariate design matrix is rank deficient");
  }

  const Eigen::MatrixXd wt_x = data.response.transpose() * design;  // P x blocks

  StackedModel working;
  working.m0 = design.transpose() * design;
  working.gram = basis.values.transpose() * basis.values;
  working.rhs = basis.values.transpose() * wt_x;
  working.yty = data.response.squaredNorm();
  working.n_obs = n * p;
  working.k = k;
  working.n_blocks = blocks;

  const Eigen::VectorXd lambdas = select_lambdas(working, basis, options);
  RemlEval init = reml_objective(working, basis, lambdas);
  if (!std::isfinite(init.value))
    throw SingularSystemError("working-independence system is singular");

  FoSRFit fit;
  fit.basis = basis;
  fit.smoothing_parameters = lambdas;
  fit.working_scale = init.scale;
  fit.n_subjects = n;
  fit.n_covariates = q;
  fit.covariate_names = data.covariate_names;
  fit.spline_coefficients = init.theta;

  FunctionalDataset residual_view = data;
  EigenSystem structure;
  double sigma2 = init.scale;
  bool have_gls = false;

  FpcaOptions fpca_options;
  fpca_options.n_components = options.residual_components;
  fpca_options.pve_threshold = options.residual_pve;

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    Eigen::Map<const Eigen::MatrixXd> theta_mat(fit.spline_coefficients.data(),
                                                k, blocks);
    Eigen::MatrixXd coef_funcs = basis.values * theta_mat;  // P x blocks
    residual_view.response = data.response - design * coef_funcs.transpose();

    const double raw_resid_var =
        residual_view.response.squaredNorm() / static_cast<double>(n * p);
    bool degenerate = false;
    try {
      structure = fit_fpca(residual_view, fpca_options);
    } catch (const RankDeficiencyError&) {
      degenerate = true;
    }
    if (degenerate) {
      structure = EigenSystem{
          FunctionOnGrid(data.grid, residual_view.response.colwise().mean()),
          {}, Eigen::VectorXd(), Eigen::MatrixXd(), Eigen::VectorXd(),
          raw_resid_var};
    }
    sigma2 = std::max({structure.residual_variance, 1e-8 * raw_resid_var,
                       1e-12});

    // Whitened normal equations. Smoothing parameters are re-selected by
    // REML in this metric: selecting them under working independence lets
    // the smooth within-subject noise masquerade as fixed-effect signal.
    Eigen::MatrixXd precision = residual_precision(structure, sigma2, p);
    StackedModel gls;
    gls.m0 = working.m0;
    gls.gram = basis.values.transpose() * precision * basis.values;
    gls.rhs = basis.values.transpose() * (precision * wt_x);
    gls.yty = (data.response.transpose().cwiseProduct(
                   precision * data.response.transpose()))
                  .sum();
    gls.n_obs = working.n_obs;
    gls.k = k;
    gls.n_blocks = blocks;

    fit.smoothing_parameters = select_lambdas(gls, basis, options);
    RemlEval refit = reml_objective(gls, basis, fit.smoothing_parameters);
    if (!std::isfinite(refit.value))
      throw SingularSystemError("penalized GLS system is singular");

    const double denom = std::max(fit.spline_coefficients.norm(), 1e-12);
    fit.last_rel_change = (refit.theta - fit.spline_coefficients).norm() / denom;
    fit.spline_coefficients = refit.theta;
    fit.iterations = iter;

    Eigen::MatrixXd h =
        gls.penalized_system(basis.penalty, fit.smoothing_parameters);
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    Eigen::MatrixXd h_inv =
        llt.solve(Eigen::MatrixXd::Identity(blocks * k, blocks * k));
    if (options.covariance == CovarianceType::bayesian) {
      fit.coefficient_covariance = refit.scale * h_inv;
    } else {
      Eigen::MatrixXd data_info(blocks * k, blocks * k);
      for (int a = 0; a < blocks; ++a)
        for (int b = 0; b < blocks; ++b)
          data_info.block(a * k, b * k, k, k) = gls.m0(a, b) * gls.gram;
      fit.coefficient_covariance = refit.scale * h_inv * data_info * h_inv;
    }
    have_gls = true;

    if (iter >= 2 && fit.last_rel_change < options.tolerance) {
      fit.converged = true;
      break;
    }
  }

  if (!have_gls) {
    // Working-independence covariance, scaled by the REML phi.
    Eigen::MatrixXd h = working.penalized_system(
        basis.penalty, lambdas);
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    Eigen::MatrixXd h_inv =
        llt.solve(Eigen::MatrixXd::Identity(blocks * k, blocks * k));
    if (options.covariance == CovarianceType::bayesian) {
      fit.coefficient_covariance = init.scale * h_inv;
    } else {
      Eigen::MatrixXd data_info(blocks * k, blocks * k);
      for (int a = 0; a < blocks; ++a)
        for (int b = 0; b < blocks; ++b)
          data_info.block(a * k, b * k, k, k) = working.m0(a, b) * working.gram;
      fit.coefficient_covariance = init.scale * h_inv * data_info * h_inv;
    }
    structure = EigenSystem{
        FunctionOnGrid(data.grid,
                       Eigen::VectorXd::Zero(p)),
        {}, Eigen::VectorXd(), Eigen::MatrixXd(), Eigen::VectorXd(),
        init.scale};
    sigma2 = init.scale;
    fit.converged = true;
  }

  fit.residual_structure = structure;
  fit.variance_components = structure.eigenvalues;
  fit.residual_noise_variance = sigma2;

  Eigen::Map<const Eigen::MatrixXd> theta_mat(fit.spline_coefficients.data(),
                                              k, blocks);
  Eigen::MatrixXd coef_funcs = basis.values * theta_mat;
  fit.coefficient_functions.reserve(blocks);
  for (int a = 0; a < blocks; ++a)
    fit.coefficient_functions.emplace_back(data.grid, coef_funcs.col(a));
  return fit;
}

namespace {

struct BandContext {
  Eigen::VectorXd s;
  Eigen::MatrixXd basis_rows;  // subgrid x K
  Eigen::VectorXd estimate;
  Eigen::VectorXd se;
  Eigen::MatrixXd cov_block;
  bool subsampled = false;
};

BandContext band_context(const FoSRFit& fit, int covariate) {
  check_coefficient_index(fit, covariate);
  const int k = fit.basis.n_basis;
  const Grid& grid = fit.basis.grid;
  const auto idx = band_subgrid(grid.size());

  BandContext ctx;
  ctx.subsampled = static_cast<Eigen::Index>(idx.size()) < grid.size();
  ctx.s.resize(idx.size());
  ctx.basis_rows.resize(idx.size(), k);
  ctx.estimate.resize(idx.size());
  const FunctionOnGrid& f =
      fit.coefficient_functions[static_cast<std::size_t>(covariate)];
  for (std::size_t j = 0; j < idx.size(); ++j) {
    ctx.s(j) = grid.points()(idx[j]);
    ctx.basis_rows.row(j) = fit.basis.values.row(idx[j]);
    ctx.estimate(j) = f.values()(idx[j]);
  }
  ctx.cov_block = fit.coefficient_covariance.block(covariate * k, covariate * k,
                                                   k, k);
  ctx.se = (ctx.basis_rows * ctx.cov_block)
               .cwiseProduct(ctx.basis_rows)
               .rowwise()
               .sum()
               .cwiseMax(0.0)
               .cwiseSqrt();
  return ctx;
}

}  // namespace

BandSet pointwise_band(const FoSRFit& fit, int covariate, double alpha) {
  BandContext ctx = band_context(fit, covariate);
  BandSet band;
  band.s = ctx.s;
  band.estimate = ctx.estimate;
  band.se = ctx.se;
  band.alpha = alpha;
  band.subsampled = ctx.subsampled;
  band.pointwise_multiplier = normal_quantile(1.0 - alpha / 2.0);
  band.pointwise_lower = ctx.estimate - band.pointwise_multiplier * ctx.se;
  band.pointwise_upper = ctx.estimate + band.pointwise_multiplier * ctx.se;
  return band;
}

MaxTCalibration calibrate_max_t(const Eigen::MatrixXd& coef_cov,
                                const Eigen::MatrixXd& basis_rows,
                                const Eigen::VectorXd& se,
                                const Eigen::VectorXd& estimate, double alpha,
                                int n_draws, Rng rng) {
  if (n_draws < 1) throw ConfigError("n_draws must be positive");
  const Eigen::Index k = coef_cov.rows();

  Eigen::MatrixXd sym = (coef_cov + coef_cov.transpose()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success)
    throw SingularSystemError("coefficient covariance eigendecomposition failed");
  const Eigen::VectorXd raw = solver.eigenvalues();
  const double scale = std::max(raw.cwiseAbs().maxCoeff(), 1e-300);
  if (raw.minCoeff() < -1e-6 * scale)
    throw SingularSystemError(
        "coefficient covariance is not positive semidefinite");
  Eigen::MatrixXd sampler =
      solver.eigenvectors() *
      raw.cwiseMax(0.0).cwiseSqrt().asDiagonal().toDenseMatrix();

  const Eigen::VectorXd safe_se = se.cwiseMax(1e-300);
  const double observed =
      (estimate.array().abs() / safe_se.array()).maxCoeff();

  Eigen::VectorXd z(k);
  Eigen::VectorXd max_stats(n_draws);
  for (int b = 0; b < n_draws; ++b) {
    for (Eigen::Index i = 0; i < k; ++i) z(i) = rng.normal();
    const Eigen::VectorXd curve = basis_rows * (sampler * z);
    max_stats(b) = (curve.array().abs() / safe_se.array()).maxCoeff();
  }

  MaxTCalibration out;
  out.global_p =
      static_cast<double>((max_stats.array() >= observed).count()) /
      static_cast<double>(n_draws);

  std::vector<double> sorted(max_stats.data(), max_stats.data() + n_draws);
  std::sort(sorted.begin(), sorted.end());
  const auto rank = static_cast<std::size_t>(std::clamp<long>(
      static_cast<long>(std::ceil((1.0 - alpha) * n_draws)) - 1, 0,
      static_cast<long>(n_draws) - 1));
  out.multiplier = sorted[rank];
  return out;
}

BandSet cma_band(const FoSRFit& fit, int covariate, double alpha, int n_draws,
                 std::uint64_t seed) {
  BandSet band = pointwise_band(fit, covariate, alpha);
  BandContext ctx = band_context(fit, covariate);
  MaxTCalibration cal =
      calibrate_max_t(ctx.cov_block, ctx.basis_rows, ctx.se, ctx.estimate,
                      alpha, n_draws, Rng(seed));
  // The max statistic dominates any single point, so the simultaneous
  // multiplier never drops below the pointwise one; clamp away MC noise.
  band.simultaneous_multiplier =
      std::max(cal.multiplier, band.pointwise_multiplier);
  band.global_p = cal.global_p;
  band.simultaneous_lower =
      band.estimate - band.simultaneous_multiplier * band.se;
  band.simultaneous_upper =
      band.estimate + band.simultaneous_multiplier * band.se;
  return band;
}

GlobalTest fosr_global_test(const FoSRFit& fit, int covariate, double alpha,
                            int n_draws, std::uint64_t seed) {
  BandSet band = cma_band(fit, covariate, alpha, n_draws, seed);
  return GlobalTest{band.global_p, band.global_p < alpha};
}

}  // namespace funreg
