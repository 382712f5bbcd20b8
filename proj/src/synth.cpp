#include "funreg/synth.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "funreg/errors.hpp"
#include "funreg/rng.hpp"

namespace funreg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const double kSqrt2 = std::sqrt(2.0);

// Substream ids within a generator seed.
enum Stream : std::uint64_t {
  kCovariates = 1,
  kScores = 2,
  kNoise = 3,
};

Eigen::MatrixXd draw_uniform_matrix(Rng rng, Eigen::Index rows,
                                    Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.uniform();
  return m;
}

Eigen::MatrixXd draw_normal_matrix(Rng rng, Eigen::Index rows,
                                   Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.normal();
  return m;
}

std::vector<std::string> numbered_ids(int n) {
  std::vector<std::string> ids;
  ids.reserve(n);
  for (int i = 1; i <= n; ++i) ids.push_back(std::to_string(i));
  return ids;
}

}  // namespace

FunctionOnGrid fourier_eigenfunction(int index, const Grid& grid) {
  if (index < 1 || index > 4)
    throw ConfigError("fourier eigenfunction index must be in 1..4, got " +
                      std::to_string(index));
  const auto& s = grid.points();
  Eigen::VectorXd v(s.size());
  switch (index) {
    case 1: v = (kTwoPi * s.array()).sin() * kSqrt2; break;
    case 2: v = (kTwoPi * s.array()).cos() * kSqrt2; break;
    case 3: v = (2.0 * kTwoPi * s.array()).sin() * kSqrt2; break;
    case 4: v = (2.0 * kTwoPi * s.array()).cos() * kSqrt2; break;
  }
  return FunctionOnGrid(grid, std::move(v));
}

FunctionOnGrid beta_tm1(double d, double w, const Grid& grid) {
  if (d < 0.0) throw ConfigError("effect size d must be nonnegative");
  if (w < 0.0 || w > 1.0) throw ConfigError("weight w must lie in [0, 1]");
  const auto& s = grid.points();
  Eigen::VectorXd v =
      d * (w + (1.0 - w) * kSqrt2 * (kTwoPi * s.array()).sin());
  return FunctionOnGrid(grid, std::move(v));
}

std::pair<FunctionOnGrid, FunctionOnGrid> beta_pair_tm2(int case_id, double d,
                                                        double w,
                                                        const Grid& grid) {
  if (case_id < 1 || case_id > 6)
    throw ConfigError("TM2 case id must be in 1..6, got " +
                      std::to_string(case_id));
  if (d < 0.0) throw ConfigError("effect size d must be nonnegative");
  if (w < 0.0 || w > 1.0) throw ConfigError("weight w must lie in [0, 1]");

  const auto& s = grid.points();
  Eigen::VectorXd beta1;
  if (case_id <= 3)
    beta1 = Eigen::VectorXd::Constant(s.size(), d);
  else
    beta1 = d * kSqrt2 * (kTwoPi * s.array()).sin();

  const int f2_multiple = ((case_id - 1) % 3) + 1;  // sin(2 pi s * multiple)
  Eigen::VectorXd f2 =
      kSqrt2 * (static_cast<double>(f2_multiple) * kTwoPi * s.array()).sin();
  Eigen::VectorXd beta2 = d * (w + (1.0 - w) * f2.array());

  return {FunctionOnGrid(grid, std::move(beta1)),
          FunctionOnGrid(grid, std::move(beta2))};
}

SyntheticDataset generate_tm1(const Tm1Config& config) {
  if (config.n_subjects < 1) throw ConfigError("n_subjects must be positive");
  if (config.lambda1 <= 0.0) throw ConfigError("lambda1 must be positive");
  if (config.sigma_eps < 0.0) throw ConfigError("sigma_eps must be nonnegative");

  const int n = config.n_subjects;
  const Grid& grid = config.grid;
  const Eigen::Index p = grid.size();
  const Rng root(config.seed);

  FunctionOnGrid beta = beta_tm1(config.d, config.w, grid);
  FunctionOnGrid phi1 = fourier_eigenfunction(1, grid);

  Eigen::MatrixXd x = draw_uniform_matrix(root.child(kCovariates), n, 1);
  Eigen::MatrixXd scores =
      draw_normal_matrix(root.child(kScores), n, 1) * std::sqrt(config.lambda1);
  Eigen::MatrixXd noise =
      draw_normal_matrix(root.child(kNoise), n, p) * config.sigma_eps;

  SyntheticDataset out{
      FunctionalDataset{grid,
                        x * beta.values().transpose() +
                            scores * phi1.values().transpose() + noise,
                        x,
                        numbered_ids(n),
                        {"x1"}},
      {beta},
      {phi1},
      scores,
      noise,
      0.0};
  return out;
}

SyntheticDataset generate_tm2(const Tm2Config& config) {
  if (config.n_subjects < 1) throw ConfigError("n_subjects must be positive");
  if ((config.eigenvalues.array() <= 0.0).any())
    throw ConfigError("eigenvalues must be positive");
  for (int l = 1; l < 4; ++l)
    if (!(config.eigenvalues(l) < config.eigenvalues(l - 1)))
      throw ConfigError("eigenvalues must be strictly decreasing");
  if (config.sigma_eps < 0.0) throw ConfigError("sigma_eps must be nonnegative");

  const int n = config.n_subjects;
  const Grid& grid = config.grid;
  const Eigen::Index p = grid.size();
  const Rng root(config.seed);

  auto [beta1, beta2] = beta_pair_tm2(config.case_id, config.d, config.w, grid);

  std::vector<FunctionOnGrid> phis;
  Eigen::MatrixXd phi_values(p, 4);
  for (int l = 1; l <= 4; ++l) {
    phis.push_back(fourier_eigenfunction(l, grid));
    phi_values.col(l - 1) = phis.back().values();
  }

  Eigen::MatrixXd x = draw_uniform_matrix(root.child(kCovariates), n, 2);
  Eigen::MatrixXd scores = draw_normal_matrix(root.child(kScores), n, 4);
  for (int l = 0; l < 4; ++l)
    scores.col(l) *= std::sqrt(config.eigenvalues(l));
  Eigen::MatrixXd noise =
      draw_normal_matrix(root.child(kNoise), n, p) * config.sigma_eps;

  Eigen::MatrixXd beta_values(p, 2);
  beta_values.col(0) = beta1.values();
  beta_values.col(1) = beta2.values();

  SyntheticDataset out{
      FunctionalDataset{grid,
                        (x * beta_values.transpose() +
                         scores * phi_values.transpose() + noise)
                                .array() +
                            config.beta0,
                        x,
                        numbered_ids(n),
                        {"x1", "x2"}},
      {beta1, beta2},
      std::move(phis),
      scores,
      noise,
      config.beta0};
  return out;
}

}  // namespace funreg
