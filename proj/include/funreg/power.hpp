#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "funreg/synth.hpp"

namespace funreg {

enum class Scenario { tm1, tm2 };
enum class Method { fosr = 0, rpcs_none = 1, rpcs_bonferroni = 2 };

std::string to_string(Scenario s);
std::string to_string(Method m);

struct PowerStudyConfig {
  Scenario scenario = Scenario::tm1;
  std::vector<int> cases = {0};  // ignored for TM1
  std::vector<double> d_values = {0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> w_values = {0.0, 0.5, 1.0};
  int n_replicates = 1000;
  double alpha = 0.05;
  int n_subjects = 300;
  int n_points = 101;
  double sigma_eps = 0.5;
  double lambda1 = 0.5;  // TM1
  Eigen::Vector4d eigenvalues{1.0, 0.5, 0.25, 0.125};  // TM2
  std::vector<Method> methods = {Method::fosr, Method::rpcs_none,
                                 Method::rpcs_bonferroni};
  std::uint64_t base_seed = 0;
  int threads = 1;
  int n_basis = 30;
  int n_cma_draws = 2000;
  // Matched component counts (1 for TM1, 4 for TM2) isolate projection
  // loss; switching this off selects by pve for sensitivity runs.
  bool matched_components = true;
  double selection_pve = 0.90;
};

// One long-format cell of the study.
struct PowerCell {
  Scenario scenario;
  int case_id;
  double d;
  double w;
  Method method;
  int target;  // covariate index, 1-based
  long rejections = 0;
  long n_effective = 0;
  long n_failed = 0;
  double power = 0.0;
  double mc_se = 0.0;
};

struct PowerTable {
  std::vector<PowerCell> rows;
};

// Reject flags per method and target: 1 reject, 0 accept, -1 fit failure.
struct ReplicateFlags {
  std::array<std::array<int8_t, 2>, 3> v{};
};

ReplicateFlags run_replicate(const PowerStudyConfig& config, int case_id,
                             double d, double w, std::uint64_t replicate_seed);

PowerTable run_power_study(const PowerStudyConfig& config);

struct SummaryRow {
  std::vector<std::string> key;  // values of the grouped dimensions
  long rejections = 0;
  long n_effective = 0;
  long n_failed = 0;
  double power = 0.0;
  double mc_se = 0.0;
};

// A power-in-d decrease beyond Monte Carlo noise within one curve.
struct MonotonicityDip {
  Scenario scenario;
  int case_id;
  double w;
  Method method;
  int target;
  double d_low, d_high;
  double drop;      // power(d_low) - power(d_high), positive
  double joint_se;  // sqrt(se_low^2 + se_high^2)
};

struct PowerSummary {
  std::vector<std::string> by;
  std::vector<SummaryRow> rows;
  std::vector<MonotonicityDip> dips;
};

// Groups cells over the named dimensions (subset of scenario, case, d, w,
// method, target) pooling rejection counts, and flags dips in power as d
// grows larger than 3 joint MC standard errors.
PowerSummary summarize(const PowerTable& table,
                       const std::vector<std::string>& by);

}  // namespace funreg
