#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "funreg/dataset.hpp"
#include "funreg/fosr.hpp"
#include "funreg/fpca.hpp"
#include "funreg/rpcs.hpp"

namespace funreg {

struct AnalyzeOptions {
  // FPCA / RPCS component selection (0 -> pve threshold).
  int n_components = 0;
  double pve_threshold = 0.90;
  bool smooth_covariance = false;
  // FoSR controls. Residual selection defaults to the same pve threshold.
  int n_basis = 30;
  int residual_components = 0;
  int n_draws = 10000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
};

// The full comparison pipeline on one dataset: FPCA, per-component score
// regressions with joint tests under both corrections, the FoSR fit with
// pointwise and simultaneous bands plus global tests, the Q x L table of
// correlations between FoSR effects and eigenfunctions, and the dual
// RPCS reconstructions next to the FoSR estimate.
struct AnalysisReport {
  Grid grid;
  double grid_offset = 0.0;
  double grid_scale = 1.0;
  std::vector<std::string> covariate_names;
  double alpha = 0.05;

  EigenSystem fpca;
  RPCSFit rpcs;
  std::vector<JointTestResult> joint_none;        // per covariate
  std::vector<JointTestResult> joint_bonferroni;  // per covariate

  FoSRFit fosr;
  std::vector<BandSet> bands;  // per covariate

  Eigen::MatrixXd correlations;  // Q x L

  std::vector<ReconstructedEffect> reconstruction_all;
  std::vector<ReconstructedEffect> reconstruction_significant;
};

AnalysisReport analyze(const FunctionalDataset& data,
                       const AnalyzeOptions& options = {});

// Writes the fixed file layout (fpca_eigenvalues.csv,
// fpca_eigenfunctions.csv, rpcs_fit.csv, rpcs_joint_tests.json,
// fosr_bands_<covariate>.csv, fosr_global.json, correlations.csv,
// reconstruction_<covariate>.csv, run_metadata.json). metadata_json is the
// caller's run description, already serialized.
void emit(const AnalysisReport& report, const std::string& out_dir,
          const std::string& metadata_json);

std::string sanitize_name(const std::string& name);

}  // namespace funreg
