#include "funreg/analyze.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>

#include "funreg/csv.hpp"
#include "funreg/errors.hpp"
#include "funreg/rng.hpp"

#include "json.hpp"

namespace funreg {

AnalysisReport analyze(const FunctionalDataset& data,
                       const AnalyzeOptions& options) {
  if (data.n_covariates() < 1)
    throw ConfigError("analyze needs at least one covariate");

  AnalysisReport report;
  report.grid = data.grid;
  report.grid_offset = data.grid_offset;
  report.grid_scale = data.grid_scale;
  report.covariate_names = data.covariate_names;
  report.alpha = options.alpha;

  FpcaOptions fpca_options;
  fpca_options.n_components = options.n_components;
  fpca_options.pve_threshold = options.pve_threshold;
  fpca_options.smooth_covariance = options.smooth_covariance;
  report.fpca = sign_align(fit_fpca(data, fpca_options));

  report.rpcs = rpcs_regress(report.fpca.scores, data.covariates);

  const int q_count = static_cast<int>(data.n_covariates());
  for (int q = 1; q <= q_count; ++q) {
    report.joint_none.push_back(
        rpcs_joint_test(report.rpcs, q, options.alpha, Correction::none));
    report.joint_bonferroni.push_back(
        rpcs_joint_test(report.rpcs, q, options.alpha, Correction::bonferroni));
  }

  FosrOptions fosr_options;
  fosr_options.n_basis = options.n_basis;
  fosr_options.residual_components = options.residual_components;
  fosr_options.residual_pve = options.pve_threshold;
  report.fosr = fit_fosr(data, fosr_options);

  const Rng seeds(options.seed);
  for (int q = 1; q <= q_count; ++q)
    report.bands.push_back(cma_band(report.fosr, q, options.alpha,
                                    options.n_draws,
                                    seeds.child(q).next_u64()));

  const int l_count = report.fpca.n_components();
  report.correlations.resize(q_count, l_count);
  for (int q = 1; q <= q_count; ++q)
    for (int l = 0; l < l_count; ++l)
      report.correlations(q - 1, l) = l2_correlation(
          report.fosr.coefficient_functions[static_cast<std::size_t>(q)],
          report.fpca.eigenfunctions[static_cast<std::size_t>(l)]);

  for (int q = 1; q <= q_count; ++q) {
    report.reconstruction_all.push_back(reconstruct_effect(
        report.rpcs, report.fpca, q, ReconstructionMode::all, options.alpha));
    report.reconstruction_significant.push_back(
        reconstruct_effect(report.rpcs, report.fpca, q,
                           ReconstructionMode::significant, options.alpha));
  }
  return report;
}

std::string sanitize_name(const std::string& name) {
  std::string out;
  for (char c : name)
    out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return out.empty() ? "_" : out;
}

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string original_s(const AnalysisReport& report, double unit_s) {
  return format_double(report.grid_offset + report.grid_scale * unit_s);
}

void write_json_file(const fs::path& path, const json& value) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << value.dump(2) << '\n';
}

}  // namespace

void emit(const AnalysisReport& report, const std::string& out_dir,
          const std::string& metadata_json) {
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  const int l_count = report.fpca.n_components();
  const int q_count = static_cast<int>(report.covariate_names.size());

  {
    CsvFile file((dir / "fpca_eigenvalues.csv").string());
    file.write_row({"component", "eigenvalue", "pve_cumulative"});
    for (int l = 0; l < l_count; ++l)
      file.write_row({std::to_string(l + 1),
                      format_double(report.fpca.eigenvalues(l)),
                      format_double(report.fpca.pve(l))});
  }

  {
    CsvFile file((dir / "fpca_eigenfunctions.csv").string());
    std::vector<std::string> header = {"s", "mean"};
    for (int l = 1; l <= l_count; ++l) header.push_back("phi_" + std::to_string(l));
    file.write_row(header);
    for (Eigen::Index j = 0; j < report.grid.size(); ++j) {
      std::vector<std::string> row = {original_s(report, report.grid.points()(j)),
                                      format_double(report.fpca.mean.values()(j))};
      for (int l = 0; l < l_count; ++l)
        row.push_back(format_double(
            report.fpca.eigenfunctions[static_cast<std::size_t>(l)].values()(j)));
      file.write_row(row);
    }
  }

  {
    CsvFile file((dir / "rpcs_fit.csv").string());
    file.write_row({"component", "covariate", "estimate", "se", "t", "p"});
    for (Eigen::Index l = 0; l < report.rpcs.n_components; ++l)
      for (Eigen::Index c = 0; c <= report.rpcs.n_covariates; ++c) {
        const std::string name =
            c == 0 ? "intercept" : report.covariate_names[c - 1];
        file.write_row({std::to_string(l + 1), name,
                        format_double(report.rpcs.slopes(l, c)),
                        format_double(report.rpcs.standard_errors(l, c)),
                        format_double(report.rpcs.t_statistics(l, c)),
                        format_double(report.rpcs.p_values(l, c))});
      }
  }

  {
    json tests = json::object();
    tests["alpha"] = report.alpha;
    tests["tests"] = json::array();
    for (int q = 1; q <= q_count; ++q) {
      const JointTestResult& none = report.joint_none[q - 1];
      const JointTestResult& bonf = report.joint_bonferroni[q - 1];
      json entry;
      entry["covariate"] = report.covariate_names[q - 1];
      entry["component_p_values"] = std::vector<double>(
          none.component_p_values.data(),
          none.component_p_values.data() + none.component_p_values.size());
      entry["none"] = {{"global_p", none.global_p}, {"reject", none.reject}};
      entry["bonferroni"] = {{"global_p", bonf.global_p},
                             {"reject", bonf.reject}};
      tests["tests"].push_back(entry);
    }
    write_json_file(dir / "rpcs_joint_tests.json", tests);
  }

  for (int q = 1; q <= q_count; ++q) {
    const BandSet& band = report.bands[q - 1];
    CsvFile file(
        (dir / ("fosr_bands_" + sanitize_name(report.covariate_names[q - 1]) +
                ".csv"))
            .string());
    file.write_row({"s", "estimate", "pw_lo", "pw_hi", "cma_lo", "cma_hi"});
    for (Eigen::Index j = 0; j < band.s.size(); ++j)
      file.write_row({original_s(report, band.s(j)),
                      format_double(band.estimate(j)),
                      format_double(band.pointwise_lower(j)),
                      format_double(band.pointwise_upper(j)),
                      format_double(band.simultaneous_lower(j)),
                      format_double(band.simultaneous_upper(j))});
  }

  {
    json global = json::object();
    global["alpha"] = report.alpha;
    global["covariates"] = json::array();
    for (int q = 1; q <= q_count; ++q) {
      const BandSet& band = report.bands[q - 1];
      global["covariates"].push_back(
          {{"covariate", report.covariate_names[q - 1]},
           {"global_p", band.global_p},
           {"reject", band.global_p < report.alpha},
           {"simultaneous_multiplier", band.simultaneous_multiplier},
           {"band_subsampled", band.subsampled}});
    }
    global["variance_components"] = std::vector<double>(
        report.fosr.variance_components.data(),
        report.fosr.variance_components.data() +
            report.fosr.variance_components.size());
    global["residual_noise_variance"] = report.fosr.residual_noise_variance;
    global["convergence"] = {{"iterations", report.fosr.iterations},
                             {"last_rel_change", report.fosr.last_rel_change},
                             {"converged", report.fosr.converged}};
    global["smoothing_parameters"] = std::vector<double>(
        report.fosr.smoothing_parameters.data(),
        report.fosr.smoothing_parameters.data() +
            report.fosr.smoothing_parameters.size());
    write_json_file(dir / "fosr_global.json", global);
  }

  {
    CsvFile file((dir / "correlations.csv").string());
    std::vector<std::string> header = {"covariate"};
    for (int l = 1; l <= l_count; ++l) header.push_back("phi_" + std::to_string(l));
    file.write_row(header);
    for (int q = 1; q <= q_count; ++q) {
      std::vector<std::string> row = {report.covariate_names[q - 1]};
      for (int l = 0; l < l_count; ++l)
        row.push_back(format_double(report.correlations(q - 1, l)));
      file.write_row(row);
    }
  }

  for (int q = 1; q <= q_count; ++q) {
    CsvFile file(
        (dir / ("reconstruction_" +
                sanitize_name(report.covariate_names[q - 1]) + ".csv"))
            .string());
    file.write_row({"s", "fosr", "rpcs_all", "rpcs_significant"});
    const auto& fosr_curve =
        report.fosr.coefficient_functions[static_cast<std::size_t>(q)];
    for (Eigen::Index j = 0; j < report.grid.size(); ++j)
      file.write_row(
          {original_s(report, report.grid.points()(j)),
           format_double(fosr_curve.values()(j)),
           format_double(report.reconstruction_all[q - 1].effect.values()(j)),
           format_double(
               report.reconstruction_significant[q - 1].effect.values()(j))});
  }

  {
    std::ofstream out(dir / "run_metadata.json");
    if (!out) throw IoError("cannot write run_metadata.json in " + out_dir);
    out << metadata_json;
    if (metadata_json.empty() || metadata_json.back() != '\n') out << '\n';
  }
}

}  // namespace funreg
