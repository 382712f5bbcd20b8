#include "funreg/runs.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "funreg/analyze.hpp"
#include "funreg/csv.hpp"
#include "funreg/errors.hpp"
#include "funreg/fosr.hpp"
#include "funreg/fpca.hpp"
#include "funreg/ingest.hpp"
#include "funreg/power.hpp"
#include "funreg/rng.hpp"
#include "funreg/rpcs.hpp"
#include "funreg/synth.hpp"

#include "json.hpp"

namespace funreg::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json base_metadata(const std::string& command, const ConfigMap& config,
                   const GlobalOptions& options) {
  json meta;
  meta["command"] = command;
  meta["version"] = kVersion;
  meta["seed"] = options.seed;
  meta["alpha"] = options.alpha;
  json echo = json::object();
  for (const auto& [key, value] : config.entries()) echo[key] = value;
  meta["config"] = echo;
  return meta;
}

void write_metadata(const json& meta, const GlobalOptions& options) {
  fs::create_directories(options.out_dir);
  std::ofstream out(fs::path(options.out_dir) / "run_metadata.json");
  if (!out) throw IoError("cannot write run_metadata.json in " + options.out_dir);
  out << meta.dump(2) << '\n';
}

DatasetManifest manifest_from(const ConfigMap& config, bool covariates_required) {
  DatasetManifest manifest;
  manifest.functional_path = config.require_string("functional");
  manifest.covariates_path =
      covariates_required ? config.require_string("covariates")
                          : config.get_string("covariates", "");
  const std::string grid = config.get_string("grid", "auto");
  if (grid == "auto")
    manifest.grid = DatasetManifest::GridSpec::auto_detect;
  else if (grid == "headers")
    manifest.grid = DatasetManifest::GridSpec::headers;
  else if (grid == "uniform")
    manifest.grid = DatasetManifest::GridSpec::uniform;
  else
    throw ConfigError("grid must be auto, headers or uniform, got '" + grid +
                      "'");
  return manifest;
}

json ingest_metadata(const FunctionalDataset& data,
                     const IngestReport& report) {
  json meta;
  meta["n_subjects"] = data.n_subjects();
  meta["n_points"] = data.n_points();
  meta["grid_mapping"] = {{"offset", data.grid_offset},
                          {"scale", data.grid_scale}};
  meta["dropped_rows"] = report.dropped_rows;
  json mappings = json::array();
  for (const BinaryMapping& m : report.binary_mappings)
    mappings.push_back({{"column", m.column},
                        {"zero_level", m.zero_level},
                        {"one_level", m.one_level}});
  meta["binary_mappings"] = mappings;
  return meta;
}

void write_dataset_csv_pair(const FunctionalDataset& data,
                            const fs::path& dir) {
  {
    CsvFile file((dir / "functional.csv").string());
    std::vector<std::string> header = {"id"};
    for (Eigen::Index j = 0; j < data.n_points(); ++j)
      header.push_back(format_double(data.grid_offset +
                                     data.grid_scale * data.grid.points()(j)));
    file.write_row(header);
    for (Eigen::Index i = 0; i < data.n_subjects(); ++i) {
      std::vector<std::string> row = {data.ids[static_cast<std::size_t>(i)]};
      for (Eigen::Index j = 0; j < data.n_points(); ++j)
        row.push_back(format_double(data.response(i, j)));
      file.write_row(row);
    }
  }
  {
    CsvFile file((dir / "covariates.csv").string());
    std::vector<std::string> header = {"id"};
    for (const std::string& name : data.covariate_names)
      header.push_back(name);
    file.write_row(header);
    for (Eigen::Index i = 0; i < data.n_subjects(); ++i) {
      std::vector<std::string> row = {data.ids[static_cast<std::size_t>(i)]};
      for (Eigen::Index c = 0; c < data.n_covariates(); ++c)
        row.push_back(format_double(data.covariates(i, c)));
      file.write_row(row);
    }
  }
}

struct IdMatrix {
  std::vector<std::string> ids;
  std::vector<std::string> names;
  Eigen::MatrixXd values;
};

IdMatrix read_id_matrix(const std::string& path) {
  CsvTable table = read_csv(path);
  if (table.header.size() < 2)
    throw IngestError(path + ": need an id column and at least one value column");
  IdMatrix out;
  out.names.assign(table.header.begin() + 1, table.header.end());
  out.values.resize(static_cast<Eigen::Index>(table.rows.size()),
                    static_cast<Eigen::Index>(out.names.size()));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != table.header.size())
      throw IngestError(path + ":" + std::to_string(table.line_numbers[r]) +
                        ": ragged row");
    out.ids.push_back(table.rows[r][0]);
    for (std::size_t c = 0; c + 1 < table.header.size(); ++c)
      out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          parse_double_cell(table, r, c + 1);
  }
  return out;
}

}  // namespace

void run_simulate(const ConfigMap& config, const GlobalOptions& options) {
  config.require_known({"scenario", "n_subjects", "n_points", "d", "w",
                        "case_id", "lambda1", "eigenvalues", "sigma_eps",
                        "beta0"});
  const std::string scenario = config.get_string("scenario", "tm1");
  const int n_subjects =
      static_cast<int>(config.get_long("n_subjects", 300));
  const int n_points = static_cast<int>(config.get_long("n_points", 101));

  SyntheticDataset dataset;
  if (scenario == "tm1") {
    Tm1Config gen;
    gen.n_subjects = n_subjects;
    gen.grid = Grid::uniform(n_points);
    gen.d = config.get_double("d", 0.0);
    gen.w = config.get_double("w", 0.0);
    gen.lambda1 = config.get_double("lambda1", 0.5);
    gen.sigma_eps = config.get_double("sigma_eps", 0.5);
    gen.seed = options.seed;
    dataset = generate_tm1(gen);
  } else if (scenario == "tm2") {
    Tm2Config gen;
    gen.n_subjects = n_subjects;
    gen.grid = Grid::uniform(n_points);
    gen.d = config.get_double("d", 0.0);
    gen.w = config.get_double("w", 0.0);
    gen.case_id = static_cast<int>(config.get_long("case_id", 1));
    const auto ev = config.get_double_list("eigenvalues", {1.0, 0.5, 0.25, 0.125});
    if (ev.size() != 4)
      throw ConfigError("eigenvalues must list exactly 4 values");
    for (int l = 0; l < 4; ++l) gen.eigenvalues(l) = ev[static_cast<size_t>(l)];
    gen.sigma_eps = config.get_double("sigma_eps", 0.5);
    gen.beta0 = config.get_double("beta0", 0.0);
    gen.seed = options.seed;
    dataset = generate_tm2(gen);
  } else {
    throw ConfigError("scenario must be tm1 or tm2, got '" + scenario + "'");
  }

  fs::create_directories(options.out_dir);
  write_dataset_csv_pair(dataset.data, options.out_dir);
  write_metadata(base_metadata("simulate", config, options), options);
}

void run_fpca(const ConfigMap& config, const GlobalOptions& options) {
  config.require_known({"functional", "covariates", "grid", "n_components",
                        "pve", "smoothing", "smoothing_lambda"});
  IngestReport ingest_report;
  FunctionalDataset data =
      ingest(manifest_from(config, /*covariates_required=*/false),
             &ingest_report);

  FpcaOptions fpca_options;
  fpca_options.n_components =
      static_cast<int>(config.get_long("n_components", 0));
  fpca_options.pve_threshold = config.get_double("pve", 0.90);
  fpca_options.smooth_covariance = config.get_bool("smoothing", false);
  fpca_options.smoothing_lambda = config.get_double("smoothing_lambda", 1e-4);
  EigenSystem system = sign_align(fit_fpca(data, fpca_options));

  fs::create_directories(options.out_dir);
  const fs::path dir(options.out_dir);
  const int l_count = system.n_components();
  {
    CsvFile file((dir / "fpca_eigenvalues.csv").string());
    file.write_row({"component", "eigenvalue", "pve_cumulative"});
    for (int l = 0; l < l_count; ++l)
      file.write_row({std::to_string(l + 1), format_double(system.eigenvalues(l)),
                      format_double(system.pve(l))});
  }
  {
    CsvFile file((dir / "fpca_eigenfunctions.csv").string());
    std::vector<std::string> header = {"s", "mean"};
    for (int l = 1; l <= l_count; ++l) header.push_back("phi_" + std::to_string(l));
    file.write_row(header);
    for (Eigen::Index j = 0; j < data.n_points(); ++j) {
      std::vector<std::string> row = {
          format_double(data.grid_offset + data.grid_scale * data.grid.points()(j)),
          format_double(system.mean.values()(j))};
      for (int l = 0; l < l_count; ++l)
        row.push_back(format_double(
            system.eigenfunctions[static_cast<std::size_t>(l)].values()(j)));
      file.write_row(row);
    }
  }
  {
    CsvFile file((dir / "fpca_scores.csv").string());
    std::vector<std::string> header = {"id"};
    for (int l = 1; l <= l_count; ++l) header.push_back("xi_" + std::to_string(l));
    file.write_row(header);
    for (Eigen::Index i = 0; i < data.n_subjects(); ++i) {
      std::vector<std::string> row = {data.ids[static_cast<std::size_t>(i)]};
      for (int l = 0; l < l_count; ++l)
        row.push_back(format_double(system.scores(i, l)));
      file.write_row(row);
    }
  }

  json meta = base_metadata("fpca", config, options);
  meta["ingest"] = ingest_metadata(data, ingest_report);
  meta["residual_variance"] = system.residual_variance;
  write_metadata(meta, options);
}

void run_rpcs(const ConfigMap& config, const GlobalOptions& options) {
  config.require_known({"scores", "covariates", "eigenfunctions",
                        "bonferroni_selection"});
  IdMatrix scores = read_id_matrix(config.require_string("scores"));
  IdMatrix covariates = read_id_matrix(config.require_string("covariates"));

  // Covariate rows are matched to the score rows by id.
  std::map<std::string, Eigen::Index> covariate_row;
  for (std::size_t i = 0; i < covariates.ids.size(); ++i)
    covariate_row[covariates.ids[i]] = static_cast<Eigen::Index>(i);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(scores.ids.size()),
                    covariates.values.cols());
  for (std::size_t i = 0; i < scores.ids.size(); ++i) {
    auto it = covariate_row.find(scores.ids[i]);
    if (it == covariate_row.end())
      throw IngestError("covariates file is missing id '" + scores.ids[i] +
                        "'");
    x.row(static_cast<Eigen::Index>(i)) = covariates.values.row(it->second);
  }

  RPCSFit fit = rpcs_regress(scores.values, x);

  fs::create_directories(options.out_dir);
  const fs::path dir(options.out_dir);
  {
    CsvFile file((dir / "rpcs_fit.csv").string());
    file.write_row({"component", "covariate", "estimate", "se", "t", "p"});
    for (Eigen::Index l = 0; l < fit.n_components; ++l)
      for (Eigen::Index c = 0; c <= fit.n_covariates; ++c) {
        const std::string name =
            c == 0 ? "intercept" : covariates.names[c - 1];
        file.write_row({std::to_string(l + 1), name,
                        format_double(fit.slopes(l, c)),
                        format_double(fit.standard_errors(l, c)),
                        format_double(fit.t_statistics(l, c)),
                        format_double(fit.p_values(l, c))});
      }
  }
  {
    json tests = json::object();
    tests["alpha"] = options.alpha;
    tests["tests"] = json::array();
    for (int q = 1; q <= fit.n_covariates; ++q) {
      JointTestResult none =
          rpcs_joint_test(fit, q, options.alpha, Correction::none);
      JointTestResult bonf =
          rpcs_joint_test(fit, q, options.alpha, Correction::bonferroni);
      json entry;
      entry["covariate"] = covariates.names[q - 1];
      entry["component_p_values"] = std::vector<double>(
          none.component_p_values.data(),
          none.component_p_values.data() + none.component_p_values.size());
      entry["none"] = {{"global_p", none.global_p}, {"reject", none.reject}};
      entry["bonferroni"] = {{"global_p", bonf.global_p},
                             {"reject", bonf.reject}};
      tests["tests"].push_back(entry);
    }
    std::ofstream out(dir / "rpcs_joint_tests.json");
    if (!out) throw IoError("cannot write rpcs_joint_tests.json");
    out << tests.dump(2) << '\n';
  }

  if (config.has("eigenfunctions")) {
    CsvTable table = read_csv(config.require_string("eigenfunctions"));
    if (table.header.size() < 3 || table.header[0] != "s" ||
        table.header[1] != "mean")
      throw IngestError(table.path +
                        ": expected header s, mean, phi_1, ... phi_L");
    const Eigen::Index p = static_cast<Eigen::Index>(table.rows.size());
    const int l_count = static_cast<int>(table.header.size()) - 2;
    Eigen::VectorXd raw(p), mean(p);
    Eigen::MatrixXd phis(p, l_count);
    for (Eigen::Index j = 0; j < p; ++j) {
      raw(j) = parse_double_cell(table, j, 0);
      mean(j) = parse_double_cell(table, j, 1);
      for (int l = 0; l < l_count; ++l)
        phis(j, l) = parse_double_cell(table, j, l + 2);
    }
    const double offset = raw(0);
    const double span = raw(p - 1) - raw(0);
    Grid grid(span == 1.0 && offset == 0.0
                  ? raw
                  : ((raw.array() - offset) / span).matrix().eval());
    EigenSystem system{FunctionOnGrid(grid, mean), {}, Eigen::VectorXd::Zero(l_count),
                       Eigen::MatrixXd(), Eigen::VectorXd::Zero(l_count), 0.0};
    for (int l = 0; l < l_count; ++l)
      system.eigenfunctions.emplace_back(grid, phis.col(l));

    const bool bonferroni_selection =
        config.get_bool("bonferroni_selection", false);
    for (int q = 1; q <= fit.n_covariates; ++q) {
      ReconstructedEffect all = reconstruct_effect(
          fit, system, q, ReconstructionMode::all, options.alpha);
      ReconstructedEffect sig =
          reconstruct_effect(fit, system, q, ReconstructionMode::significant,
                             options.alpha, bonferroni_selection);
      CsvFile file(
          (dir / ("reconstruction_" + sanitize_name(covariates.names[q - 1]) +
                  ".csv"))
              .string());
      file.write_row({"s", "rpcs_all", "rpcs_significant"});
      for (Eigen::Index j = 0; j < p; ++j)
        file.write_row({format_double(raw(j)),
                        format_double(all.effect.values()(j)),
                        format_double(sig.effect.values()(j))});
    }
  }

  write_metadata(base_metadata("rpcs", config, options), options);
}

void run_fosr(const ConfigMap& config, const GlobalOptions& options) {
  config.require_known({"functional", "covariates", "grid", "n_basis",
                        "residual_components", "residual_pve", "n_draws"});
  IngestReport ingest_report;
  FunctionalDataset data =
      ingest(manifest_from(config, /*covariates_required=*/true),
             &ingest_report);

  FosrOptions fosr_options;
  fosr_options.n_basis = static_cast<int>(config.get_long("n_basis", 30));
  fosr_options.residual_components =
      static_cast<int>(config.get_long("residual_components", 0));
  fosr_options.residual_pve = config.get_double("residual_pve", 0.90);
  FoSRFit fit = fit_fosr(data, fosr_options);

  const int n_draws = static_cast<int>(config.get_long("n_draws", 10000));
  const Rng seeds(options.seed);

  fs::create_directories(options.out_dir);
  const fs::path dir(options.out_dir);
  json global = json::object();
  global["alpha"] = options.alpha;
  global["covariates"] = json::array();
  for (int q = 1; q <= data.n_covariates(); ++q) {
    BandSet band =
        cma_band(fit, q, options.alpha, n_draws, seeds.child(q).next_u64());
    CsvFile file(
        (dir / ("fosr_bands_" +
                sanitize_name(data.covariate_names[q - 1]) + ".csv"))
            .string());
    file.write_row({"s", "estimate", "pw_lo", "pw_hi", "cma_lo", "cma_hi"});
    for (Eigen::Index j = 0; j < band.s.size(); ++j)
      file.write_row({format_double(data.grid_offset +
                                    data.grid_scale * band.s(j)),
                      format_double(band.estimate(j)),
                      format_double(band.pointwise_lower(j)),
                      format_double(band.pointwise_upper(j)),
                      format_double(band.simultaneous_lower(j)),
                      format_double(band.simultaneous_upper(j))});
    global["covariates"].push_back(
        {{"covariate", data.covariate_names[q - 1]},
         {"global_p", band.global_p},
         {"reject", band.global_p < options.alpha},
         {"simultaneous_multiplier", band.simultaneous_multiplier},
         {"band_subsampled", band.subsampled}});
  }
  global["variance_components"] = std::vector<double>(
      fit.variance_components.data(),
      fit.variance_components.data() + fit.variance_components.size());
  global["residual_noise_variance"] = fit.residual_noise_variance;
  global["convergence"] = {{"iterations", fit.iterations},
                           {"last_rel_change", fit.last_rel_change},
                           {"converged", fit.converged}};
  {
    std::ofstream out(dir / "fosr_global.json");
    if (!out) throw IoError("cannot write fosr_global.json");
    out << global.dump(2) << '\n';
  }

  json meta = base_metadata("fosr", config, options);
  meta["ingest"] = ingest_metadata(data, ingest_report);
  write_metadata(meta, options);
}

void run_power(const ConfigMap& config, const GlobalOptions& options) {
  config.require_known({"scenario", "cases", "d_values", "w_values",
                        "n_replicates", "n_subjects", "n_points", "sigma_eps",
                        "lambda1", "eigenvalues", "methods", "n_basis",
                        "n_cma_draws", "matched_components", "selection_pve"});
  PowerStudyConfig study;
  const std::string scenario = config.get_string("scenario", "tm1");
  if (scenario == "tm1")
    study.scenario = Scenario::tm1;
  else if (scenario == "tm2")
    study.scenario = Scenario::tm2;
  else
    throw ConfigError("scenario must be tm1 or tm2, got '" + scenario + "'");

  study.cases.clear();
  for (long c : config.get_long_list("cases", {1}))
    study.cases.push_back(static_cast<int>(c));
  study.d_values = config.get_double_list("d_values", study.d_values);
  study.w_values = config.get_double_list("w_values", study.w_values);
  study.n_replicates =
      static_cast<int>(config.get_long("n_replicates", 1000));
  study.alpha = options.alpha;
  study.n_subjects = static_cast<int>(config.get_long("n_subjects", 300));
  study.n_points = static_cast<int>(config.get_long("n_points", 101));
  study.sigma_eps = config.get_double("sigma_eps", 0.5);
  study.lambda1 = config.get_double("lambda1", 0.5);
  const auto ev = config.get_double_list("eigenvalues", {1.0, 0.5, 0.25, 0.125});
  if (ev.size() != 4) throw ConfigError("eigenvalues must list exactly 4 values");
  for (int l = 0; l < 4; ++l) study.eigenvalues(l) = ev[static_cast<size_t>(l)];
  if (config.has("methods")) {
    study.methods.clear();
    std::istringstream in(config.require_string("methods"));
    std::string item;
    while (std::getline(in, item, ',')) {
      const auto a = item.find_first_not_of(" \t");
      const auto b = item.find_last_not_of(" \t");
      const std::string trimmed =
          a == std::string::npos ? "" : item.substr(a, b - a + 1);
      if (trimmed == "fosr")
        study.methods.push_back(Method::fosr);
      else if (trimmed == "rpcs_none")
        study.methods.push_back(Method::rpcs_none);
      else if (trimmed == "rpcs_bonferroni")
        study.methods.push_back(Method::rpcs_bonferroni);
      else
        throw ConfigError("unknown method '" + trimmed + "'");
    }
  }
  study.base_seed = options.seed;
  study.threads = options.threads;
  study.n_basis = static_cast<int>(config.get_long("n_basis", 30));
  study.n_cma_draws = static_cast<int>(config.get_long("n_cma_draws", 2000));
  study.matched_components = config.get_bool("matched_components", true);
  study.selection_pve = config.get_double("selection_pve", 0.90);

  PowerTable table = run_power_study(study);

  fs::create_directories(options.out_dir);
  const fs::path dir(options.out_dir);
  {
    CsvFile file((dir / "power_table.csv").string());
    file.write_row({"scenario", "case", "d", "w", "method", "target",
                    "rejections", "n_effective", "n_failed", "power", "mc_se"});
    for (const PowerCell& cell : table.rows)
      file.write_row({to_string(cell.scenario), std::to_string(cell.case_id),
                      format_double(cell.d), format_double(cell.w),
                      to_string(cell.method), std::to_string(cell.target),
                      std::to_string(cell.rejections),
                      std::to_string(cell.n_effective),
                      std::to_string(cell.n_failed), format_double(cell.power),
                      format_double(cell.mc_se)});
  }
  {
    // Long-format plot data: one row per curve point, x = d.
    CsvFile file((dir / "power_curves.csv").string());
    file.write_row(
        {"scenario", "case", "w", "method", "target", "d", "power", "mc_se"});
    for (const PowerCell& cell : table.rows)
      file.write_row({to_string(cell.scenario), std::to_string(cell.case_id),
                      format_double(cell.w), to_string(cell.method),
                      std::to_string(cell.target), format_double(cell.d),
                      format_double(cell.power), format_double(cell.mc_se)});
  }

  write_metadata(base_metadata("power", config, options), options);
}

void run_analyze(const ConfigMap& config, const GlobalOptions& options) {
  config.require_known({"functional", "covariates", "grid", "n_components",
                        "pve", "smoothing", "n_basis", "residual_components",
                        "n_draws"});
  IngestReport ingest_report;
  FunctionalDataset data =
      ingest(manifest_from(config, /*covariates_required=*/true),
             &ingest_report);

  AnalyzeOptions analyze_options;
  analyze_options.n_components =
      static_cast<int>(config.get_long("n_components", 0));
  analyze_options.pve_threshold = config.get_double("pve", 0.90);
  analyze_options.smooth_covariance = config.get_bool("smoothing", false);
  analyze_options.n_basis = static_cast<int>(config.get_long("n_basis", 30));
  analyze_options.residual_components =
      static_cast<int>(config.get_long("residual_components", 0));
  analyze_options.n_draws = static_cast<int>(config.get_long("n_draws", 10000));
  analyze_options.alpha = options.alpha;
  analyze_options.seed = options.seed;

  AnalysisReport report = analyze(data, analyze_options);

  json meta = base_metadata("analyze", config, options);
  meta["ingest"] = ingest_metadata(data, ingest_report);
  emit(report, options.out_dir, meta.dump(2));
}

}  // namespace funreg::cli
