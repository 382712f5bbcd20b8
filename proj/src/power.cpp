#include "funreg/power.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <thread>
#include <tuple>

#include "funreg/errors.hpp"
#include "funreg/fosr.hpp"
#include "funreg/fpca.hpp"
#include "funreg/rng.hpp"
#include "funreg/rpcs.hpp"

namespace funreg {

std::string to_string(Scenario s) {
  return s == Scenario::tm1 ? "tm1" : "tm2";
}

std::string to_string(Method m) {
  switch (m) {
    case Method::fosr: return "fosr";
    case Method::rpcs_none: return "rpcs_none";
    case Method::rpcs_bonferroni: return "rpcs_bonferroni";
  }
  return "?";
}

namespace {

// Substreams within one replicate seed.
enum ReplicateStream : std::uint64_t {
  kGenerator = 1,
  kCmaBase = 100,  // + covariate index
};

bool uses(const PowerStudyConfig& config, Method m) {
  return std::find(config.methods.begin(), config.methods.end(), m) !=
         config.methods.end();
}

}  // namespace

ReplicateFlags run_replicate(const PowerStudyConfig& config, int case_id,
                             double d, double w,
                             std::uint64_t replicate_seed) {
  ReplicateFlags flags;
  for (auto& per_method : flags.v) per_method.fill(-1);

  const Rng root(replicate_seed);
  const int n_targets = config.scenario == Scenario::tm1 ? 1 : 2;
  const int true_components = config.scenario == Scenario::tm1 ? 1 : 4;

  SyntheticDataset dataset;
  try {
    if (config.scenario == Scenario::tm1) {
      Tm1Config gen;
      gen.n_subjects = config.n_subjects;
      gen.grid = Grid::uniform(config.n_points);
      gen.d = d;
      gen.w = w;
      gen.lambda1 = config.lambda1;
      gen.sigma_eps = config.sigma_eps;
      gen.seed = root.child(kGenerator).next_u64();
      dataset = generate_tm1(gen);
    } else {
      Tm2Config gen;
      gen.n_subjects = config.n_subjects;
      gen.grid = Grid::uniform(config.n_points);
      gen.d = d;
      gen.w = w;
      gen.case_id = case_id;
      gen.eigenvalues = config.eigenvalues;
      gen.sigma_eps = config.sigma_eps;
      gen.seed = root.child(kGenerator).next_u64();
      dataset = generate_tm2(gen);
    }
  } catch (const Error&) {
    return flags;  // generation failure fails every method
  }

  if (uses(config, Method::fosr)) {
    try {
      FosrOptions options;
      options.n_basis = config.n_basis;
      options.residual_components =
          config.matched_components ? true_components : 0;
      options.residual_pve = config.selection_pve;
      FoSRFit fit = fit_fosr(dataset.data, options);
      for (int q = 1; q <= n_targets; ++q) {
        GlobalTest test =
            fosr_global_test(fit, q, config.alpha, config.n_cma_draws,
                             root.child(kCmaBase + q).next_u64());
        flags.v[static_cast<int>(Method::fosr)][q - 1] = test.reject ? 1 : 0;
      }
    } catch (const Error&) {
      // flags stay -1
    }
  }

  if (uses(config, Method::rpcs_none) || uses(config, Method::rpcs_bonferroni)) {
    try {
      FpcaOptions options;
      options.n_components = config.matched_components ? true_components : 0;
      options.pve_threshold = config.selection_pve;
      EigenSystem system = fit_fpca(dataset.data, options);
      RPCSFit fit = rpcs_regress(system.scores, dataset.data.covariates);
      for (int q = 1; q <= n_targets; ++q) {
        if (uses(config, Method::rpcs_none)) {
          JointTestResult test =
              rpcs_joint_test(fit, q, config.alpha, Correction::none);
          flags.v[static_cast<int>(Method::rpcs_none)][q - 1] =
              test.reject ? 1 : 0;
        }
        if (uses(config, Method::rpcs_bonferroni)) {
          JointTestResult test =
              rpcs_joint_test(fit, q, config.alpha, Correction::bonferroni);
          flags.v[static_cast<int>(Method::rpcs_bonferroni)][q - 1] =
              test.reject ? 1 : 0;
        }
      }
    } catch (const Error&) {
      // flags stay -1
    }
  }
  return flags;
}

PowerTable run_power_study(const PowerStudyConfig& config) {
  if (config.n_replicates < 1)
    throw ConfigError("n_replicates must be at least 1");
  if (!(config.alpha > 0.0 && config.alpha < 1.0))
    throw ConfigError("alpha must lie in (0, 1)");
  if (config.d_values.empty() || config.w_values.empty())
    throw ConfigError("d and w lattices must be nonempty");
  if (config.methods.empty()) throw ConfigError("no methods selected");

  struct Cell {
    int case_id;
    double d;
    double w;
  };
  std::vector<Cell> cells;
  const std::vector<int> case_list =
      config.scenario == Scenario::tm1 ? std::vector<int>{0} : config.cases;
  if (case_list.empty()) throw ConfigError("case list must be nonempty");
  for (int case_id : case_list)
    for (double d : config.d_values)
      for (double w : config.w_values) cells.push_back({case_id, d, w});

  const long n_cells = static_cast<long>(cells.size());
  const long n_reps = config.n_replicates;
  std::vector<ReplicateFlags> results(n_cells * n_reps);

  // Replicates are independent tasks with private substreams; every slot
  // is written exactly once, so the table is identical for any schedule.
  const long total = n_cells * n_reps;
  std::atomic<long> next{0};
  auto worker = [&]() {
    for (;;) {
      const long task = next.fetch_add(1);
      if (task >= total) return;
      const long cell_idx = task / n_reps;
      const long rep = task % n_reps;
      const Cell& cell = cells[cell_idx];
      const std::uint64_t seed = mix_seed(
          config.base_seed, static_cast<std::uint64_t>(task) + 1);
      results[task] =
          run_replicate(config, cell.case_id, cell.d, cell.w, seed);
    }
  };

  const int n_threads = std::max(1, config.threads);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  const int n_targets = config.scenario == Scenario::tm1 ? 1 : 2;
  PowerTable table;
  for (long c = 0; c < n_cells; ++c) {
    for (Method method : config.methods) {
      for (int target = 1; target <= n_targets; ++target) {
        PowerCell out;
        out.scenario = config.scenario;
        out.case_id = cells[c].case_id;
        out.d = cells[c].d;
        out.w = cells[c].w;
        out.method = method;
        out.target = target;
        for (long r = 0; r < n_reps; ++r) {
          const int8_t flag =
              results[c * n_reps + r].v[static_cast<int>(method)][target - 1];
          if (flag < 0)
            ++out.n_failed;
          else {
            ++out.n_effective;
            out.rejections += flag;
          }
        }
        if (out.n_effective > 0) {
          out.power = static_cast<double>(out.rejections) /
                      static_cast<double>(out.n_effective);
          out.mc_se = std::sqrt(out.power * (1.0 - out.power) /
                                static_cast<double>(out.n_effective));
        } else {
          out.power = std::numeric_limits<double>::quiet_NaN();
          out.mc_se = std::numeric_limits<double>::quiet_NaN();
        }
        table.rows.push_back(out);
      }
    }
  }
  return table;
}

namespace {

std::string dimension_value(const PowerCell& cell, const std::string& dim) {
  if (dim == "scenario") return to_string(cell.scenario);
  if (dim == "case") return std::to_string(cell.case_id);
  if (dim == "d") return std::to_string(cell.d);
  if (dim == "w") return std::to_string(cell.w);
  if (dim == "method") return to_string(cell.method);
  if (dim == "target") return std::to_string(cell.target);
  throw ConfigError("unknown grouping dimension: " + dim);
}

}  // namespace

PowerSummary summarize(const PowerTable& table,
                       const std::vector<std::string>& by) {
  if (table.rows.empty()) throw ConfigError("power table is empty");

  PowerSummary summary;
  summary.by = by;
  std::map<std::vector<std::string>, SummaryRow> groups;
  for (const PowerCell& cell : table.rows) {
    std::vector<std::string> key;
    key.reserve(by.size());
    for (const std::string& dim : by) key.push_back(dimension_value(cell, dim));
    SummaryRow& row = groups[key];
    row.key = key;
    row.rejections += cell.rejections;
    row.n_effective += cell.n_effective;
    row.n_failed += cell.n_failed;
  }
  for (auto& [key, row] : groups) {
    if (row.n_effective > 0) {
      row.power = static_cast<double>(row.rejections) /
                  static_cast<double>(row.n_effective);
      row.mc_se = std::sqrt(row.power * (1.0 - row.power) /
                            static_cast<double>(row.n_effective));
    }
    summary.rows.push_back(row);
  }

  // Power should not drop as d grows within a curve; flag decreases larger
  // than 3 joint MC standard errors.
  std::map<std::tuple<int, int, double, int, int>, std::vector<const PowerCell*>>
      curves;
  for (const PowerCell& cell : table.rows)
    curves[{static_cast<int>(cell.scenario), cell.case_id, cell.w,
            static_cast<int>(cell.method), cell.target}]
        .push_back(&cell);
  for (auto& [key, cells] : curves) {
    std::sort(cells.begin(), cells.end(),
              [](const PowerCell* a, const PowerCell* b) { return a->d < b->d; });
    for (std::size_t i = 1; i < cells.size(); ++i) {
      const PowerCell& lo = *cells[i - 1];
      const PowerCell& hi = *cells[i];
      if (lo.n_effective == 0 || hi.n_effective == 0) continue;
      const double drop = lo.power - hi.power;
      const double joint_se =
          std::sqrt(lo.mc_se * lo.mc_se + hi.mc_se * hi.mc_se);
      if (drop > 3.0 * joint_se)
        summary.dips.push_back({lo.scenario, lo.case_id, lo.w, lo.method,
                                lo.target, lo.d, hi.d, drop, joint_se});
    }
  }
  return summary;
}

}  // namespace funreg
