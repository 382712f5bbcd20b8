#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "funreg/config.hpp"
#include "funreg/errors.hpp"
#include "funreg/runs.hpp"

namespace {

using funreg::ConfigMap;
using funreg::cli::GlobalOptions;

struct Invocation {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value
  GlobalOptions global;
};

ConfigMap resolve_config(const Invocation& invocation) {
  ConfigMap config = invocation.config_path.empty()
                         ? ConfigMap()
                         : ConfigMap::parse_file(invocation.config_path);
  for (const std::string& item : invocation.overrides) {
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos)
      throw funreg::ConfigError("--set expects key=value, got '" + item + "'");
    config.set(item.substr(0, eq), item.substr(eq + 1));
  }
  return config;
}

void add_common(CLI::App* cmd, Invocation& invocation) {
  cmd->add_option("--config", invocation.config_path,
                  "key = value configuration file");
  cmd->add_option("--set", invocation.overrides,
                  "override a config key (key=value, repeatable)");
  cmd->add_option("--out", invocation.global.out_dir, "output directory");
  cmd->add_option("--seed", invocation.global.seed, "random seed");
  cmd->add_option("--threads", invocation.global.threads, "worker threads");
  cmd->add_option("--alpha", invocation.global.alpha, "test level");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional regression toolkit: FPCA score regression and "
               "function-on-scalar regression with simultaneous bands, plus "
               "Monte Carlo power studies"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
    void (*run)(const ConfigMap&, const GlobalOptions&);
  };
  const std::vector<Sub> subs = {
      {"simulate", "generate a synthetic dataset as a CSV pair",
       funreg::cli::run_simulate},
      {"fpca", "functional PCA of a dataset", funreg::cli::run_fpca},
      {"rpcs", "score regressions with joint tests and reconstructions",
       funreg::cli::run_rpcs},
      {"fosr", "penalized-spline function-on-scalar fit with bands",
       funreg::cli::run_fosr},
      {"power", "Monte Carlo size/power study over a (d, w) lattice",
       funreg::cli::run_power},
      {"analyze", "full comparison pipeline on one dataset",
       funreg::cli::run_analyze},
  };

  std::vector<Invocation> invocations(subs.size());
  for (std::size_t i = 0; i < subs.size(); ++i) {
    CLI::App* cmd = app.add_subcommand(subs[i].name, subs[i].help);
    add_common(cmd, invocations[i]);
  }

  CLI11_PARSE(app, argc, argv);

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!app.got_subcommand(subs[i].name)) continue;
    try {
      subs[i].run(resolve_config(invocations[i]), invocations[i].global);
    } catch (const funreg::Error& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 1;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "internal error: %s\n", e.what());
      return 2;
    }
    return 0;
  }
  return 1;
}
