#pragma once

#include <cstdint>
#include <string>

#include "funreg/config.hpp"

namespace funreg::cli {

inline constexpr const char* kVersion = "0.1.0";

struct GlobalOptions {
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int threads = 1;
  double alpha = 0.05;
};

// Subcommand bodies shared by the command-line tool and the test suites.
// Each consumes the flat key=value config, validates its key set, runs the
// pipeline and writes its files (always including run_metadata.json) into
// options.out_dir.
void run_simulate(const ConfigMap& config, const GlobalOptions& options);
void run_fpca(const ConfigMap& config, const GlobalOptions& options);
void run_rpcs(const ConfigMap& config, const GlobalOptions& options);
void run_fosr(const ConfigMap& config, const GlobalOptions& options);
void run_power(const ConfigMap& config, const GlobalOptions& options);
void run_analyze(const ConfigMap& config, const GlobalOptions& options);

}  // namespace funreg::cli
