#pragma once

#include <string>
#include <vector>

#include "funreg/dataset.hpp"

namespace funreg {

// Dataset ingestion. The functional file is either wide
// ({id, v_1, ..., v_P}, grid taken from numeric headers when they parse as
// strictly increasing values) or long ({id, s, value}); the covariate file
// is {id, X_1, ..., X_Q}. Grids are affinely mapped to [0, 1] and the
// mapping kept on the dataset.
struct DatasetManifest {
  std::string functional_path;
  std::string covariates_path;

  enum class GridSpec { auto_detect, headers, uniform };
  GridSpec grid = GridSpec::auto_detect;
};

// Two-valued text covariates become 0/1 columns; the mapping is reported.
struct BinaryMapping {
  std::string column;
  std::string zero_level;
  std::string one_level;
};

struct IngestReport {
  std::vector<std::string> dropped_rows;  // one line per rejected subject
  std::vector<BinaryMapping> binary_mappings;
};

FunctionalDataset ingest(const DatasetManifest& manifest,
                         IngestReport* report = nullptr);

}  // namespace funreg
