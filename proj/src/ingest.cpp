#include "funreg/ingest.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "funreg/csv.hpp"
#include "funreg/errors.hpp"

namespace funreg {

namespace {

struct FunctionalRows {
  Eigen::VectorXd raw_grid;  // original units
  std::vector<std::string> ids;
  Eigen::MatrixXd values;  // N x P
};

std::string where(const CsvTable& table, std::size_t row) {
  return table.path + ":" + std::to_string(table.line_numbers[row]);
}

void check_ragged(const CsvTable& table, std::size_t row) {
  if (table.rows[row].size() != table.header.size())
    throw IngestError(where(table, row) + ": row has " +
                      std::to_string(table.rows[row].size()) +
                      " cells, header has " +
                      std::to_string(table.header.size()));
}

void check_duplicate_ids(const CsvTable& table,
                         const std::vector<std::string>& ids,
                         const std::vector<std::size_t>& rows) {
  std::map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto [it, inserted] = seen.emplace(ids[i], rows[i]);
    if (!inserted)
      throw IngestError(where(table, rows[i]) + ": duplicate id '" + ids[i] +
                        "' (first seen on line " +
                        std::to_string(table.line_numbers[it->second]) + ")");
  }
}

bool headers_form_grid(const CsvTable& table, Eigen::VectorXd& grid) {
  const std::size_t p = table.header.size() - 1;
  grid.resize(p);
  for (std::size_t j = 0; j < p; ++j) {
    double v;
    if (!try_parse_double(table.header[j + 1], v)) return false;
    grid(j) = v;
    if (j > 0 && !(grid(j) > grid(j - 1))) return false;
  }
  return true;
}

FunctionalRows read_wide(const CsvTable& table,
                         DatasetManifest::GridSpec grid_spec,
                         IngestReport* report) {
  if (table.header.size() < 3)
    throw IngestError(table.path + ": need an id column and at least 2 points");
  const std::size_t p = table.header.size() - 1;

  FunctionalRows out;
  bool from_headers = headers_form_grid(table, out.raw_grid);
  if (grid_spec == DatasetManifest::GridSpec::headers && !from_headers)
    throw IngestError(table.path +
                      ": headers do not form a strictly increasing grid");
  if (grid_spec == DatasetManifest::GridSpec::uniform) from_headers = false;
  if (!from_headers)
    out.raw_grid = Eigen::VectorXd::LinSpaced(p, 0.0, 1.0);

  {
    std::vector<std::string> all_ids;
    std::vector<std::size_t> all_rows;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      check_ragged(table, r);
      all_ids.push_back(table.rows[r][0]);
      all_rows.push_back(r);
    }
    check_duplicate_ids(table, all_ids, all_rows);
  }

  std::vector<Eigen::VectorXd> rows;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string& id = table.rows[r][0];
    bool missing = false;
    std::string missing_column;
    Eigen::VectorXd values(p);
    for (std::size_t j = 0; j < p; ++j) {
      const std::string& cell = table.rows[r][j + 1];
      if (cell.empty() || cell == "NA") {
        missing = true;
        missing_column = table.header[j + 1];
        break;
      }
      values(j) = parse_double_cell(table, r, j + 1);
    }
    if (missing) {
      if (report)
        report->dropped_rows.push_back(where(table, r) + ": id '" + id +
                                       "' dropped: missing value in column '" +
                                       missing_column + "'");
      continue;
    }
    out.ids.push_back(id);
    rows.push_back(std::move(values));
  }

  out.values.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.values.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return out;
}

FunctionalRows read_long(const CsvTable& table, IngestReport* report) {
  std::map<std::string, std::map<double, double>> per_id;
  std::vector<std::string> id_order;
  std::map<std::string, std::size_t> first_row;
  std::set<double> grid_values;

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    check_ragged(table, r);
    const std::string& id = table.rows[r][0];
    const double s = parse_double_cell(table, r, 1);
    const double v = parse_double_cell(table, r, 2);
    if (!per_id.count(id)) {
      id_order.push_back(id);
      first_row[id] = r;
    }
    auto [it, inserted] = per_id[id].emplace(s, v);
    if (!inserted)
      throw IngestError(where(table, r) + ": duplicate point s=" +
                        table.rows[r][1] + " for id '" + id + "'");
    grid_values.insert(s);
  }
  if (id_order.empty()) throw IngestError(table.path + ": no data rows");

  FunctionalRows out;
  out.raw_grid.resize(static_cast<Eigen::Index>(grid_values.size()));
  Eigen::Index j = 0;
  for (double s : grid_values) out.raw_grid(j++) = s;

  const Eigen::Index p = out.raw_grid.size();
  std::vector<Eigen::VectorXd> rows;
  for (const std::string& id : id_order) {
    const auto& points = per_id[id];
    if (static_cast<Eigen::Index>(points.size()) != p) {
      if (report)
        report->dropped_rows.push_back(
            table.path + ":" +
            std::to_string(table.line_numbers[first_row[id]]) + ": id '" + id +
            "' dropped: only " + std::to_string(points.size()) + " of " +
            std::to_string(p) + " grid points present");
      continue;
    }
    Eigen::VectorXd values(p);
    Eigen::Index k = 0;
    for (const auto& [s, v] : points) values(k++) = v;
    out.ids.push_back(id);
    rows.push_back(std::move(values));
  }

  out.values.resize(static_cast<Eigen::Index>(rows.size()), p);
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.values.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return out;
}

}  // namespace

FunctionalDataset ingest(const DatasetManifest& manifest,
                         IngestReport* report) {
  CsvTable functional = read_csv(manifest.functional_path);

  const bool long_format = functional.header.size() == 3 &&
                           functional.header[1] == "s" &&
                           functional.header[2] == "value";
  FunctionalRows rows = long_format
                            ? read_long(functional, report)
                            : read_wide(functional, manifest.grid, report);
  if (rows.ids.empty())
    throw IngestError(manifest.functional_path +
                      ": no usable rows after dropping incomplete subjects");

  // Affine map of the observation grid onto [0, 1].
  const Eigen::Index p = rows.raw_grid.size();
  const double offset = rows.raw_grid(0);
  const double span = rows.raw_grid(p - 1) - rows.raw_grid(0);
  Eigen::VectorXd unit_points =
      span == 1.0 && offset == 0.0
          ? rows.raw_grid
          : ((rows.raw_grid.array() - offset) / span).matrix();

  if (manifest.covariates_path.empty()) {
    return FunctionalDataset{Grid(unit_points),
                             std::move(rows.values),
                             Eigen::MatrixXd(static_cast<Eigen::Index>(
                                                 rows.ids.size()),
                                             0),
                             std::move(rows.ids),
                             {},
                             offset,
                             span};
  }

  // Covariates, matched one-to-one by id.
  CsvTable covariates = read_csv(manifest.covariates_path);
  if (covariates.header.size() < 2)
    throw IngestError(manifest.covariates_path +
                      ": need an id column and at least one covariate");
  const std::size_t q = covariates.header.size() - 1;

  std::map<std::string, std::size_t> covariate_row;
  for (std::size_t r = 0; r < covariates.rows.size(); ++r) {
    check_ragged(covariates, r);
    auto [it, inserted] = covariate_row.emplace(covariates.rows[r][0], r);
    if (!inserted)
      throw IngestError(where(covariates, r) + ": duplicate id '" +
                        covariates.rows[r][0] + "'");
  }
  for (const std::string& id : rows.ids)
    if (!covariate_row.count(id))
      throw IngestError(manifest.covariates_path + ": id '" + id +
                        "' from the functional file is missing");

  // Columns parse as numbers, or as exactly two text levels mapped to 0/1.
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.ids.size()),
                    static_cast<Eigen::Index>(q));
  for (std::size_t c = 0; c < q; ++c) {
    bool numeric = true;
    for (const std::string& id : rows.ids) {
      double v;
      if (!try_parse_double(covariates.rows[covariate_row[id]][c + 1], v)) {
        numeric = false;
        break;
      }
    }
    if (numeric) {
      for (std::size_t i = 0; i < rows.ids.size(); ++i)
        x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
            parse_double_cell(covariates, covariate_row[rows.ids[i]], c + 1);
      continue;
    }
    std::set<std::string> levels;
    for (const std::string& id : rows.ids) {
      const std::size_t r = covariate_row[id];
      levels.insert(covariates.rows[r][c + 1]);
      if (levels.size() > 2)
        throw IngestError(where(covariates, r) + ": column '" +
                          covariates.header[c + 1] +
                          "' has more than two text levels");
    }
    const std::string zero_level = *levels.begin();
    const std::string one_level =
        levels.size() == 2 ? *std::next(levels.begin()) : zero_level;
    for (std::size_t i = 0; i < rows.ids.size(); ++i)
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          covariates.rows[covariate_row[rows.ids[i]]][c + 1] == one_level
              ? 1.0
              : 0.0;
    if (report)
      report->binary_mappings.push_back(
          {covariates.header[c + 1], zero_level, one_level});
  }

  std::vector<std::string> names(covariates.header.begin() + 1,
                                 covariates.header.end());
  {
    std::set<std::string> unique(names.begin(), names.end());
    if (unique.size() != names.size())
      throw IngestError(manifest.covariates_path +
                        ": covariate names are not unique");
  }

  return FunctionalDataset{Grid(unit_points), std::move(rows.values),
                           std::move(x),      std::move(rows.ids),
                           std::move(names),  offset,
                           span};
}

}  // namespace funreg
