#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "scengen/model.hpp"

namespace scengen {

/// Aligned hourly series. `hours` are hours since the Unix epoch (UTC),
/// strictly increasing by exactly one. Missing entries are NaN.
struct SeriesTable {
  std::vector<std::int64_t> hours;
  std::vector<std::string> names;  // column names, timestamp excluded
  Eigen::MatrixXd values;          // rows x names.size()

  int rows() const { return static_cast<int>(hours.size()); }
  int column_index(const std::string& name) const;  // -1 if absent
};

/// Hours since epoch of an ISO-8601 UTC timestamp (YYYY-MM-DDTHH:MM:SSZ).
/// Minutes and seconds must be zero: the tables are hourly grids.
std::int64_t parse_timestamp_utc(std::string_view text);
std::string format_timestamp_utc(std::int64_t hours_since_epoch);

/// Parses a CSV with header `timestamp,<col1>,...`. Empty cells become NaN.
/// Rejects duplicated or non-hourly timestamps and malformed rows (the error
/// names the 1-based line).
SeriesTable load_series(const std::filesystem::path& path);
SeriesTable load_series_text(const std::string& text, const std::string& origin);

/// One candidate instance per calendar day whose start_hour_utc row exists:
/// y = target column over [start, start+horizon), x = each predictor column
/// over the same window, concatenated (r = horizon * #predictors). Candidates
/// touching a missing value are dropped. Instance ids are the window-start
/// timestamps; output is chronological.
std::vector<Instance> build_instances(const SeriesTable& table,
                                      const std::string& target_column,
                                      const std::vector<std::string>& predictor_columns,
                                      int start_hour_utc = 3, int horizon = 84);

/// Per-dimension mean and population standard deviation over the training
/// instances; zero-variance dimensions keep scale 1.
Standardizer fit_standardizer(const std::vector<Instance>& data);
Standardizer fit_standardizer(const Eigen::MatrixXd& Z);

struct FoldSplit {
  std::vector<int> train;
  std::vector<int> test;
};

/// Contiguous chronological test blocks; block j is test fold j. Sizes differ
/// by at most one (earlier folds take the remainder).
std::vector<FoldSplit> fold_split(int n, int k);

}  // namespace scengen
