#include "scengen/series.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace scengen {

namespace {

// Howard Hinnant's days-from-civil; valid across the proleptic Gregorian range.
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2u) / 5u + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yr + (m <= 2));
}

bool parse_int_field(std::string_view s, int& out) {
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [p, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && p == last;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      fields.emplace_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return fields;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

int SeriesTable::column_index(const std::string& name) const {
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (names[j] == name) return static_cast<int>(j);
  }
  return -1;
}

std::int64_t parse_timestamp_utc(std::string_view text) {
  // YYYY-MM-DDTHH:MM:SSZ (the Z is optional, the rest is not)
  if (text.size() == 20 && text.back() == 'Z') text.remove_suffix(1);
  if (text.size() != 19 || text[4] != '-' || text[7] != '-' || text[10] != 'T' ||
      text[13] != ':' || text[16] != ':') {
    throw std::invalid_argument("bad timestamp '" + std::string(text) + "'");
  }
  int y, mo, da, hh, mi, ss;
  if (!parse_int_field(text.substr(0, 4), y) ||
      !parse_int_field(text.substr(5, 2), mo) ||
      !parse_int_field(text.substr(8, 2), da) ||
      !parse_int_field(text.substr(11, 2), hh) ||
      !parse_int_field(text.substr(14, 2), mi) ||
      !parse_int_field(text.substr(17, 2), ss)) {
    throw std::invalid_argument("bad timestamp '" + std::string(text) + "'");
  }
  if (mo < 1 || mo > 12 || da < 1 || da > 31 || hh < 0 || hh > 23 || mi < 0 ||
      mi > 59 || ss < 0 || ss > 59) {
    throw std::invalid_argument("bad timestamp '" + std::string(text) + "'");
  }
  if (mi != 0 || ss != 0) {
    throw std::invalid_argument("timestamp '" + std::string(text) +
                                "' is not on the hourly grid");
  }
  return days_from_civil(y, mo, da) * 24 + hh;
}

std::string format_timestamp_utc(std::int64_t hours_since_epoch) {
  std::int64_t days = hours_since_epoch / 24;
  int hh = static_cast<int>(hours_since_epoch % 24);
  if (hh < 0) {
    hh += 24;
    days -= 1;
  }
  int y, m, d;
  civil_from_days(days, y, m, d);
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:00:00Z", y, m, d, hh);
  return buf;
}

SeriesTable load_series(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open series file '" + path.string() + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return load_series_text(buf.str(), path.string());
}

SeriesTable load_series_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument(origin + ": empty file");
  }
  auto header = split_csv_line(strip_cr(line));
  if (header.empty() || header.front() != "timestamp") {
    throw std::invalid_argument(origin + ": first header column must be 'timestamp'");
  }
  SeriesTable table;
  table.names.assign(header.begin() + 1, header.end());
  const std::size_t ncols = table.names.size();
  if (ncols == 0) {
    throw std::invalid_argument(origin + ": no data columns");
  }

  std::vector<double> flat;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != ncols + 1) {
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                  ": expected " + std::to_string(ncols + 1) +
                                  " fields, found " + std::to_string(fields.size()));
    }
    std::int64_t hour;
    try {
      hour = parse_timestamp_utc(fields[0]);
    } catch (const std::invalid_argument& err) {
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": " +
                                  err.what());
    }
    if (!table.hours.empty()) {
      if (hour == table.hours.back()) {
        throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                    ": duplicated timestamp " + fields[0]);
      }
      if (hour != table.hours.back() + 1) {
        throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                    ": non-hourly step before " + fields[0]);
      }
    }
    table.hours.push_back(hour);
    for (std::size_t j = 1; j < fields.size(); ++j) {
      const std::string& cell = fields[j];
      if (cell.empty()) {
        flat.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      double value;
      auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec != std::errc() || p != cell.data() + cell.size()) {
        throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                    ": unparseable value '" + cell + "'");
      }
      flat.push_back(value);
    }
  }
  if (table.hours.empty()) {
    throw std::invalid_argument(origin + ": no data rows");
  }
  table.values.resize(table.hours.size(), ncols);
  for (std::size_t i = 0; i < table.hours.size(); ++i) {
    for (std::size_t j = 0; j < ncols; ++j) {
      table.values(i, j) = flat[i * ncols + j];
    }
  }
  return table;
}

std::vector<Instance> build_instances(const SeriesTable& table,
                                      const std::string& target_column,
                                      const std::vector<std::string>& predictor_columns,
                                      int start_hour_utc, int horizon) {
  if (horizon < 1) throw std::invalid_argument("build_instances: horizon must be >= 1");
  if (start_hour_utc < 0 || start_hour_utc > 23) {
    throw std::invalid_argument("build_instances: start_hour_utc must be in 0..23");
  }
  if (predictor_columns.empty()) {
    throw std::invalid_argument("build_instances: need at least one predictor column");
  }
  const int target_idx = table.column_index(target_column);
  if (target_idx < 0) {
    throw std::invalid_argument("build_instances: no column named '" + target_column + "'");
  }
  std::vector<int> pred_idx;
  for (const auto& name : predictor_columns) {
    const int j = table.column_index(name);
    if (j < 0) {
      throw std::invalid_argument("build_instances: no column named '" + name + "'");
    }
    pred_idx.push_back(j);
  }

  const int n_pred = static_cast<int>(pred_idx.size());
  std::vector<Instance> out;
  for (int row = 0; row + horizon <= table.rows(); ++row) {
    const std::int64_t hour = table.hours[row];
    if (((hour % 24) + 24) % 24 != start_hour_utc) continue;
    Instance inst;
    inst.id = format_timestamp_utc(hour);
    inst.x.resize(static_cast<Eigen::Index>(horizon) * n_pred);
    inst.y.resize(horizon);
    bool complete = true;
    for (int p = 0; p < n_pred && complete; ++p) {
      for (int h = 0; h < horizon; ++h) {
        const double v = table.values(row + h, pred_idx[p]);
        if (std::isnan(v)) {
          complete = false;
          break;
        }
        inst.x[static_cast<Eigen::Index>(p) * horizon + h] = v;
      }
    }
    for (int h = 0; h < horizon && complete; ++h) {
      const double v = table.values(row + h, target_idx);
      if (std::isnan(v)) complete = false;
      else inst.y[h] = v;
    }
    if (complete) out.push_back(std::move(inst));
  }
  if (out.empty()) {
    throw std::invalid_argument("build_instances: no complete instance windows");
  }
  return out;
}

Standardizer fit_standardizer(const Eigen::MatrixXd& Z) {
  if (Z.cols() < 2) {
    throw std::invalid_argument("fit_standardizer: need at least 2 instances");
  }
  Standardizer st;
  st.means = Z.rowwise().mean();
  const Eigen::MatrixXd centered = Z.colwise() - st.means;
  st.scales = (centered.array().square().rowwise().mean()).sqrt();
  for (Eigen::Index j = 0; j < st.scales.size(); ++j) {
    if (!(st.scales[j] > 0)) st.scales[j] = 1.0;
  }
  return st;
}

Standardizer fit_standardizer(const std::vector<Instance>& data) {
  return fit_standardizer(concat_instances(data));
}

std::vector<FoldSplit> fold_split(int n, int k) {
  if (k < 2) throw std::invalid_argument("fold_split: k must be >= 2");
  if (n < k) throw std::invalid_argument("fold_split: need at least k instances");
  std::vector<FoldSplit> folds(k);
  const int base = n / k;
  const int extra = n % k;
  int start = 0;
  for (int j = 0; j < k; ++j) {
    const int size = base + (j < extra ? 1 : 0);
    for (int i = 0; i < n; ++i) {
      if (i >= start && i < start + size) folds[j].test.push_back(i);
      else folds[j].train.push_back(i);
    }
    start += size;
  }
  return folds;
}

}  // namespace scengen
