#include "scengen/commands.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "scengen/model_io.hpp"
#include "scengen/series.hpp"
#include "scengen/train.hpp"

namespace scengen::cli {

using nlohmann::json;

namespace {

std::vector<std::string> split_line(const std::string& line) {
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

std::string horizon_header(int q) {
  int width = 3;
  for (int v = q; v >= 1000; v /= 10) ++width;
  std::string header;
  char buf[16];
  for (int h = 1; h <= q; ++h) {
    std::snprintf(buf, sizeof(buf), ",h%0*d", width, h);
    header += buf;
  }
  return header;
}

std::string sanitize_id(const std::string& id) {
  std::string out;
  for (char ch : id) {
    if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_') {
      out += ch;
    }
  }
  return out.empty() ? "case" : out;
}

Hyperparams hyperparams_from(const RunConfig& cfg) {
  return Hyperparams(cfg.number("a"), cfg.number("b_beta"), cfg.number("c"),
                     cfg.number("d"), cfg.number("e"), cfg.number("f"),
                     cfg.integer("K"));
}

std::vector<Instance> instances_from(const RunConfig& cfg) {
  const SeriesTable table = load_series(cfg.text("data"));
  const std::string target = cfg.text("target_column");
  std::vector<std::string> predictors = cfg.name_list("predictor_columns");
  if (predictors.empty()) {
    for (const auto& name : table.names) {
      if (name != target) predictors.push_back(name);
    }
  }
  return build_instances(table, target, predictors, cfg.integer("start_hour_utc"),
                         cfg.integer("horizon"));
}

ForecastConfig forecast_config_from(const RunConfig& cfg, std::uint64_t seed) {
  ForecastConfig fc;
  fc.n_scenarios = cfg.integer("n_scenarios");
  fc.predict_burn_in = cfg.integer("predict_burn_in");
  fc.thinning = cfg.integer("thinning");
  fc.seed = seed;
  fc.validate();
  return fc;
}

std::vector<Ensemble> forecast_all(const ModelEstimate& theta,
                                   const std::vector<Instance>& instances,
                                   const ForecastConfig& fc) {
  std::vector<Ensemble> out(instances.size());
  std::exception_ptr error;
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(instances.size()); ++i) {
    try {
      out[i] = forecast(theta, instances[i].id, instances[i].x, fc);
    } catch (...) {
#if defined(_OPENMP)
#pragma omp critical
#endif
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

void write_trace_csv(const std::filesystem::path& path,
                     const std::vector<TraceRow>& trace) {
  std::string text = "sweep,log_likelihood,gamma_e,gamma_s,mean_pi,active_atoms\n";
  for (const auto& row : trace) {
    text += std::to_string(row.sweep);
    text += ',' + format_double(row.log_likelihood);
    text += ',' + format_double(row.gamma_e);
    text += ',' + format_double(row.gamma_s);
    text += ',' + format_double(row.mean_pi);
    text += ',' + std::to_string(row.active_atoms);
    text += '\n';
  }
  atomic_write_text(path, text);
}

ModelEstimate train_and_save(const std::vector<Instance>& data,
                             const RunConfig& cfg, std::uint64_t seed,
                             const std::filesystem::path& dir) {
  TrainConfig tc;
  tc.burn_in = cfg.integer("burn_in");
  tc.total_sweeps = cfg.integer("total_sweeps");
  tc.seed = seed;
  tc.hp = hyperparams_from(cfg);
  const TrainResult result = train(data, tc);
  save_model(result.estimate, dir / "model.json");
  write_trace_csv(dir / "trace.csv", result.trace);
  return result.estimate;
}

}  // namespace

json RunConfig::defaults(const std::string& command) {
  json common = {{"seed", std::uint64_t{1}}, {"out", "out"}};
  json data_keys = {{"data", ""},
                    {"target_column", "target"},
                    {"predictor_columns", ""},
                    {"start_hour_utc", 3},
                    {"horizon", 84}};
  json train_keys = {{"K", 100},     {"burn_in", 100}, {"total_sweeps", 150},
                     {"a", 1.0},     {"b_beta", 1.0},  {"c", 1e-6},
                     {"d", 1e-6},    {"e", 1e-6},      {"f", 1e-6}};
  json forecast_keys = {{"model", ""},
                        {"n_scenarios", 21},
                        {"predict_burn_in", 100},
                        {"thinning", 5}};

  json out = common;
  auto merge = [&out](const json& extra) {
    for (auto it = extra.begin(); it != extra.end(); ++it) out[it.key()] = it.value();
  };
  if (command == "simulate") {
    merge({{"days", 540},
           {"horizon", 84},
           {"n_predictors", 4},
           {"start", "2020-01-01T03:00:00Z"},
           {"start_hour_utc", 3},
           {"sim_atoms", 8},
           {"sim_pi", 0.3},
           {"sim_gamma_s", 1.0},
           {"sim_gamma_e", 100.0},
           {"sim_mean", 288.0},
           {"sim_scale", 8.0}});
  } else if (command == "train") {
    merge(data_keys);
    merge(train_keys);
  } else if (command == "forecast") {
    merge(data_keys);
    merge(forecast_keys);
  } else if (command == "evaluate") {
    merge(data_keys);
    merge({{"scenarios", ""}, {"baseline", ""}});
  } else if (command == "cv") {
    merge(data_keys);
    merge(train_keys);
    merge(forecast_keys);
    out.erase("model");
    merge({{"folds", 10}});
  } else {
    throw std::invalid_argument("unknown command '" + command + "'");
  }
  return out;
}

RunConfig RunConfig::resolve(const std::string& command,
                             const std::string& config_path,
                             const json& flag_overrides) {
  RunConfig cfg;
  cfg.command_ = command;
  cfg.values_ = defaults(command);
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      throw std::invalid_argument("cannot open config file '" + config_path + "'");
    }
    json file_values = json::parse(in);
    if (!file_values.is_object()) {
      throw std::invalid_argument("config file must hold a flat JSON object");
    }
    for (auto it = file_values.begin(); it != file_values.end(); ++it) {
      if (it.key() == "command") continue;  // inert echo artifact
      cfg.values_[it.key()] = it.value();
    }
  }
  for (auto it = flag_overrides.begin(); it != flag_overrides.end(); ++it) {
    cfg.values_[it.key()] = it.value();
  }
  return cfg;
}

double RunConfig::number(const std::string& key) const {
  if (!values_.contains(key) || !values_[key].is_number()) {
    throw std::invalid_argument("config key '" + key + "' must be a number");
  }
  return values_[key].get<double>();
}

int RunConfig::integer(const std::string& key) const {
  if (!values_.contains(key) || !values_[key].is_number_integer()) {
    throw std::invalid_argument("config key '" + key + "' must be an integer");
  }
  return values_[key].get<int>();
}

std::uint64_t RunConfig::u64(const std::string& key) const {
  if (!values_.contains(key) || !values_[key].is_number_integer()) {
    throw std::invalid_argument("config key '" + key + "' must be an integer");
  }
  return values_[key].get<std::uint64_t>();
}

std::string RunConfig::text(const std::string& key) const {
  if (!values_.contains(key) || !values_[key].is_string()) {
    throw std::invalid_argument("config key '" + key + "' must be a string");
  }
  return values_[key].get<std::string>();
}

std::vector<std::string> RunConfig::name_list(const std::string& key) const {
  const std::string raw = text(key);
  std::vector<std::string> names;
  if (raw.empty()) return names;
  for (const auto& field : split_line(raw)) {
    if (!field.empty()) names.push_back(field);
  }
  return names;
}

void RunConfig::echo(const std::filesystem::path& dir) const {
  json doc = values_;
  doc["command"] = command_;
  atomic_write_text(dir / "config.resolved.json", doc.dump(2) + "\n");
}

void write_scenarios_csv(const std::filesystem::path& path,
                         const std::vector<Ensemble>& ensembles) {
  if (ensembles.empty()) {
    throw std::invalid_argument("write_scenarios_csv: no ensembles");
  }
  const int q = static_cast<int>(ensembles.front().scenarios.cols());
  std::string text = "instance_id,scenario_id" + horizon_header(q) + "\n";
  for (const auto& ens : ensembles) {
    for (int mrow = 0; mrow < ens.scenarios.rows(); ++mrow) {
      text += ens.instance_id + ',' + std::to_string(mrow + 1);
      for (int h = 0; h < q; ++h) text += ',' + format_double(ens.scenarios(mrow, h));
      text += '\n';
    }
    text += ens.instance_id + ",mean";
    for (int h = 0; h < q; ++h) text += ',' + format_double(ens.mean_scenario[h]);
    text += '\n';
  }
  atomic_write_text(path, text);
}

NamedEnsembles read_scenarios_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open scenarios file '" + path.string() + "'");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument(path.string() + ": empty file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_line(line);
  if (header.size() < 3 || header[0] != "instance_id" || header[1] != "scenario_id") {
    throw std::invalid_argument(path.string() + ": unexpected scenario header");
  }
  const int q = static_cast<int>(header.size()) - 2;

  NamedEnsembles out;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<Eigen::VectorXd>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (static_cast<int>(fields.size()) != q + 2) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) +
                                  ": wrong field count");
    }
    if (fields[1] == "mean") continue;
    Eigen::VectorXd values(q);
    for (int h = 0; h < q; ++h) {
      const std::string& cell = fields[h + 2];
      double v;
      auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || p != cell.data() + cell.size()) {
        throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) +
                                    ": unparseable value '" + cell + "'");
      }
      values[h] = v;
    }
    auto [it, inserted] = index.try_emplace(fields[0], rows.size());
    if (inserted) {
      rows.emplace_back();
      out.emplace_back(fields[0], Eigen::MatrixXd());
    }
    rows[it->second].push_back(std::move(values));
  }
  if (out.empty()) {
    throw std::invalid_argument(path.string() + ": no scenario rows");
  }
  const std::size_t m = rows.front().size();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (rows[i].size() != m) {
      throw std::invalid_argument(path.string() + ": instance '" + out[i].first +
                                  "' has a different scenario count");
    }
    Eigen::MatrixXd mat(m, q);
    for (std::size_t j = 0; j < m; ++j) mat.row(j) = rows[i][j].transpose();
    out[i].second = std::move(mat);
  }
  return out;
}

void evaluate_ensembles(const std::filesystem::path& out_dir,
                        const NamedEnsembles& primary,
                        const std::map<std::string, Eigen::VectorXd>& actuals,
                        const NamedEnsembles* baseline, std::uint64_t tie_seed,
                        bool write_fancharts) {
  if (primary.empty()) throw std::invalid_argument("evaluate: no ensembles");
  std::filesystem::create_directories(out_dir);

  std::string missing;
  for (const auto& [id, scen] : primary) {
    if (!actuals.count(id)) missing += missing.empty() ? id : ", " + id;
  }
  if (!missing.empty()) {
    throw std::invalid_argument("evaluate: no actual target for instance(s): " + missing);
  }

  const int m = static_cast<int>(primary.front().second.rows());
  const int q = static_cast<int>(primary.front().second.cols());
  std::vector<VerificationCase> cases;
  cases.reserve(primary.size());
  for (const auto& [id, scen] : primary) {
    if (scen.rows() != m) {
      throw std::invalid_argument("evaluate: instance '" + id +
                                  "' has a different member count");
    }
    const Eigen::VectorXd& actual = actuals.at(id);
    if (scen.cols() != actual.size()) {
      throw std::invalid_argument("evaluate: instance '" + id +
                                  "' horizon disagrees with the actual target");
    }
    cases.push_back({scen, actual});
    cases.back().validate();
  }

  std::vector<int> ranks(cases.size());
  for (std::size_t i = 0; i < cases.size(); ++i) {
    ranks[i] = mst_rank(cases[i], mix64(tie_seed, static_cast<std::uint64_t>(i)));
  }
  const RankHistogram hist = rank_histogram(ranks, m);

  std::string rank_text = "rank,count\n";
  for (std::size_t j = 0; j < hist.counts.size(); ++j) {
    rank_text += std::to_string(j + 1) + ',' + std::to_string(hist.counts[j]) + '\n';
  }
  atomic_write_text(out_dir / "rank_histogram.csv", rank_text);

  const HorizonErrors errs = horizon_errors(cases);
  std::string horizon_text = "horizon,rmse,mae,bias\n";
  for (int h = 0; h < q; ++h) {
    horizon_text += std::to_string(h + 1) + ',' + format_double(errs.rmse[h]) + ',' +
                    format_double(errs.mae[h]) + ',' + format_double(errs.bias[h]) +
                    '\n';
  }
  atomic_write_text(out_dir / "horizon_errors.csv", horizon_text);

  std::vector<double> hull_values(cases.size());
  std::vector<bool> hull_converged(cases.size());
  std::vector<double> sharp_values(cases.size());
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const HullDistance hd = hull_distance(cases[i]);
    hull_values[i] = hd.value;
    hull_converged[i] = hd.converged;
    sharp_values[i] = sharpness(cases[i].ensemble);
  }

  if (baseline) {
    std::map<std::string, const Eigen::MatrixXd*> base_index;
    for (const auto& [id, scen] : *baseline) base_index[id] = &scen;
    std::string hull_text = "instance_id,hull_distance,baseline_hull_distance\n";
    std::string sharp_text = "instance_id,sharpness,baseline_sharpness\n";
    int common = 0;
    for (std::size_t i = 0; i < primary.size(); ++i) {
      const auto& id = primary[i].first;
      auto it = base_index.find(id);
      if (it == base_index.end()) continue;
      ++common;
      const HullDistance base_hd = hull_distance(*it->second, actuals.at(id));
      hull_text += id + ',' + format_double(hull_values[i]) + ',' +
                   format_double(base_hd.value) + '\n';
      sharp_text += id + ',' + format_double(sharp_values[i]) + ',' +
                    format_double(sharpness(*it->second)) + '\n';
    }
    if (common == 0) {
      throw std::invalid_argument("evaluate: baseline shares no instance ids");
    }
    atomic_write_text(out_dir / "hull_distance.csv", hull_text);
    atomic_write_text(out_dir / "sharpness.csv", sharp_text);
  } else {
    std::string hull_text = "instance_id,hull_distance,converged\n";
    std::string sharp_text = "instance_id,sharpness\n";
    for (std::size_t i = 0; i < primary.size(); ++i) {
      hull_text += primary[i].first + ',' + format_double(hull_values[i]) + ',' +
                   (hull_converged[i] ? "1" : "0") + '\n';
      sharp_text += primary[i].first + ',' + format_double(sharp_values[i]) + '\n';
    }
    atomic_write_text(out_dir / "hull_distance.csv", hull_text);
    atomic_write_text(out_dir / "sharpness.csv", sharp_text);
  }

  if (write_fancharts) {
    const std::filesystem::path fan_dir = out_dir / "fancharts";
    std::filesystem::create_directories(fan_dir);
    char buf[16];
    for (std::size_t i = 0; i < primary.size(); ++i) {
      const auto& [id, scen] = primary[i];
      const Eigen::VectorXd mean = scen.colwise().mean().transpose();
      std::string text = "horizon,actual,ensemble_mean";
      for (int j = 0; j < m; ++j) {
        std::snprintf(buf, sizeof(buf), ",s%03d", j + 1);
        text += buf;
      }
      text += '\n';
      const Eigen::VectorXd& actual = actuals.at(id);
      for (int h = 0; h < q; ++h) {
        text += std::to_string(h + 1) + ',' + format_double(actual[h]) + ',' +
                format_double(mean[h]);
        for (int j = 0; j < m; ++j) text += ',' + format_double(scen(j, h));
        text += '\n';
      }
      atomic_write_text(fan_dir / ("fan_" + sanitize_id(id) + ".csv"), text);
    }
  }

  json metrics;
  metrics["cases"] = cases.size();
  metrics["members"] = m;
  metrics["horizon"] = q;
  metrics["tie_seed"] = tie_seed;
  metrics["rank_chi_square"] = hist.chi_square;
  metrics["rank_p_value"] = hist.p_value;
  metrics["rank_counts"] = hist.counts;
  double hull_mean = 0, sharp_mean = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    hull_mean += hull_values[i];
    sharp_mean += sharp_values[i];
  }
  metrics["hull_distance_mean"] = hull_mean / cases.size();
  metrics["sharpness_mean"] = sharp_mean / cases.size();
  metrics["rmse_mean"] = errs.rmse.mean();
  metrics["mae_mean"] = errs.mae.mean();
  metrics["bias_mean"] = errs.bias.mean();
  atomic_write_text(out_dir / "metrics.json", metrics.dump(2) + "\n");
}

void run_simulate(const RunConfig& cfg) {
  const int days = cfg.integer("days");
  const int horizon = cfg.integer("horizon");
  const int n_pred = cfg.integer("n_predictors");
  const int start_hour = cfg.integer("start_hour_utc");
  if (days < 1 || horizon < 1 || n_pred < 1) {
    throw std::invalid_argument("simulate: days, horizon, n_predictors must be >= 1");
  }
  const std::int64_t start = parse_timestamp_utc(cfg.text("start"));
  if (((start % 24) + 24) % 24 != start_hour) {
    throw std::invalid_argument("simulate: start timestamp must fall on start_hour_utc");
  }

  const int q = horizon;
  const int r = horizon * n_pred;
  const int t = q + r;
  const int k_true = cfg.integer("sim_atoms");
  const double pi_true = cfg.number("sim_pi");
  if (k_true < 1 || pi_true < 0 || pi_true > 1) {
    throw std::invalid_argument("simulate: sim_atoms must be >= 1 and sim_pi in [0,1]");
  }

  // Ground truth: atom entries scaled so the signal has unit variance per
  // dimension before destandardization; the sidecar records everything.
  ModelEstimate truth;
  truth.dictionary.q = q;
  truth.dictionary.r = r;
  truth.dictionary.atoms.resize(t, k_true);
  const double atom_sd =
      1.0 / std::sqrt(std::max(1.0, k_true * pi_true));
  Rng rng = Rng::keyed(cfg.u64("seed"), {0x51});
  for (int k = 0; k < k_true; ++k) {
    for (int j = 0; j < t; ++j) truth.dictionary.atoms(j, k) = atom_sd * rng.normal();
  }
  truth.pi = Eigen::VectorXd::Constant(k_true, pi_true);
  truth.gamma_s = cfg.number("sim_gamma_s");
  truth.gamma_e = cfg.number("sim_gamma_e");
  truth.standardization.means = Eigen::VectorXd::Constant(t, cfg.number("sim_mean"));
  truth.standardization.scales = Eigen::VectorXd::Constant(t, cfg.number("sim_scale"));
  truth.validate();

  const std::vector<Instance> draws = simulate(truth, days, cfg.u64("seed"));

  const int rows = 24 * (days - 1) + q;
  Eigen::MatrixXd grid =
      Eigen::MatrixXd::Constant(rows, n_pred + 1, std::numeric_limits<double>::quiet_NaN());
  for (int d = 0; d < days; ++d) {
    const int row0 = 24 * d;
    for (int p = 0; p < n_pred; ++p) {
      grid.col(p).segment(row0, q) = draws[d].x.segment(static_cast<Eigen::Index>(p) * q, q);
    }
    grid.col(n_pred).segment(row0, q) = draws[d].y;
  }

  std::string text = "timestamp";
  for (int p = 1; p <= n_pred; ++p) text += ",pred" + std::to_string(p);
  text += ",target\n";
  for (int row = 0; row < rows; ++row) {
    text += format_timestamp_utc(start + row);
    for (int col = 0; col <= n_pred; ++col) {
      text += ',';
      if (!std::isnan(grid(row, col))) text += format_double(grid(row, col));
    }
    text += '\n';
  }

  const auto out = cfg.out_dir();
  std::filesystem::create_directories(out);
  atomic_write_text(out / "dataset.csv", text);
  save_model(truth, out / "truth_model.json");
  cfg.echo(out);
}

void run_train(const RunConfig& cfg) {
  const auto out = cfg.out_dir();
  std::filesystem::create_directories(out);
  const std::vector<Instance> data = instances_from(cfg);
  train_and_save(data, cfg, cfg.u64("seed"), out);
  cfg.echo(out);
}

void run_forecast(const RunConfig& cfg) {
  const auto out = cfg.out_dir();
  std::filesystem::create_directories(out);
  const ModelEstimate theta = load_model(cfg.text("model"));
  const std::vector<Instance> data = instances_from(cfg);
  const ForecastConfig fc = forecast_config_from(cfg, cfg.u64("seed"));
  const std::vector<Ensemble> ensembles = forecast_all(theta, data, fc);
  write_scenarios_csv(out / "scenarios.csv", ensembles);
  cfg.echo(out);
}

void run_evaluate(const RunConfig& cfg) {
  const auto out = cfg.out_dir();
  std::filesystem::create_directories(out);
  const std::vector<Instance> data = instances_from(cfg);
  std::map<std::string, Eigen::VectorXd> actuals;
  for (const auto& inst : data) actuals[inst.id] = inst.y;

  const NamedEnsembles primary = read_scenarios_csv(cfg.text("scenarios"));
  NamedEnsembles baseline;
  const bool has_baseline = !cfg.text("baseline").empty();
  if (has_baseline) baseline = read_scenarios_csv(cfg.text("baseline"));

  evaluate_ensembles(out, primary, actuals, has_baseline ? &baseline : nullptr,
                     cfg.u64("seed"), /*write_fancharts=*/true);
  cfg.echo(out);
}

void run_cv(const RunConfig& cfg) {
  const auto out = cfg.out_dir();
  std::filesystem::create_directories(out);
  const std::vector<Instance> data = instances_from(cfg);
  const int k = cfg.integer("folds");
  const auto folds = fold_split(static_cast<int>(data.size()), k);

  NamedEnsembles pooled;
  std::map<std::string, Eigen::VectorXd> actuals;
  for (const auto& inst : data) actuals[inst.id] = inst.y;

  for (std::size_t j = 0; j < folds.size(); ++j) {
    try {
      char dirbuf[16];
      std::snprintf(dirbuf, sizeof(dirbuf), "fold%02zu", j);
      const std::filesystem::path fold_dir = out / dirbuf;
      std::filesystem::create_directories(fold_dir);

      std::vector<Instance> train_data, test_data;
      for (int idx : folds[j].train) train_data.push_back(data[idx]);
      for (int idx : folds[j].test) test_data.push_back(data[idx]);

      const std::uint64_t fold_seed = mix64(cfg.u64("seed"), j);
      const ModelEstimate theta = train_and_save(train_data, cfg, fold_seed, fold_dir);
      const ForecastConfig fc = forecast_config_from(cfg, fold_seed);
      const std::vector<Ensemble> ensembles = forecast_all(theta, test_data, fc);
      write_scenarios_csv(fold_dir / "scenarios.csv", ensembles);

      NamedEnsembles named;
      for (const auto& ens : ensembles) named.emplace_back(ens.instance_id, ens.scenarios);
      evaluate_ensembles(fold_dir, named, actuals, nullptr, fold_seed,
                         /*write_fancharts=*/false);
      pooled.insert(pooled.end(), named.begin(), named.end());
    } catch (const std::exception& err) {
      throw std::runtime_error("cv fold " + std::to_string(j) + ": " + err.what());
    }
  }

  evaluate_ensembles(out / "pooled", pooled, actuals, nullptr, cfg.u64("seed"),
                     /*write_fancharts=*/true);
  cfg.echo(out);
}

void run_command(const RunConfig& cfg) {
  if (cfg.command() == "simulate") run_simulate(cfg);
  else if (cfg.command() == "train") run_train(cfg);
  else if (cfg.command() == "forecast") run_forecast(cfg);
  else if (cfg.command() == "evaluate") run_evaluate(cfg);
  else if (cfg.command() == "cv") run_cv(cfg);
  else throw std::invalid_argument("unknown command '" + cfg.command() + "'");
}

}  // namespace scengen::cli
