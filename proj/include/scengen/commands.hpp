#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <map>
#include <string>
#include <vector>

#include "scengen/forecast.hpp"
#include "scengen/metrics.hpp"

namespace scengen::cli {

/// Effective configuration of one command: built-in defaults overlaid by a
/// flat JSON config file, overlaid by command-line flag values. The resolved
/// object is echoed into every output directory as config.resolved.json and
/// is sufficient to reproduce the run.
class RunConfig {
 public:
  static nlohmann::json defaults(const std::string& command);
  static RunConfig resolve(const std::string& command,
                           const std::string& config_path,
                           const nlohmann::json& flag_overrides);

  const std::string& command() const { return command_; }
  const nlohmann::json& values() const { return values_; }

  double number(const std::string& key) const;
  int integer(const std::string& key) const;
  std::uint64_t u64(const std::string& key) const;
  std::string text(const std::string& key) const;

  std::filesystem::path out_dir() const { return text("out"); }
  /// Comma-separated list value; empty string means empty list.
  std::vector<std::string> name_list(const std::string& key) const;

  void echo(const std::filesystem::path& dir) const;

 private:
  std::string command_;
  nlohmann::json values_;
};

void run_simulate(const RunConfig& cfg);
void run_train(const RunConfig& cfg);
void run_forecast(const RunConfig& cfg);
void run_evaluate(const RunConfig& cfg);
void run_cv(const RunConfig& cfg);

/// Dispatch by cfg.command(); throws std::invalid_argument for unknown names.
void run_command(const RunConfig& cfg);

/// Ordered per-instance ensembles as written to / read from scenarios CSV.
using NamedEnsembles = std::vector<std::pair<std::string, Eigen::MatrixXd>>;

void write_scenarios_csv(const std::filesystem::path& path,
                         const std::vector<Ensemble>& ensembles);
NamedEnsembles read_scenarios_csv(const std::filesystem::path& path);

/// Verification products for one set of ensembles: rank histogram data,
/// per-horizon closest-scenario errors, hull-distance and sharpness tables
/// (paired against a baseline over common instances when given), fan-chart
/// CSVs, and a metrics.json summary.
void evaluate_ensembles(const std::filesystem::path& out_dir,
                        const NamedEnsembles& primary,
                        const std::map<std::string, Eigen::VectorXd>& actuals,
                        const NamedEnsembles* baseline, std::uint64_t tie_seed,
                        bool write_fancharts);

}  // namespace scengen::cli
