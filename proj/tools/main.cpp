#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <json.hpp>
#include <string>

#include "scengen/commands.hpp"

namespace {

using nlohmann::json;

struct PendingCommand {
  std::string name;
  std::string config_path;
  std::map<std::string, std::string> raw_flags;  // key -> value as typed
};

// One flag per config key; types follow the defaults table so overrides land
// in the config with the right JSON type.
void add_command(CLI::App& app, PendingCommand& pending, const std::string& name,
                 const std::string& description, std::string& chosen) {
  CLI::App* sub = app.add_subcommand(name, description);
  sub->add_option("--config", pending.config_path, "JSON config file");
  const json defaults = scengen::cli::RunConfig::defaults(name);
  for (auto it = defaults.begin(); it != defaults.end(); ++it) {
    const std::string key = it.key();
    sub->add_option_function<std::string>(
        "--" + key,
        [&pending, key](const std::string& value) { pending.raw_flags[key] = value; },
        "override config key '" + key + "'");
  }
  sub->callback([&chosen, name, &pending]() {
    chosen = name;
    pending.name = name;
  });
}

json typed_overrides(const PendingCommand& pending) {
  const json defaults = scengen::cli::RunConfig::defaults(pending.name);
  json overrides = json::object();
  for (const auto& [key, raw] : pending.raw_flags) {
    const json& ref = defaults.at(key);
    if (ref.is_number_unsigned()) {
      overrides[key] = static_cast<std::uint64_t>(std::stoull(raw));
    } else if (ref.is_number_integer()) {
      overrides[key] = static_cast<std::int64_t>(std::stoll(raw));
    } else if (ref.is_number_float()) {
      overrides[key] = std::stod(raw);
    } else {
      overrides[key] = raw;
    }
  }
  return overrides;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scengen: scenario forecasting with Bayesian dictionary learning"};
  app.require_subcommand(1);

  std::string chosen;
  PendingCommand pending;
  add_command(app, pending, "simulate", "write a synthetic hourly dataset", chosen);
  add_command(app, pending, "train", "train a model on an hourly dataset", chosen);
  add_command(app, pending, "forecast", "draw scenario ensembles from a model", chosen);
  add_command(app, pending, "evaluate", "verify ensembles against actuals", chosen);
  add_command(app, pending, "cv", "cross-validated train/forecast/evaluate", chosen);

  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = scengen::cli::RunConfig::resolve(chosen, pending.config_path,
                                                      typed_overrides(pending));
    scengen::cli::run_command(cfg);
  } catch (const std::exception& err) {
    std::fprintf(stderr, "scengen %s: %s\n", chosen.c_str(), err.what());
    return 1;
  }
  return 0;
}
