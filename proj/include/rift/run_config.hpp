#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rift/evaluation.hpp"

namespace rift {

/// Declarative run configuration: data source, env/ppo parameters, grids and
/// window layout.  Fully serializable; its hash is embedded in every output.
struct RunConfig {
  std::optional<std::string> csv_path;
  std::optional<SyntheticSpec> synthetic;

  IndicatorConfig indicators;
  double phi_bps = 1.0;
  double theta_bps = 1.0;
  std::string reward_mode = "RIF";
  bool charge_exit_commission = true;

  PpoConfig ppo;

  std::vector<double> theta_grid_bps;  // empty -> default grid
  std::vector<double> phi_grid_bps;

  int train_months = 12;
  int val_months = 3;
  int test_months = 3;

  std::uint64_t seed = 42;
  std::string out_dir = "out";

  EnvConfig env_config() const;
  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::string& path);

  /// FNV-1a over the canonical JSON dump.
  std::uint64_t hash() const;
};

std::uint64_t fnv1a(const std::string& text);

/// Loads days from the configured source (CSV file or synthetic generator).
std::vector<TradingDay> load_days(const RunConfig& config);

}  // namespace rift
