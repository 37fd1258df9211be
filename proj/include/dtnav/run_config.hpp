#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "dtnav/nav_env.hpp"
#include "dtnav/perception.hpp"
#include "dtnav/physical_server.hpp"
#include "dtnav/td3_agent.hpp"
#include "dtnav/training.hpp"
#include "dtnav/twin_client.hpp"

namespace dtnav {

/// Unknown or ill-typed configuration key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& key, const std::string& why)
      : std::invalid_argument("config key '" + key + "': " + why), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct RunConfig {
  std::uint64_t seed = 1;
  std::string output_dir = "run";

  WorldConfig world;
  EnvConfig env;
  PerceptionParams perception;
  Td3Config td3;
  TrainConfig train;
  std::size_t buffer_capacity = 100000;

  int eval_episodes = 50;
  std::uint64_t eval_seed_offset = 1000000;

  double danger_threshold = 1.0;
  RetrainConfig retrain;
  std::string endpoint = "127.0.0.1:5555";
  int io_timeout_ms = 30000;
  int pause_timeout_ms = 600000;
  int stall_window = 50;
  double stall_progress = 0.2;

  void validate() const;
  TwinConfig twin_config() const;
  PhysicalParams physical_params() const;
};

/// Every key present, grouped in sections: world, env, lidar, perception, td3,
/// train, eval, twin, plus top-level seed and output_dir.
nlohmann::json config_to_json(const RunConfig& config);
/// Starts from defaults; unknown keys raise ConfigError.
RunConfig config_from_json(const nlohmann::json& doc);

RunConfig load_config(const std::filesystem::path& path);
void save_config(const RunConfig& config, const std::filesystem::path& path);

/// Applies "section.key=value" overrides; value is parsed as JSON, falling back to a string.
void apply_overrides(RunConfig& config, const std::vector<std::string>& assignments);

}  // namespace dtnav
