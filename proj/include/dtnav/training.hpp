#pragma once

#include <cstdint>
#include <functional>

#include "dtnav/nav_env.hpp"
#include "dtnav/records.hpp"
#include "dtnav/replay_buffer.hpp"
#include "dtnav/td3_agent.hpp"

namespace dtnav {

/// Supplies the world for the n-th episode.
using WorldSource = std::function<World(std::uint64_t episode)>;
using Policy = std::function<Action(const StateVector&)>;

struct TrainConfig {
  long total_steps = 150000;
  long warmup_steps = 1000;
  int batch_size = 128;
  double expl_noise = 0.1;
  double expl_noise_final = 0.0;
  /// Steps over which exploration noise decays linearly; 0 means total_steps.
  long expl_decay_steps = 0;
};

struct TrainHooks {
  /// Called after every finished episode; returning true stops training.
  std::function<bool(const EpisodeLog&, long env_steps)> on_episode;
  std::function<void(long env_steps)> on_progress;
};

/// Samples worlds with sample_world(config, base_seed + episode).
WorldSource sampled_worlds(const WorldConfig& config, std::uint64_t base_seed);

/// Episodic TD3 training. One update per environment step once warmup is over
/// and the buffer holds a full batch.
TrainingLog train(NavEnv& env, const WorldSource& worlds, Td3Agent& agent, ReplayBuffer& buffer,
                  const TrainConfig& config, std::uint64_t seed, const TrainHooks& hooks = {});

Policy greedy_policy(const Td3Agent& agent);

/// Runs one deterministic episode and records every tick.
EpisodeTrace run_episode(const Policy& policy, NavEnv& env, World world, int episode_index = 0);

struct EvalResult {
  Metrics metrics;
  std::vector<EpisodeTrace> episodes;
};

EvalResult evaluate(const Policy& policy, NavEnv& env, const WorldSource& worlds, int n_episodes);
EvalResult evaluate(const Td3Agent& agent, NavEnv& env, const WorldSource& worlds, int n_episodes);

}  // namespace dtnav
