#pragma once

#include <cstdint>

#include "dtnav/nav_env.hpp"
#include "dtnav/records.hpp"
#include "dtnav/replay_buffer.hpp"
#include "dtnav/td3_agent.hpp"
#include "dtnav/training.hpp"

namespace dtnav {

struct RetrainConfig {
  /// Environment steps allowed for continued training. 0 allows verification only.
  long step_budget = 20000;
  int batch_size = 128;
  double expl_noise = 0.3;
};

enum class RetrainStatus { AlreadySafe, Retrained, RetrainFailed };

std::string to_string(RetrainStatus status);

struct RetrainResult {
  RetrainStatus status = RetrainStatus::RetrainFailed;
  long env_steps = 0;
  long gradient_steps = 0;
  int verifications = 0;
  /// The last verification episode run in the local world.
  EpisodeTrace verification;
};

/// One greedy episode from local_world.start. True iff it reaches the goal.
bool verify_path(const Td3Agent& agent, const World& local_world, NavEnv& env, EpisodeTrace* trace = nullptr);

/// Verification first; if the policy fails, continue TD3 training in the local
/// world with every episode restarting at the pause pose, verifying after each
/// episode until a verified path exists or the budget runs out.
RetrainResult retrain_procedure(Td3Agent& agent, ReplayBuffer& buffer, const World& local_world,
                                const EnvConfig& env_config, const RetrainConfig& config, std::uint64_t seed);

}  // namespace dtnav
