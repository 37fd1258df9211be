#include "dtnav/retrain.hpp"

namespace dtnav {

std::string to_string(RetrainStatus status) {
  switch (status) {
    case RetrainStatus::AlreadySafe: return "already_safe";
    case RetrainStatus::Retrained: return "retrained";
    case RetrainStatus::RetrainFailed: return "retrain_failed";
  }
  return "retrain_failed";
}

bool verify_path(const Td3Agent& agent, const World& local_world, NavEnv& env, EpisodeTrace* trace) {
  EpisodeTrace episode = run_episode(greedy_policy(agent), env, local_world);
  const bool ok = episode.outcome == "goal";
  if (trace) *trace = std::move(episode);
  return ok;
}

RetrainResult retrain_procedure(Td3Agent& agent, ReplayBuffer& buffer, const World& local_world,
                                const EnvConfig& env_config, const RetrainConfig& config, std::uint64_t seed) {
  RetrainResult result;
  NavEnv verify_env(env_config);
  ++result.verifications;
  if (verify_path(agent, local_world, verify_env, &result.verification)) {
    result.status = RetrainStatus::AlreadySafe;
    return result;
  }
  if (config.step_budget <= 0) return result;

  NavEnv train_env(env_config);
  TrainConfig tc;
  tc.total_steps = config.step_budget;
  tc.warmup_steps = 0;
  tc.batch_size = config.batch_size;
  tc.expl_noise = config.expl_noise;
  tc.expl_noise_final = config.expl_noise;

  bool verified = false;
  TrainHooks hooks;
  hooks.on_episode = [&](const EpisodeLog&, long env_steps) {
    result.env_steps = env_steps;
    ++result.verifications;
    verified = verify_path(agent, local_world, verify_env, &result.verification);
    return verified;
  };
  const WorldSource same_world = [&local_world](std::uint64_t) { return local_world; };
  const TrainingLog log = train(train_env, same_world, agent, buffer, tc, seed, hooks);
  result.gradient_steps = static_cast<long>(log.updates.size());
  if (!verified) {
    // The budget may end mid-episode; check the final policy once more.
    result.env_steps = config.step_budget;
    ++result.verifications;
    verified = verify_path(agent, local_world, verify_env, &result.verification);
  }
  result.status = verified ? RetrainStatus::Retrained : RetrainStatus::RetrainFailed;
  return result;
}

}  // namespace dtnav
