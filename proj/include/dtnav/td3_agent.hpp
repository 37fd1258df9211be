#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dtnav/mlp.hpp"
#include "dtnav/navigation.hpp"
#include "dtnav/replay_buffer.hpp"

namespace dtnav {

struct Td3Config {
  std::vector<int> hidden{256, 256};
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  double gamma = 0.99;
  double tau = 0.005;
  int policy_delay = 2;
  double policy_noise = 0.2;
  double noise_clip = 0.5;
};

struct UpdateLosses {
  double critic1_loss = 0.0;
  double critic2_loss = 0.0;
  /// Mean critic-1 value of the sampled (state, action) pairs before the update.
  double avg_q = 0.0;
  bool actor_updated = false;
  double actor_loss = 0.0;
};

/// Twin-critic deterministic actor-critic agent.
class Td3Agent {
 public:
  static constexpr int kActionDim = 2;

  Td3Agent(int state_dim, Td3Config config, std::uint64_t seed);

  /// Deterministic policy output in [-1, 1]^2.
  Action act(const std::vector<double>& state) const;

  /// TD targets r + gamma * (1 - done) * min(Q1', Q2')(s', smoothed target action).
  /// Consumes smoothing noise from the agent's generator.
  Eigen::RowVectorXd td_targets(const Batch& batch);

  UpdateLosses update(const Batch& batch, long step);

  int state_dim() const { return state_dim_; }
  const Td3Config& config() const { return config_; }
  std::string architecture() const;

  Mlp actor, actor_target;
  Mlp critic1, critic2, critic1_target, critic2_target;
  Adam actor_opt, critic1_opt, critic2_opt;
  std::mt19937_64 rng;

 private:
  Eigen::MatrixXd critic_input(const Eigen::MatrixXd& states, const Eigen::MatrixXd& actions) const;

  int state_dim_;
  Td3Config config_;
};

UpdateLosses td3_update(Td3Agent& agent, const std::vector<Transition>& batch, long step);

}  // namespace dtnav
