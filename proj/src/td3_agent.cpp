#include "dtnav/td3_agent.hpp"

#include <algorithm>
#include <sstream>

namespace dtnav {

namespace {

Mlp make_net(int in, const std::vector<int>& hidden, int out, Activation head) {
  std::vector<int> widths{in};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(out);
  std::vector<Activation> acts(hidden.size(), Activation::Relu);
  acts.push_back(head);
  return Mlp(std::move(widths), std::move(acts));
}

}  // namespace

Td3Agent::Td3Agent(int state_dim, Td3Config config, std::uint64_t seed)
    : rng(seed), state_dim_(state_dim), config_(std::move(config)) {
  if (state_dim <= 0) throw ValidationError("state dimension must be positive");
  if (config_.policy_delay < 1) throw ValidationError("policy_delay must be at least 1");
  if (config_.gamma < 0.0 || config_.gamma > 1.0) throw ValidationError("gamma must lie in [0, 1]");
  actor = make_net(state_dim, config_.hidden, kActionDim, Activation::Tanh);
  critic1 = make_net(state_dim + kActionDim, config_.hidden, 1, Activation::Identity);
  critic2 = critic1;
  actor.init_uniform(rng);
  critic1.init_uniform(rng);
  critic2.init_uniform(rng);
  actor_target = actor;
  critic1_target = critic1;
  critic2_target = critic2;
  actor_opt = Adam(actor, config_.actor_lr);
  critic1_opt = Adam(critic1, config_.critic_lr);
  critic2_opt = Adam(critic2, config_.critic_lr);
}

std::string Td3Agent::architecture() const {
  return "actor=" + actor.descriptor() + ";critic=" + critic1.descriptor();
}

Action Td3Agent::act(const std::vector<double>& state) const {
  if (static_cast<int>(state.size()) != state_dim_) throw ValidationError("state dimension mismatch");
  const Eigen::VectorXd out = actor.forward_one(Eigen::Map<const Eigen::VectorXd>(state.data(), state_dim_));
  return Action{out(0), out(1)}.clamped();
}

Eigen::MatrixXd Td3Agent::critic_input(const Eigen::MatrixXd& states, const Eigen::MatrixXd& actions) const {
  Eigen::MatrixXd in(states.rows() + actions.rows(), states.cols());
  in.topRows(states.rows()) = states;
  in.bottomRows(actions.rows()) = actions;
  return in;
}

Eigen::RowVectorXd Td3Agent::td_targets(const Batch& batch) {
  Eigen::MatrixXd next_actions = actor_target.forward(batch.next_states);
  std::normal_distribution<double> noise(0.0, config_.policy_noise);
  for (Eigen::Index j = 0; j < next_actions.cols(); ++j) {
    for (Eigen::Index i = 0; i < next_actions.rows(); ++i) {
      const double eps = config_.policy_noise > 0.0 ? std::clamp(noise(rng), -config_.noise_clip, config_.noise_clip) : 0.0;
      next_actions(i, j) = std::clamp(next_actions(i, j) + eps, -1.0, 1.0);
    }
  }
  const Eigen::MatrixXd in = critic_input(batch.next_states, next_actions);
  const Eigen::RowVectorXd q1 = critic1_target.forward(in).row(0);
  const Eigen::RowVectorXd q2 = critic2_target.forward(in).row(0);
  const Eigen::RowVectorXd q_min = q1.cwiseMin(q2);
  return batch.rewards.array() + config_.gamma * (1.0 - batch.dones.array()) * q_min.array();
}

UpdateLosses Td3Agent::update(const Batch& batch, long step) {
  if (batch.size() == 0) throw ValidationError("empty batch");
  const double n = static_cast<double>(batch.size());
  UpdateLosses losses;

  const Eigen::RowVectorXd y = td_targets(batch);
  const Eigen::MatrixXd in = critic_input(batch.states, batch.actions);

  Mlp::Cache c1_cache, c2_cache;
  const Eigen::RowVectorXd q1 = critic1.forward(in, c1_cache).row(0);
  const Eigen::RowVectorXd q2 = critic2.forward(in, c2_cache).row(0);
  losses.avg_q = q1.mean();
  const Eigen::RowVectorXd e1 = q1 - y;
  const Eigen::RowVectorXd e2 = q2 - y;
  losses.critic1_loss = e1.squaredNorm() / n;
  losses.critic2_loss = e2.squaredNorm() / n;
  critic1_opt.step(critic1, critic1.backward(c1_cache, (2.0 / n) * e1));
  critic2_opt.step(critic2, critic2.backward(c2_cache, (2.0 / n) * e2));

  if (step % config_.policy_delay == 0) {
    // Actor ascends Q1(s, actor(s)): loss = -mean(Q1).
    Mlp::Cache a_cache, q_cache;
    const Eigen::MatrixXd actions = actor.forward(batch.states, a_cache);
    const Eigen::RowVectorXd q = critic1.forward(critic_input(batch.states, actions), q_cache).row(0);
    losses.actor_loss = -q.mean();
    const MlpGradients critic_grads = critic1.backward(q_cache, Eigen::RowVectorXd::Constant(batch.size(), -1.0 / n));
    const Eigen::MatrixXd d_actions = critic_grads.input.bottomRows(kActionDim);
    actor_opt.step(actor, actor.backward(a_cache, d_actions));
    losses.actor_updated = true;

    actor_target.polyak_update(actor, config_.tau);
    critic1_target.polyak_update(critic1, config_.tau);
    critic2_target.polyak_update(critic2, config_.tau);
  }
  return losses;
}

UpdateLosses td3_update(Td3Agent& agent, const std::vector<Transition>& batch, long step) {
  return agent.update(make_batch(batch), step);
}

}  // namespace dtnav
