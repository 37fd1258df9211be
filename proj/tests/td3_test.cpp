#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <unistd.h>

#include "dtnav/checkpoint.hpp"
#include "dtnav/replay_buffer.hpp"
#include "dtnav/td3_agent.hpp"

using namespace dtnav;
namespace fs = std::filesystem;

namespace {

Transition random_transition(std::mt19937_64& rng, int dim, bool done) {
  std::uniform_real_distribution<double> u(-1, 1);
  Transition t;
  for (int i = 0; i < dim; ++i) t.state.push_back(u(rng));
  for (int i = 0; i < dim; ++i) t.next_state.push_back(u(rng));
  t.action = {u(rng), u(rng)};
  t.reward = 10 * u(rng);
  t.done = done;
  return t;
}

std::vector<Transition> random_batch(std::mt19937_64& rng, int dim, int n, bool done) {
  std::vector<Transition> out;
  for (int i = 0; i < n; ++i) out.push_back(random_transition(rng, dim, done));
  return out;
}

Td3Config small_config() {
  Td3Config c;
  c.hidden = {16, 16};
  return c;
}

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("dtnav_td3_test_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST(Td3, TargetsStartAsCopies) {
  Td3Agent agent(6, small_config(), 1);
  EXPECT_TRUE(agent.actor == agent.actor_target);
  EXPECT_TRUE(agent.critic1 == agent.critic1_target);
  EXPECT_TRUE(agent.critic2 == agent.critic2_target);
  EXPECT_FALSE(agent.critic1 == agent.critic2);
  EXPECT_EQ(agent.architecture(), "actor=6-16relu-16relu-2tanh;critic=8-16relu-16relu-1linear");
}

TEST(Td3, TerminalTargetIsReward) {
  std::mt19937_64 rng(2);
  Td3Agent agent(6, small_config(), 3);
  const Batch b = make_batch(random_batch(rng, 6, 32, true));
  const Eigen::RowVectorXd y = agent.td_targets(b);
  for (Eigen::Index i = 0; i < b.size(); ++i) EXPECT_EQ(y[i], b.rewards[i]);
}

TEST(Td3, TauOneCopiesOnlineAfterDelayedStep) {
  std::mt19937_64 rng(4);
  Td3Config cfg = small_config();
  cfg.tau = 1.0;
  Td3Agent agent(6, cfg, 5);
  const Batch b = make_batch(random_batch(rng, 6, 16, false));
  const auto losses = agent.update(b, 1);  // not a delayed step
  EXPECT_FALSE(losses.actor_updated);
  EXPECT_FALSE(agent.critic1 == agent.critic1_target);
  EXPECT_TRUE(agent.update(b, 2).actor_updated);
  EXPECT_TRUE(agent.actor == agent.actor_target);
  EXPECT_TRUE(agent.critic1 == agent.critic1_target);
  EXPECT_TRUE(agent.critic2 == agent.critic2_target);
}

TEST(Td3, TauZeroTargetsNeverMove) {
  std::mt19937_64 rng(6);
  Td3Config cfg = small_config();
  cfg.tau = 0.0;
  Td3Agent agent(6, cfg, 7);
  const Mlp a0 = agent.actor_target, c10 = agent.critic1_target, c20 = agent.critic2_target;
  for (long step = 1; step <= 10; ++step) agent.update(make_batch(random_batch(rng, 6, 8, false)), step);
  EXPECT_TRUE(agent.actor_target == a0);
  EXPECT_TRUE(agent.critic1_target == c10);
  EXPECT_TRUE(agent.critic2_target == c20);
  EXPECT_FALSE(agent.actor == a0);
}

TEST(Td3, PolyakHistory) {
  // With online nets frozen by a zero learning rate, k delayed steps leave
  // target = online + (1 - tau)^k (target0 - online).
  std::mt19937_64 rng(8);
  Td3Config cfg = small_config();
  cfg.tau = 0.1;
  cfg.actor_lr = 0.0;
  cfg.critic_lr = 0.0;
  cfg.policy_delay = 1;
  Td3Agent agent(6, cfg, 9);
  std::mt19937_64 init(10);
  agent.critic1_target.init_uniform(init);
  const Mlp t0 = agent.critic1_target;
  for (long step = 1; step <= 5; ++step) agent.update(make_batch(random_batch(rng, 6, 4, false)), step);
  const double keep = std::pow(0.9, 5);
  for (std::size_t l = 0; l < t0.layer_count(); ++l) {
    const Eigen::MatrixXd expected = agent.critic1.weight(l) + keep * (t0.weight(l) - agent.critic1.weight(l));
    EXPECT_TRUE(agent.critic1_target.weight(l).isApprox(expected, 1e-12));
  }
}

TEST(Td3, HandComputedLinearCritics) {
  // No hidden layers: actor a' = tanh(Wa s' + ba), critics Q = w . [s'; a'] + b.
  Td3Config cfg;
  cfg.hidden = {};
  cfg.policy_noise = 0.0;
  cfg.gamma = 0.9;
  Td3Agent agent(2, cfg, 11);
  agent.actor_target.weight(0) << 0.5, 0.0, 0.0, -1.0;
  agent.actor_target.bias(0) << 0.0, 0.25;
  agent.critic1_target.weight(0) << 1.0, 2.0, 3.0, 4.0;
  agent.critic1_target.bias(0) << 0.5;
  agent.critic2_target.weight(0) << -1.0, 0.0, 1.0, 1.0;
  agent.critic2_target.bias(0) << 2.0;

  Transition t;
  t.state = {0, 0};
  t.next_state = {1.0, 0.5};
  t.action = {0, 0};
  t.reward = 1.5;
  const Eigen::RowVectorXd y = agent.td_targets(make_batch({t}));

  const double a1 = std::tanh(0.5), a2 = std::tanh(-0.5 + 0.25);
  const double q1 = 1.0 * 1.0 + 2.0 * 0.5 + 3.0 * a1 + 4.0 * a2 + 0.5;
  const double q2 = -1.0 + 0.0 + a1 + a2 + 2.0;
  EXPECT_NEAR(y[0], 1.5 + 0.9 * std::min(q1, q2), 1e-12);
}

TEST(Td3, TargetIsPessimistic) {
  std::mt19937_64 rng(12);
  Td3Config cfg = small_config();
  cfg.policy_noise = 0.0;
  Td3Agent agent(6, cfg, 13);
  std::mt19937_64 init(14);
  agent.critic2_target.init_uniform(init);
  const Batch b = make_batch(random_batch(rng, 6, 64, false));
  const Eigen::RowVectorXd y = agent.td_targets(b);
  const Eigen::MatrixXd a = agent.actor_target.forward(b.next_states);
  Eigen::MatrixXd in(8, b.size());
  in << b.next_states, a;
  const Eigen::RowVectorXd y1 = b.rewards.array() + cfg.gamma * agent.critic1_target.forward(in).row(0).array();
  const Eigen::RowVectorXd y2 = b.rewards.array() + cfg.gamma * agent.critic2_target.forward(in).row(0).array();
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    EXPECT_LE(y[i], y1[i] + 1e-12);
    EXPECT_LE(y[i], y2[i] + 1e-12);
    EXPECT_NEAR(y[i], std::min(y1[i], y2[i]), 1e-12);
  }
}

TEST(Td3, SmoothingNoiseIsClipped) {
  std::mt19937_64 rng(15);
  Td3Config cfg;
  cfg.hidden = {};
  cfg.policy_noise = 10.0;
  cfg.noise_clip = 0.5;
  cfg.gamma = 1.0;
  Td3Agent agent(1, cfg, 16);
  // Critic reads only the first action component; actor target outputs 0.
  agent.actor_target.set_zero();
  agent.critic1_target.set_zero();
  agent.critic1_target.weight(0)(0, 1) = 1.0;
  agent.critic2_target = agent.critic1_target;
  std::vector<Transition> ts(200, Transition{{0.0}, {0, 0}, 0.0, {0.0}, false});
  const Eigen::RowVectorXd y = agent.td_targets(make_batch(ts));
  EXPECT_LE(y.maxCoeff(), 0.5);
  EXPECT_GE(y.minCoeff(), -0.5);
  EXPECT_GT(y.maxCoeff(), 0.49);  // large sigma saturates the clip
}

TEST(Td3, CriticRegressesTowardTarget) {
  std::mt19937_64 rng(17);
  Td3Config cfg = small_config();
  cfg.critic_lr = 1e-2;
  Td3Agent agent(6, cfg, 18);
  const Batch b = make_batch(random_batch(rng, 6, 32, true));
  const double first = agent.update(b, 1).critic1_loss;
  double last = first;
  for (long s = 2; s <= 300; ++s) last = agent.update(b, s).critic1_loss;
  EXPECT_LT(last, 0.1 * first);
  EXPECT_TRUE(agent.actor.all_finite());
}

TEST(Td3, UpdatesAreDeterministic) {
  std::mt19937_64 r1(19), r2(19);
  Td3Agent a(6, small_config(), 20), b(6, small_config(), 20);
  for (long s = 1; s <= 5; ++s) {
    const auto la = td3_update(a, random_batch(r1, 6, 8, false), s);
    const auto lb = td3_update(b, random_batch(r2, 6, 8, false), s);
    EXPECT_EQ(la.critic1_loss, lb.critic1_loss);
    EXPECT_EQ(la.avg_q, lb.avg_q);
  }
  EXPECT_TRUE(a.actor == b.actor);
}

TEST(Td3, ActIsDeterministicAndBounded) {
  Td3Agent agent(6, small_config(), 21);
  const std::vector<double> s{0.1, -0.2, 0.3, 5, -5, 0};
  EXPECT_EQ(agent.act(s), agent.act(s));
  const Action a = agent.act(s);
  EXPECT_LE(std::abs(a.linear), 1.0);
  EXPECT_LE(std::abs(a.angular), 1.0);
  EXPECT_THROW(agent.act({1, 2}), ValidationError);
}

TEST(ReplayBuffer, KeepsLastCapacityInOrder) {
  std::mt19937_64 rng(22);
  const std::size_t cap = 10;
  ReplayBuffer buf(cap);
  std::vector<Transition> all;
  for (int i = 0; i < 27; ++i) {
    all.push_back(random_transition(rng, 3, i % 5 == 0));
    buf.push(all.back());
    ASSERT_LE(buf.size(), cap);
  }
  const auto kept = buf.in_order();
  ASSERT_EQ(kept.size(), cap);
  for (std::size_t i = 0; i < cap; ++i) EXPECT_EQ(kept[i], all[all.size() - cap + i]);
}

TEST(ReplayBuffer, SamplingNeedsEnoughData) {
  std::mt19937_64 rng(23);
  ReplayBuffer buf(100);
  for (int i = 0; i < 5; ++i) buf.push(random_transition(rng, 3, false));
  EXPECT_THROW(buf.sample(6, rng), std::exception);
  const Batch b = buf.sample(5, rng);
  EXPECT_EQ(b.size(), 5);
  EXPECT_EQ(b.states.rows(), 3);
}

TEST(ReplayBuffer, SnapshotRoundTrip) {
  std::mt19937_64 rng(24);
  ReplayBuffer buf(8);
  for (int i = 0; i < 13; ++i) buf.push(random_transition(rng, 4, i % 3 == 0));
  const auto path = temp_file("replay.bin");
  buf.save(path);
  const ReplayBuffer back = ReplayBuffer::load(path, 8);
  EXPECT_EQ(back.in_order(), buf.in_order());
  // Loading into a smaller buffer keeps the newest records.
  const ReplayBuffer small = ReplayBuffer::load(path, 3);
  const auto kept = small.in_order();
  ASSERT_EQ(kept.size(), 3u);
  EXPECT_EQ(kept.back(), buf.in_order().back());
  fs::remove(path);
}

TEST(ReplayBuffer, CorruptSnapshotRejected) {
  const auto path = temp_file("bad.bin");
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOTABUFFER";
  }
  EXPECT_THROW(ReplayBuffer::load(path, 8), std::runtime_error);
  fs::remove(path);
}

TEST(Checkpoint, RoundTrip) {
  std::mt19937_64 rng(25);
  Td3Agent agent(6, small_config(), 26);
  for (long s = 1; s <= 4; ++s) td3_update(agent, random_batch(rng, 6, 8, false), s);
  const auto path = temp_file("ck.bin");
  save_checkpoint(agent, path);
  EXPECT_EQ(checkpoint_architecture(path), agent.architecture());
  Td3Agent loaded(6, small_config(), 999);
  load_checkpoint(loaded, path);
  EXPECT_TRUE(loaded.actor == agent.actor);
  EXPECT_TRUE(loaded.critic2_target == agent.critic2_target);
  EXPECT_EQ(loaded.critic1_opt.step_count(), agent.critic1_opt.step_count());
  EXPECT_EQ(loaded.critic1_opt.v_weights()[1], agent.critic1_opt.v_weights()[1]);
  // Continuing training from the checkpoint matches continuing the original.
  std::mt19937_64 r1(27), r2(27);
  const auto la = td3_update(agent, random_batch(r1, 6, 8, false), 5);
  const auto lb = td3_update(loaded, random_batch(r2, 6, 8, false), 5);
  EXPECT_EQ(la.critic1_loss, lb.critic1_loss);
  EXPECT_TRUE(loaded.critic1 == agent.critic1);
  fs::remove(path);
}

TEST(Checkpoint, ArchitectureMismatchRejected) {
  Td3Agent agent(6, small_config(), 28);
  const auto path = temp_file("ck2.bin");
  save_checkpoint(agent, path);
  Td3Config other = small_config();
  other.hidden = {16, 8};
  Td3Agent wrong(6, other, 29);
  EXPECT_THROW(load_checkpoint(wrong, path), ArchitectureMismatch);
  Td3Agent wrong_dim(7, small_config(), 29);
  EXPECT_THROW(load_checkpoint(wrong_dim, path), ArchitectureMismatch);
  fs::remove(path);
}
