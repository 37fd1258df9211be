#include "dtnav/training.hpp"

#include <algorithm>

namespace dtnav {

WorldSource sampled_worlds(const WorldConfig& config, std::uint64_t base_seed) {
  return [config, base_seed](std::uint64_t episode) { return sample_world(config, base_seed + episode); };
}

TrainingLog train(NavEnv& env, const WorldSource& worlds, Td3Agent& agent, ReplayBuffer& buffer,
                  const TrainConfig& config, std::uint64_t seed, const TrainHooks& hooks) {
  if (config.batch_size <= 0) throw ValidationError("batch_size must be positive");
  TrainingLog log;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const long decay = config.expl_decay_steps > 0 ? config.expl_decay_steps : std::max(1L, config.total_steps);

  std::uint64_t episode = 0;
  bool running = false;
  StateVector state;
  EpisodeLog current;
  long updates = 0;

  for (long t = 0; t < config.total_steps; ++t) {
    if (!running) {
      state = env.reset(worlds(episode));
      current = EpisodeLog{static_cast<long>(episode), 0.0, StepEvent::None, 0};
      running = true;
    }
    const std::vector<double> s = state.features();
    Action action;
    if (t < config.warmup_steps) {
      action = {uniform(rng), uniform(rng)};
    } else {
      const double frac = std::min(1.0, static_cast<double>(t) / static_cast<double>(decay));
      const double sigma = config.expl_noise + (config.expl_noise_final - config.expl_noise) * frac;
      action = agent.act(s);
      action.linear += sigma * gauss(rng);
      action.angular += sigma * gauss(rng);
      action = action.clamped();
    }

    StepResult step = env.step(action);
    const bool done = is_terminal(step.event);
    buffer.push(Transition{s, action, step.reward, step.state.features(), done});
    current.episode_return += step.reward;
    current.steps += 1;
    state = std::move(step.state);

    if (t >= config.warmup_steps && buffer.size() >= static_cast<std::size_t>(config.batch_size)) {
      const Batch batch = buffer.sample(static_cast<std::size_t>(config.batch_size), rng);
      const UpdateLosses l = agent.update(batch, updates);
      log.updates.push_back({updates, l.critic1_loss, l.critic2_loss, l.avg_q});
      ++updates;
    }
    if (hooks.on_progress) hooks.on_progress(t + 1);

    if (done) {
      current.outcome = step.event;
      log.episodes.push_back(current);
      running = false;
      ++episode;
      if (hooks.on_episode && hooks.on_episode(current, t + 1)) break;
    }
  }
  return log;
}

Policy greedy_policy(const Td3Agent& agent) {
  return [&agent](const StateVector& s) { return agent.act(s.features()); };
}

EpisodeTrace run_episode(const Policy& policy, NavEnv& env, World world, int episode_index) {
  EpisodeTrace trace;
  trace.episode = episode_index;
  trace.goal = world.goal;
  StateVector state = env.reset(std::move(world));
  const double dt = env.config().dt;
  auto record = [&](double reward) {
    const RobotState& r = env.robot();
    TrajectoryRecord rec;
    rec.t = env.steps() * dt;
    rec.x = r.pose.x;
    rec.y = r.pose.y;
    rec.theta = r.pose.theta;
    rec.v = r.v;
    rec.w = r.w;
    rec.reward = reward;
    rec.min_scan_range = env.last_scan().min_range();
    trace.records.push_back(rec);
  };
  record(0.0);
  while (!env.done()) {
    StepResult step = env.step(policy(state));
    trace.episode_return += step.reward;
    record(step.reward);
    state = std::move(step.state);
    if (is_terminal(step.event)) trace.outcome = to_string(step.event);
  }
  return trace;
}

EvalResult evaluate(const Policy& policy, NavEnv& env, const WorldSource& worlds, int n_episodes) {
  if (n_episodes < 1) throw ValidationError("evaluation needs at least one episode");
  EvalResult result;
  for (int i = 0; i < n_episodes; ++i) {
    EpisodeTrace trace = run_episode(policy, env, worlds(static_cast<std::uint64_t>(i)), i);
    result.metrics.add(trace.outcome);
    result.episodes.push_back(std::move(trace));
  }
  return result;
}

EvalResult evaluate(const Td3Agent& agent, NavEnv& env, const WorldSource& worlds, int n_episodes) {
  return evaluate(greedy_policy(agent), env, worlds, n_episodes);
}

}  // namespace dtnav
