#include "dtnav/run_config.hpp"

#include <fstream>

namespace dtnav {

using nlohmann::json;

nlohmann::json config_to_json(const RunConfig& c) {
  json doc;
  doc["seed"] = c.seed;
  doc["output_dir"] = c.output_dir;
  doc["world"] = {{"xmin", c.world.bounds.xmin},
                  {"ymin", c.world.bounds.ymin},
                  {"xmax", c.world.bounds.xmax},
                  {"ymax", c.world.bounds.ymax},
                  {"n_obstacles", c.world.n_obstacles},
                  {"min_obstacle_size", c.world.min_obstacle_size},
                  {"max_obstacle_size", c.world.max_obstacle_size},
                  {"min_separation", c.world.min_separation},
                  {"clearance_margin", c.world.clearance_margin},
                  {"border_margin", c.world.border_margin},
                  {"min_start_goal_distance", c.world.min_start_goal_distance},
                  {"max_attempts", c.world.max_attempts}};
  doc["env"] = {{"dt", c.env.dt},
                {"safe_dist", c.env.safe_dist},
                {"goal_tol", c.env.goal_tol},
                {"step_budget", c.env.step_budget},
                {"v_max", c.env.state.limits.v_max},
                {"w_max", c.env.state.limits.w_max},
                {"n_bins", c.env.state.n_bins},
                {"world_diagonal", c.env.state.world_diagonal},
                {"goal_reward", c.env.reward.goal_reward},
                {"collision_reward", c.env.reward.collision_reward},
                {"orientation_scale", c.env.reward.orientation_scale}};
  doc["lidar"] = {{"n_beams", c.env.scan.n_beams},
                  {"angle_min", c.env.scan.angle_min},
                  {"angle_max", c.env.scan.angle_max},
                  {"max_range", c.env.scan.max_range}};
  doc["perception"] = {{"eps", c.perception.eps},
                       {"min_pts", c.perception.min_pts},
                       {"min_spawn_size", c.perception.min_spawn_size}};
  doc["td3"] = {{"hidden", c.td3.hidden},
                {"actor_lr", c.td3.actor_lr},
                {"critic_lr", c.td3.critic_lr},
                {"gamma", c.td3.gamma},
                {"tau", c.td3.tau},
                {"policy_delay", c.td3.policy_delay},
                {"policy_noise", c.td3.policy_noise},
                {"noise_clip", c.td3.noise_clip},
                {"buffer_capacity", c.buffer_capacity}};
  doc["train"] = {{"total_steps", c.train.total_steps},
                  {"warmup_steps", c.train.warmup_steps},
                  {"batch_size", c.train.batch_size},
                  {"expl_noise", c.train.expl_noise},
                  {"expl_noise_final", c.train.expl_noise_final},
                  {"expl_decay_steps", c.train.expl_decay_steps}};
  doc["eval"] = {{"episodes", c.eval_episodes}, {"seed_offset", c.eval_seed_offset}};
  doc["twin"] = {{"danger_threshold", c.danger_threshold},
                 {"retrain_step_budget", c.retrain.step_budget},
                 {"retrain_batch_size", c.retrain.batch_size},
                 {"retrain_expl_noise", c.retrain.expl_noise},
                 {"endpoint", c.endpoint},
                 {"io_timeout_ms", c.io_timeout_ms},
                 {"pause_timeout_ms", c.pause_timeout_ms},
                 {"stall_window", c.stall_window},
                 {"stall_progress", c.stall_progress}};
  return doc;
}

namespace {

template <typename T>
void read(const json& section, const std::string& prefix, const char* key, T& out) {
  try {
    out = section.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(prefix + key, e.what());
  }
}

// Reads every key of `section`, rejecting those without a handler.
template <typename Handler>
void each_key(const json& doc, const std::string& name, Handler handle) {
  if (!doc.contains(name)) return;
  const json& section = doc.at(name);
  if (!section.is_object()) throw ConfigError(name, "must be an object");
  for (auto it = section.begin(); it != section.end(); ++it) {
    if (!handle(section, name + ".", it.key())) throw ConfigError(name + "." + it.key(), "unknown key");
  }
}

}  // namespace

RunConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("<root>", "config must be an object");
  RunConfig c;
  static const std::vector<std::string> sections{"world", "env", "lidar", "perception", "td3", "train", "eval", "twin"};
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& k = it.key();
    if (k == "seed") {
      read(doc, "", "seed", c.seed);
    } else if (k == "output_dir") {
      read(doc, "", "output_dir", c.output_dir);
    } else if (std::find(sections.begin(), sections.end(), k) == sections.end()) {
      throw ConfigError(k, "unknown key");
    }
  }

#define DTNAV_FIELD(name, target)    \
  if (key == name) {                 \
    read(s, p, name, target);        \
    return true;                     \
  }

  each_key(doc, "world", [&](const json& s, const std::string& p, const std::string& key) {
    DTNAV_FIELD("xmin", c.world.bounds.xmin)
    DTNAV_FIELD("ymin", c.world.bounds.ymin)
    DTNAV_FIELD("xmax", c.world.bounds.xmax)
    DTNAV_FIELD("ymax", c.world.bounds.ymax)
    DTNAV_FIELD("n_obstacles", c.world.n_obstacles)
    DTNAV_FIELD("min_obstacle_size", c.world.min_obstacle_size)
    DTNAV_FIELD("max_obstacle_size", c.world.max_obstacle_size)
    DTNAV_FIELD("min_separation", c.world.min_separation)
    DTNAV_FIELD("clearance_margin", c.world.clearance_margin)
    DTNAV_FIELD("border_margin", c.world.border_margin)
    DTNAV_FIELD("min_start_goal_distance", c.world.min_start_goal_distance)
    DTNAV_FIELD("max_attempts", c.world.max_attempts)
    return false;
  });
  each_key(doc, "env", [&](const json& s, const std::string& p, const std::string& key) {
    DTNAV_FIELD("dt", c.env.dt)
    DTNAV_FIELD("safe_dist", c.env.safe_dist)
    DTNAV_FIELD("goal_tol", c.env.goal_tol)
    DTNAV_FIELD("step_budget", c.env.step_budget)
    DTNAV_FIELD("v_max", c.env.state.limits.v_max)
    DTNAV_FIELD("w_max", c.env.state.limits.w_max)
    DTNAV_FIELD("n_bins", c.env.state.n_bins)
    DTNAV_FIELD("world_diagonal", c.env.state.world_diagonal)
    DTNAV_FIELD("goal_reward", c.env.reward.goal_reward)
    DTNAV_FIELD("collision_reward", c.env.reward.collision_reward)
    DTNAV_FIELD("orientation_scale", c.env.reward.orientation_scale)
    return false;
  });
  each_key(doc, "lidar", [&](const json& s, const std::string& p, const std::string& key) {
    DTNAV_FIELD("n_beams", c.env.scan.n_beams)
    DTNAV_FIELD("angle_min", c.env.scan.angle_min)
    DTNAV_FIELD("angle_max", c.env.scan.angle_max)
    DTNAV_FIELD("max_range", c.env.scan.max_range)
    return false;
  });
  each_key(doc, "perception", [&](const json& s, const std::string& p, const std::string& key) {
    DTNAV_FIELD("eps", c.perception.eps)
    DTNAV_FIELD("min_pts", c.perception.min_pts)
    DTNAV_FIELD("min_spawn_size", c.perception.min_spawn_size)
    return false;
  });
  each_key(doc, "td3", [&](const json& s, const std::string& p, const std::string& key) {
    DTNAV_FIELD("hidden", c.td3.hidden)
    DTNAV_FIELD("actor_lr", c.td3.actor_lr)
    DTNAV_FIELD("critic_lr", c.td3.critic_lr)
    DTNAV_FIELD("gamma", c.td3.gamma)
    DTNAV_FIELD("tau", c.td3.tau)
    DTNAV_FIELD("policy_delay", c.td3.policy_delay)
    DTNAV_FIELD("policy_noise", c.td3.policy_noise)
    DTNAV_FIELD("noise_clip", c.td3.noise_clip)
    DTNAV_FIELD("buffer_capacity", c.buffer_capacity)
    return false;
  });
  each_key(doc, "train", [&](const json& s, const std::string& p, const std::string& key) {
    DTNAV_FIELD("total_steps", c.train.total_steps)
    DTNAV_FIELD("warmup_steps", c.train.warmup_steps)
    DTNAV_FIELD("batch_size", c.train.batch_size)
    DTNAV_FIELD("expl_noise", c.train.expl_noise)
    DTNAV_FIELD("expl_noise_final", c.train.expl_noise_final)
    DTNAV_FIELD("expl_decay_steps", c.train.expl_decay_steps)
    return false;
  });
  each_key(doc, "eval", [&](const json& s, const std::string& p, const std::string& key) {
    DTNAV_FIELD("episodes", c.eval_episodes)
    DTNAV_FIELD("seed_offset", c.eval_seed_offset)
    return false;
  });
  each_key(doc, "twin", [&](const json& s, const std::string& p, const std::string& key) {
    DTNAV_FIELD("danger_threshold", c.danger_threshold)
    DTNAV_FIELD("retrain_step_budget", c.retrain.step_budget)
    DTNAV_FIELD("retrain_batch_size", c.retrain.batch_size)
    DTNAV_FIELD("retrain_expl_noise", c.retrain.expl_noise)
    DTNAV_FIELD("endpoint", c.endpoint)
    DTNAV_FIELD("io_timeout_ms", c.io_timeout_ms)
    DTNAV_FIELD("pause_timeout_ms", c.pause_timeout_ms)
    DTNAV_FIELD("stall_window", c.stall_window)
    DTNAV_FIELD("stall_progress", c.stall_progress)
    return false;
  });
#undef DTNAV_FIELD

  c.world.safe_dist = c.env.safe_dist;
  return c;
}

void RunConfig::validate() const {
  auto check = [](bool ok, const char* key, const char* why) {
    if (!ok) throw ConfigError(key, why);
  };
  check(env.dt > 0.0, "env.dt", "must be positive");
  check(env.safe_dist >= 0.0, "env.safe_dist", "must be non-negative");
  check(env.goal_tol > 0.0, "env.goal_tol", "must be positive");
  check(env.step_budget > 0, "env.step_budget", "must be positive");
  check(env.state.limits.v_max > 0.0, "env.v_max", "must be positive");
  check(env.state.limits.w_max > 0.0, "env.w_max", "must be positive");
  check(env.state.world_diagonal > 0.0, "env.world_diagonal", "must be positive");
  check(env.scan.n_beams >= 2, "lidar.n_beams", "must be at least 2");
  check(env.scan.angle_min < env.scan.angle_max, "lidar.angle_min", "must be below lidar.angle_max");
  check(env.scan.max_range > 0.0, "lidar.max_range", "must be positive");
  check(env.state.n_bins > 0 && env.scan.n_beams % env.state.n_bins == 0, "env.n_bins", "must divide lidar.n_beams");
  check(perception.eps > 0.0, "perception.eps", "must be positive");
  check(perception.min_pts >= 1, "perception.min_pts", "must be at least 1");
  check(perception.min_spawn_size > 0.0, "perception.min_spawn_size", "must be positive");
  check(!td3.hidden.empty(), "td3.hidden", "needs at least one hidden layer");
  for (int h : td3.hidden) check(h > 0, "td3.hidden", "widths must be positive");
  check(td3.gamma >= 0.0 && td3.gamma <= 1.0, "td3.gamma", "must lie in [0, 1]");
  check(td3.tau >= 0.0 && td3.tau <= 1.0, "td3.tau", "must lie in [0, 1]");
  check(td3.policy_delay >= 1, "td3.policy_delay", "must be at least 1");
  check(buffer_capacity > 0, "td3.buffer_capacity", "must be positive");
  check(train.total_steps >= 0, "train.total_steps", "must be non-negative");
  check(train.batch_size > 0, "train.batch_size", "must be positive");
  check(eval_episodes >= 1, "eval.episodes", "must be at least 1");
  check(danger_threshold > env.safe_dist, "twin.danger_threshold", "must exceed env.safe_dist");
  check(retrain.step_budget >= 0, "twin.retrain_step_budget", "must be non-negative");
  check(io_timeout_ms > 0, "twin.io_timeout_ms", "must be positive");
  check(pause_timeout_ms > 0, "twin.pause_timeout_ms", "must be positive");
  check(stall_window >= 0, "twin.stall_window", "must be non-negative");
  check(stall_progress >= 0.0, "twin.stall_progress", "must be non-negative");
  try {
    Endpoint::parse(endpoint);
  } catch (const ValidationError& e) {
    throw ConfigError("twin.endpoint", e.what());
  }
}

TwinConfig RunConfig::twin_config() const {
  TwinConfig t;
  t.danger_threshold = danger_threshold;
  t.env = env;
  t.perception = perception;
  t.retrain = retrain;
  t.io_timeout = std::chrono::milliseconds(io_timeout_ms);
  t.stall_window = stall_window;
  t.stall_progress = stall_progress;
  t.seed = seed;
  return t;
}

PhysicalParams RunConfig::physical_params() const {
  PhysicalParams p;
  p.dt = env.dt;
  p.limits = env.state.limits;
  p.scan = env.scan;
  p.safe_dist = env.safe_dist;
  p.goal_tol = env.goal_tol;
  p.step_budget = env.step_budget;
  p.io_timeout = std::chrono::milliseconds(io_timeout_ms);
  p.pause_timeout = std::chrono::milliseconds(pause_timeout_ms);
  return p;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError(path.string(), "not valid JSON");
  return config_from_json(doc);
}

void save_config(const RunConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << config_to_json(config).dump(2) << '\n';
}

void apply_overrides(RunConfig& config, const std::vector<std::string>& assignments) {
  json doc = config_to_json(config);
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) throw ConfigError(a, "override must look like key=value");
    const std::string key = a.substr(0, eq);
    const std::string text = a.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    const auto dot = key.find('.');
    if (dot == std::string::npos) {
      if (!doc.contains(key) || doc.at(key).is_object()) throw ConfigError(key, "unknown key");
      doc[key] = value;
    } else {
      const std::string section = key.substr(0, dot), field = key.substr(dot + 1);
      if (!doc.contains(section) || !doc.at(section).is_object() || !doc.at(section).contains(field)) {
        throw ConfigError(key, "unknown key");
      }
      doc[section][field] = value;
    }
  }
  config = config_from_json(doc);
}

}  // namespace dtnav
