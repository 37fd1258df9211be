// dtnav: pre-train, evaluate, and run the physical/twin process pair.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "dtnav/checkpoint.hpp"
#include "dtnav/physical_server.hpp"
#include "dtnav/run_config.hpp"
#include "dtnav/svg_plot.hpp"
#include "dtnav/training.hpp"
#include "dtnav/twin_client.hpp"
#include "dtnav/world_io.hpp"

namespace fs = std::filesystem;
using namespace dtnav;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kRuntime = 2, kProtocol = 3 };

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  long seed = -1;
  bool dry_run = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "JSON run configuration");
  cmd->add_option("--set", opts.overrides, "Override a config key, e.g. --set td3.gamma=0.98");
  cmd->add_option("--out", opts.out_dir, "Output directory (overrides output_dir)");
  cmd->add_option("--seed", opts.seed, "Seed (overrides seed)");
  cmd->add_flag("--dry-run", opts.dry_run, "Validate configuration and exit");
}

RunConfig resolve_config(const CommonOptions& opts, std::vector<std::string> extra) {
  RunConfig config = opts.config_path.empty() ? RunConfig{} : load_config(opts.config_path);
  std::vector<std::string> all = opts.overrides;
  all.insert(all.end(), extra.begin(), extra.end());
  apply_overrides(config, all);
  if (opts.seed >= 0) config.seed = static_cast<std::uint64_t>(opts.seed);
  if (!opts.out_dir.empty()) config.output_dir = opts.out_dir;
  config.validate();
  return config;
}

fs::path prepare_output(const RunConfig& config) {
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  save_config(config, dir / "config.json");
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int cmd_train(const RunConfig& config) {
  const fs::path dir = prepare_output(config);
  NavEnv env(config.env);
  Td3Agent agent(env.state_dim(), config.td3, config.seed);
  ReplayBuffer buffer(config.buffer_capacity);
  const auto start = std::chrono::steady_clock::now();
  TrainHooks hooks;
  hooks.on_progress = [&](long steps) {
    if (steps % 10000 == 0) {
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::fprintf(stderr, "train: %ld/%ld steps (%.0f s)\n", steps, config.train.total_steps, secs);
    }
  };
  const TrainingLog log =
      train(env, sampled_worlds(config.world, config.seed), agent, buffer, config.train, config.seed + 1, hooks);
  save_checkpoint(agent, dir / "checkpoint.bin");
  buffer.save(dir / "replay.bin");
  write_training_log(log, dir / "episodes.csv", dir / "updates.csv");
  write_text(dir / "avg_q.svg", render_q_curve_svg(log));
  const auto [first, last] = log.q_deciles();
  nlohmann::json summary = {{"episodes", log.episodes.size()},
                            {"updates", log.updates.size()},
                            {"avg_q_first_decile", first},
                            {"avg_q_last_decile", last}};
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  std::printf("trained %zu episodes, %zu updates; avg-Q %.3f -> %.3f\n", log.episodes.size(), log.updates.size(),
              first, last);
  return kOk;
}

int cmd_eval(const RunConfig& config, const std::string& checkpoint, const std::string& world_file) {
  NavEnv env(config.env);
  Td3Agent agent(env.state_dim(), config.td3, config.seed);
  load_checkpoint(agent, checkpoint);
  const fs::path dir = prepare_output(config);
  WorldSource worlds = sampled_worlds(config.world, config.seed + config.eval_seed_offset);
  if (!world_file.empty()) {
    const World fixed = load_world_file(world_file);
    worlds = [fixed](std::uint64_t) { return fixed; };
  }
  const EvalResult result = evaluate(agent, env, worlds, config.eval_episodes);
  write_metrics(result.metrics, dir / "metrics.json");
  write_trajectories(result.episodes, dir / "trajectories.csv");
  std::printf("success %.3f collision %.3f timeout %.3f over %d episodes\n", result.metrics.success_rate(),
              result.metrics.collision_rate(), result.metrics.timeout_rate(), result.metrics.episodes);
  return kOk;
}

int cmd_physical(const RunConfig& config, const std::string& world_file, const std::vector<std::string>& injections,
                 const std::string& port_file) {
  const World world = load_world_file(world_file);
  PhysicalParams params = config.physical_params();
  for (const auto& text : injections) params.injections.push_back(ObstacleInjection::parse(text));
  const fs::path dir = prepare_output(config);
  Listener listener(Endpoint::parse(config.endpoint));
  std::printf("physical: listening on %s\n", Endpoint{Endpoint::parse(config.endpoint).host, listener.port()}.str().c_str());
  std::fflush(stdout);
  if (!port_file.empty()) write_text(port_file, std::to_string(listener.port()) + "\n");
  const SessionOutcome outcome = serve_physical(world, listener, params);
  nlohmann::json doc = {{"event", to_string(outcome.event)},
                        {"steps", outcome.steps},
                        {"collisions", outcome.collisions},
                        {"aborted", outcome.aborted},
                        {"diagnostic", outcome.diagnostic},
                        {"final_pose",
                         {{"x", outcome.final_state.pose.x},
                          {"y", outcome.final_state.pose.y},
                          {"theta", outcome.final_state.pose.theta}}}};
  write_text(dir / "physical_outcome.json", doc.dump(2) + "\n");
  save_world_file(outcome.world, dir / "physical_world.json");
  std::printf("physical: session ended with '%s' after %d steps\n", to_string(outcome.event).c_str(), outcome.steps);
  if (outcome.aborted) {
    std::fprintf(stderr, "physical: %s\n", outcome.diagnostic.c_str());
    return outcome.diagnostic.rfind("protocol error", 0) == 0 ? kProtocol : kRuntime;
  }
  return kOk;
}

int cmd_twin(const RunConfig& config, const std::string& checkpoint, const std::string& replay) {
  NavEnv probe(config.env);
  Td3Agent agent(probe.state_dim(), config.td3, config.seed);
  load_checkpoint(agent, checkpoint);
  ReplayBuffer buffer = replay.empty() ? ReplayBuffer(config.buffer_capacity)
                                       : ReplayBuffer::load(replay, config.buffer_capacity);
  const fs::path dir = prepare_output(config);
  LineChannel channel = connect_to(Endpoint::parse(config.endpoint), std::chrono::milliseconds(config.io_timeout_ms));
  const TwinRun run = run_twin(agent, buffer, channel, config.twin_config());

  write_metrics(run.metrics, dir / "metrics.json");
  write_trajectories({run.trajectory}, dir / "trajectory.csv");
  write_trace(run.trace, dir / "trace.ndjson");
  std::string phases;
  for (auto p : run.phases) phases += to_string(p) + "\n";
  write_text(dir / "phases.txt", phases);
  nlohmann::json doc = {{"outcome", run.outcome},
                        {"diagnostic", run.diagnostic},
                        {"pauses", run.pauses},
                        {"retrains", run.retrains},
                        {"retrain_gradient_steps", run.retrain_gradient_steps}};
  write_text(dir / "twin_outcome.json", doc.dump(2) + "\n");
  if (run.retrains > 0) save_checkpoint(agent, dir / "checkpoint.bin");
  std::printf("twin: outcome '%s' after %d pauses, %d retrains\n", run.outcome.c_str(), run.pauses, run.retrains);
  if (run.outcome == "protocol_error") {
    std::fprintf(stderr, "twin: %s\n", run.diagnostic.c_str());
    return kProtocol;
  }
  if (run.outcome == "connection_lost") {
    std::fprintf(stderr, "twin: %s\n", run.diagnostic.c_str());
    return kRuntime;
  }
  return kOk;
}

int cmd_plot(const std::vector<std::string>& files, const std::string& world_file, const std::string& out) {
  if (files.empty()) throw ValidationError("plot needs at least one trajectory file");
  std::vector<EpisodeTrace> episodes;
  for (const auto& f : files) {
    auto part = read_trajectories(f);
    episodes.insert(episodes.end(), part.begin(), part.end());
  }
  std::optional<World> world;
  if (!world_file.empty()) world = load_world_file(world_file);
  write_text(out, render_trajectories_svg(episodes, world));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Digital-twin navigation with TD3, DBSCAN reconstruction and online retraining"};
  app.require_subcommand(1);

  CommonOptions train_opts, eval_opts, phys_opts, twin_opts;
  long steps = -1;
  auto* train_cmd = app.add_subcommand("train", "Pre-train a TD3 policy on randomized sparse worlds");
  add_common(train_cmd, train_opts);
  train_cmd->add_option("--steps", steps, "Environment steps (overrides train.total_steps)");

  std::string eval_checkpoint, eval_world;
  int episodes = -1;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint");
  add_common(eval_cmd, eval_opts);
  eval_cmd->add_option("--checkpoint", eval_checkpoint, "Checkpoint file")->required();
  eval_cmd->add_option("--episodes", episodes, "Episodes (overrides eval.episodes)");
  eval_cmd->add_option("--world", eval_world, "Evaluate on this world file instead of sampled worlds");

  std::string world_file, port_file, phys_endpoint;
  std::vector<std::string> injections;
  auto* phys_cmd = app.add_subcommand("physical", "Serve the physical robot world");
  add_common(phys_cmd, phys_opts);
  phys_cmd->add_option("--world", world_file, "World file")->required();
  phys_cmd->add_option("--endpoint", phys_endpoint, "host:port to listen on");
  phys_cmd->add_option("--inject-obstacle", injections, "Obstacle appearing mid-run: cx,cy,w,h@step");
  phys_cmd->add_option("--port-file", port_file, "Write the bound port here");

  std::string twin_checkpoint, twin_replay, twin_endpoint;
  auto* twin_cmd = app.add_subcommand("twin", "Run the virtual twin against a physical server");
  add_common(twin_cmd, twin_opts);
  twin_cmd->add_option("--checkpoint", twin_checkpoint, "Checkpoint file")->required();
  twin_cmd->add_option("--replay", twin_replay, "Replay snapshot to continue training from");
  twin_cmd->add_option("--endpoint", twin_endpoint, "host:port of the physical server");

  std::vector<std::string> plot_files;
  std::string plot_world, plot_out = "trajectories.svg";
  auto* plot_cmd = app.add_subcommand("plot", "Render trajectory CSV files as SVG");
  plot_cmd->add_option("trajectories", plot_files, "Trajectory CSV files");
  plot_cmd->add_option("--world", plot_world, "World file to draw obstacles from");
  plot_cmd->add_option("--out", plot_out, "Output SVG");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  // Usage-class failures: bad config, bad inputs.
  RunConfig config;
  try {
    if (*train_cmd) {
      config = resolve_config(train_opts, steps >= 0 ? std::vector<std::string>{"train.total_steps=" + std::to_string(steps)}
                                                     : std::vector<std::string>{});
      if (train_opts.dry_run) return kOk;
      return cmd_train(config);
    }
    if (*eval_cmd) {
      config = resolve_config(eval_opts, episodes >= 0 ? std::vector<std::string>{"eval.episodes=" + std::to_string(episodes)}
                                                       : std::vector<std::string>{});
      if (eval_opts.dry_run) return kOk;
      return cmd_eval(config, eval_checkpoint, eval_world);
    }
    if (*phys_cmd) {
      config = resolve_config(phys_opts, phys_endpoint.empty() ? std::vector<std::string>{}
                                                               : std::vector<std::string>{"twin.endpoint=\"" + phys_endpoint + "\""});
      if (phys_opts.dry_run) {
        load_world_file(world_file);
        for (const auto& text : injections) ObstacleInjection::parse(text);
        return kOk;
      }
      return cmd_physical(config, world_file, injections, port_file);
    }
    if (*twin_cmd) {
      config = resolve_config(twin_opts, twin_endpoint.empty() ? std::vector<std::string>{}
                                                               : std::vector<std::string>{"twin.endpoint=\"" + twin_endpoint + "\""});
      if (twin_opts.dry_run) return kOk;
      return cmd_twin(config, twin_checkpoint, twin_replay);
    }
    if (*plot_cmd) return cmd_plot(plot_files, plot_world, plot_out);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsage;
  } catch (const ArchitectureMismatch& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntime;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsage;
  } catch (const ProtocolError& e) {
    std::fprintf(stderr, "protocol error: %s\n", e.what());
    return kProtocol;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntime;
  }
  return kUsage;
}
