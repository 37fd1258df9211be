#include "dtnav/twin_client.hpp"

#include <cmath>
#include <fstream>

namespace dtnav {

namespace {

constexpr TwinPhase kAllPhases[] = {TwinPhase::Bootstrapping, TwinPhase::Navigating, TwinPhase::DangerPaused,
                                    TwinPhase::Retraining,    TwinPhase::Returning,  TwinPhase::Resuming,
                                    TwinPhase::Done};

}  // namespace

std::string to_string(TwinPhase phase) {
  switch (phase) {
    case TwinPhase::Bootstrapping: return "Bootstrapping";
    case TwinPhase::Navigating: return "Navigating";
    case TwinPhase::DangerPaused: return "DangerPaused";
    case TwinPhase::Retraining: return "Retraining";
    case TwinPhase::Returning: return "Returning";
    case TwinPhase::Resuming: return "Resuming";
    case TwinPhase::Done: return "Done";
  }
  return "Done";
}

TwinPhase twin_phase_from_string(const std::string& name) {
  for (TwinPhase p : kAllPhases) {
    if (to_string(p) == name) return p;
  }
  throw ValidationError("unknown twin phase '" + name + "'");
}

bool is_legal_transition(TwinPhase from, TwinPhase to) {
  switch (from) {
    case TwinPhase::Bootstrapping: return to == TwinPhase::Navigating;
    case TwinPhase::Navigating: return to == TwinPhase::DangerPaused || to == TwinPhase::Done;
    case TwinPhase::DangerPaused: return to == TwinPhase::Retraining;
    case TwinPhase::Retraining: return to == TwinPhase::Returning;
    case TwinPhase::Returning: return to == TwinPhase::Resuming;
    case TwinPhase::Resuming: return to == TwinPhase::Navigating;
    case TwinPhase::Done: return false;
  }
  return false;
}

bool is_legal_phase_path(const std::vector<TwinPhase>& phases) {
  if (phases.empty() || phases.front() != TwinPhase::Bootstrapping) return false;
  for (std::size_t i = 1; i < phases.size(); ++i) {
    if (!is_legal_transition(phases[i - 1], phases[i])) return false;
  }
  return true;
}

void TwinConfig::validate() const {
  if (!(danger_threshold > env.safe_dist)) {
    throw ValidationError("danger_threshold must exceed the collision distance");
  }
  if (stall_window < 0 || !(stall_progress >= 0.0)) throw ValidationError("invalid stall check");
  env.scan.validate();
}

bool danger_monitor(const LaserScan& scan, double danger_threshold) {
  for (double r : scan.ranges) {
    if (has_return(r) && r < danger_threshold) return true;
  }
  return false;
}

namespace {

class TwinSession {
 public:
  TwinSession(Td3Agent& agent, ReplayBuffer& buffer, LineChannel& channel, const TwinConfig& config)
      : agent_(agent), buffer_(buffer), channel_(channel), config_(config) {}

  TwinRun run() {
    run_.phases.push_back(TwinPhase::Bootstrapping);
    try {
      bootstrap();
      navigate();
    } catch (const ProtocolError& e) {
      fail("protocol_error", e.what());
    } catch (const ConnectionClosed& e) {
      fail("connection_lost", e.what());
    } catch (const TransportTimeout& e) {
      fail("protocol_error", e.what());
    }
    run_.trajectory.outcome = run_.outcome;
    if (run_.outcome == "goal" || run_.outcome == "collision" || run_.outcome == "timeout" ||
        run_.outcome == "retrain_failed") {
      run_.metrics.add(run_.outcome);
    }
    return std::move(run_);
  }

 private:
  void enter(TwinPhase phase) { run_.phases.push_back(phase); }
  TwinPhase phase() const { return run_.phases.back(); }

  template <typename T>
  T expect() {
    TwinMessage m = channel_.receive(config_.io_timeout);
    if (auto* typed = std::get_if<T>(&m)) return std::move(*typed);
    throw ProtocolError("protocol error: unexpected '" + message_type(m) + "' from physical side", encode_message(m));
  }

  void exchange(const msg::CmdVel& cmd) {
    channel_.send(cmd);
    scan_ = expect<msg::Scan>();
    status_ = expect<msg::Status>();
  }

  void safe_stop() {
    try {
      channel_.send(msg::Pause{});
      channel_.send(msg::Bye{});
    } catch (const std::exception&) {
    }
  }

  void fail(const std::string& outcome, const std::string& diagnostic) {
    run_.outcome = outcome;
    run_.diagnostic = diagnostic;
    safe_stop();
  }

  void bootstrap() {
    // A zero command asks for the first scan.
    exchange(msg::CmdVel{0.0, 0.0});
    ++steps_;
    goal_ = status_.goal;
    enter(TwinPhase::Navigating);
  }

  Bounds local_bounds(const Pose& pose) const {
    const double reach = config_.env.scan.max_range + 1.0;
    return {std::min(pose.x, goal_.x) - reach, std::min(pose.y, goal_.y) - reach, std::max(pose.x, goal_.x) + reach,
            std::max(pose.y, goal_.y) + reach};
  }

  World local_world(const msg::Scan& scan) const {
    return reconstruct_world(scan.to_laser_scan(), scan.pose, goal_, local_bounds(scan.pose), config_.perception);
  }

  void record(const LaserScan& laser) {
    TrajectoryRecord r;
    r.t = steps_ * config_.env.dt;
    r.x = scan_.pose.x;
    r.y = scan_.pose.y;
    r.theta = scan_.pose.theta;
    r.v = last_cmd_.v;
    r.w = last_cmd_.w;
    const Vec2 robot = scan_.pose.position();
    const double dist = std::hypot(goal_.x - robot.x, goal_.y - robot.y);
    if (status_.event != StepEvent::None || dist > 0.0) {
      r.reward = compute_reward(status_.event, dist, prev_action_, {std::cos(scan_.pose.theta), std::sin(scan_.pose.theta)},
                                goal_, robot, config_.env.reward);
    }
    r.min_scan_range = laser.min_range();
    r.phase = to_string(phase());
    run_.trajectory.episode_return += r.reward;
    run_.trajectory.records.push_back(r);
  }

  /// Pause, retrain against the reconstructed world and resume. False when the
  /// twin must stay paused.
  bool handle_danger() {
    ++run_.pauses;
    enter(TwinPhase::DangerPaused);
    channel_.send(msg::Pause{});
    expect<msg::Status>();

    enter(TwinPhase::Retraining);
    EnvConfig local_env = config_.env;
    local_env.step_budget = std::max(1, config_.env.step_budget - steps_);
    const World world = local_world(scan_);
    const RetrainResult result = retrain_procedure(agent_, buffer_, world, local_env, config_.retrain,
                                                   config_.seed + static_cast<std::uint64_t>(run_.pauses));
    if (result.status != RetrainStatus::AlreadySafe) ++run_.retrains;
    run_.retrain_gradient_steps += result.gradient_steps;
    if (result.status == RetrainStatus::RetrainFailed) {
      run_.diagnostic = "no verified path within the retrain budget";
      return false;
    }

    // Episodes restarted at the pause pose, so the twin is already back there.
    enter(TwinPhase::Returning);
    // Fresh scan while paused; a zero command is acknowledged without motion.
    exchange(msg::CmdVel{0.0, 0.0});
    const World fresh = local_world(scan_);
    if (!(fresh == world)) {
      NavEnv check_env(local_env);
      if (!verify_path(agent_, fresh, check_env)) {
        run_.diagnostic = "fresh scan invalidated the verified path";
        return false;
      }
    }

    enter(TwinPhase::Resuming);
    channel_.send(msg::Resume{});
    expect<msg::Status>();
    enter(TwinPhase::Navigating);
    progress_.clear();
    return true;
  }

  /// Creeping without closing on the goal never trips the danger monitor, so
  /// a lack of progress gets the same pause and retrain treatment.
  bool stalled() {
    const Vec2 p = scan_.pose.position();
    progress_.push_back(std::hypot(goal_.x - p.x, goal_.y - p.y));
    const auto window = static_cast<std::size_t>(config_.stall_window);
    if (window == 0 || progress_.size() <= window) return false;
    return progress_[progress_.size() - 1 - window] - progress_.back() < config_.stall_progress;
  }

  void navigate() {
    for (;;) {
      const LaserScan laser = scan_.to_laser_scan();
      record(laser);
      if (status_.event != StepEvent::None) {
        run_.outcome = to_string(status_.event);
        channel_.send(msg::Bye{});
        enter(TwinPhase::Done);
        return;
      }
      const bool hazard = danger_monitor(laser, config_.danger_threshold) || stalled();
      if (hazard && !handle_danger()) {
        run_.outcome = "retrain_failed";
        channel_.send(msg::Bye{});
        return;
      }
      const StateVector state = build_state(laser, scan_.pose, goal_, prev_action_, config_.env.state);
      const Action action = agent_.act(state.features());
      last_cmd_ = {action.v(config_.env.state.limits), action.w(config_.env.state.limits)};
      exchange(last_cmd_);
      ++steps_;
      prev_action_ = action;
    }
  }

  Td3Agent& agent_;
  ReplayBuffer& buffer_;
  LineChannel& channel_;
  const TwinConfig& config_;
  TwinRun run_;
  msg::Scan scan_;
  msg::Status status_;
  msg::CmdVel last_cmd_;
  Action prev_action_ = kStopAction;
  Vec2 goal_;
  int steps_ = 0;
  std::vector<double> progress_;
};

}  // namespace

TwinRun run_twin(Td3Agent& agent, ReplayBuffer& buffer, LineChannel& channel, const TwinConfig& config) {
  config.validate();
  std::vector<TraceEntry> trace;
  channel.set_tap([&trace](bool outgoing, const std::string& line) { trace.push_back({outgoing, line}); });
  TwinRun run = TwinSession(agent, buffer, channel, config).run();
  channel.set_tap({});
  run.trace = std::move(trace);
  return run;
}

int nonzero_commands_while_paused(const std::vector<TraceEntry>& trace) {
  bool paused = false;
  int count = 0;
  for (const auto& e : trace) {
    if (!e.outgoing) continue;
    const TwinMessage m = decode_message(e.line);
    if (std::holds_alternative<msg::Pause>(m)) paused = true;
    if (std::holds_alternative<msg::Resume>(m)) paused = false;
    if (const auto* cmd = std::get_if<msg::CmdVel>(&m); cmd && paused && (cmd->v != 0.0 || cmd->w != 0.0)) ++count;
  }
  return count;
}

void write_trace(const std::vector<TraceEntry>& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace " + path.string());
  for (const auto& e : trace) out << (e.outgoing ? "> " : "< ") << e.line << '\n';
}

std::vector<TraceEntry> read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace " + path.string());
  std::vector<TraceEntry> trace;
  std::string line;
  while (std::getline(in, line)) {
    if (line.size() < 2 || (line[0] != '>' && line[0] != '<') || line[1] != ' ') {
      throw ValidationError("malformed trace line: " + line);
    }
    trace.push_back({line[0] == '>', line.substr(2)});
  }
  return trace;
}

}  // namespace dtnav
