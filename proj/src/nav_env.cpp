#include "dtnav/nav_env.hpp"

#include <algorithm>
#include <cmath>

namespace dtnav {

Action Action::clamped() const { return {std::clamp(linear, -1.0, 1.0), std::clamp(angular, -1.0, 1.0)}; }

double Action::v(const MotionLimits& limits) const {
  return limits.v_max * (std::clamp(linear, -1.0, 1.0) + 1.0) / 2.0;
}

double Action::w(const MotionLimits& limits) const { return limits.w_max * std::clamp(angular, -1.0, 1.0); }

std::vector<double> StateVector::features() const {
  std::vector<double> f(lidar_bins);
  f.push_back(goal_dist);
  f.push_back(goal_heading);
  f.push_back(prev_v);
  f.push_back(prev_w);
  return f;
}

StateVector build_state(const LaserScan& scan, const Pose& pose, Vec2 goal, const Action& prev_action,
                        const StateParams& params) {
  const int n_beams = static_cast<int>(scan.ranges.size());
  if (params.n_bins <= 0 || n_beams % params.n_bins != 0) {
    throw ValidationError("n_bins must divide the beam count");
  }
  const double max_range = scan.params.max_range;
  const int per_bin = n_beams / params.n_bins;
  StateVector s;
  s.lidar_bins.assign(static_cast<std::size_t>(params.n_bins), 1.0);
  for (int i = 0; i < n_beams; ++i) {
    const double r = scan.ranges[static_cast<std::size_t>(i)];
    const double value = has_return(r) ? std::min(r, max_range) / max_range : 1.0;
    auto& bin = s.lidar_bins[static_cast<std::size_t>(i / per_bin)];
    bin = std::min(bin, value);
  }
  const double dx = goal.x - pose.x;
  const double dy = goal.y - pose.y;
  s.goal_dist = std::hypot(dx, dy) / params.world_diagonal;
  s.goal_heading = (dx == 0.0 && dy == 0.0) ? 0.0 : normalize_angle(std::atan2(dy, dx) - pose.theta) / std::numbers::pi;
  const Action a = prev_action.clamped();
  s.prev_v = a.v(params.limits) / params.limits.v_max;
  s.prev_w = a.w(params.limits) / params.limits.w_max;
  return s;
}

double compute_reward(StepEvent event, double dist_to_target, const Action& action, Vec2 orient_unit,
                      Vec2 target, Vec2 robot, const RewardParams& params) {
  if (event == StepEvent::GoalReached) return params.goal_reward;
  if (event == StepEvent::Collision) return params.collision_reward;

  const double d = dist_to_target < 1.0 ? (1.0 - dist_to_target) / 2.0 : 0.0;
  const double a = action.linear / 2.0 - std::abs(action.angular) / 2.0;
  const double tx = target.x - robot.x;
  const double ty = target.y - robot.y;
  const double norm = std::hypot(tx, ty);
  if (!(norm > 0.0)) throw ValidationError("orientation reward undefined with robot on the target");
  const double o = (orient_unit.x * tx + orient_unit.y * ty) / norm * params.orientation_scale;
  return d + a + o;
}

NavEnv::NavEnv(EnvConfig config) : config_(std::move(config)) { config_.scan.validate(); }

StateVector NavEnv::reset(World world) {
  world_ = std::move(world);
  robot_ = RobotState{world_.start, 0.0, 0.0};
  steps_ = 0;
  prev_action_ = kStopAction;
  scan_ = simulate_scan(world_, robot_.pose, config_.scan);
  done_ = false;
  return observe();
}

StateVector NavEnv::observe() const {
  return build_state(scan_, robot_.pose, world_.goal, prev_action_, config_.state);
}

StepEvent NavEnv::classify(const Pose& pose, int steps) const {
  if (check_collision(world_, pose, config_.safe_dist)) return StepEvent::Collision;
  if (goal_reached(pose, world_.goal, config_.goal_tol)) return StepEvent::GoalReached;
  if (steps >= config_.step_budget) return StepEvent::Timeout;
  return StepEvent::None;
}

StepResult NavEnv::step(const Action& action) {
  if (done_) throw ValidationError("step() after a terminal event; call reset()");
  const Action a = action.clamped();
  robot_ = step_dynamics(robot_, a.v(config_.state.limits), a.w(config_.state.limits), config_.dt,
                         config_.state.limits);
  ++steps_;
  prev_action_ = a;
  scan_ = simulate_scan(world_, robot_.pose, config_.scan);

  StepResult result;
  result.event = classify(robot_.pose, steps_);
  const Vec2 robot = robot_.pose.position();
  const double dist = std::hypot(world_.goal.x - robot.x, world_.goal.y - robot.y);
  const Vec2 heading{std::cos(robot_.pose.theta), std::sin(robot_.pose.theta)};
  result.reward = compute_reward(result.event, dist, a, heading, world_.goal, robot, config_.reward);
  result.state = observe();
  done_ = is_terminal(result.event);
  return result;
}

}  // namespace dtnav
