#pragma once

#include "dtnav/lidarsim.hpp"
#include "dtnav/navigation.hpp"
#include "dtnav/worldsim.hpp"

namespace dtnav {

struct EnvConfig {
  double dt = 0.1;
  double safe_dist = 0.5;
  double goal_tol = 0.3;
  int step_budget = 500;
  ScanParams scan;
  StateParams state;
  RewardParams reward;
};

struct StepResult {
  StateVector state;
  double reward = 0.0;
  StepEvent event = StepEvent::None;
};

/// Episodic navigation task over a ground-truth world.
class NavEnv {
 public:
  explicit NavEnv(EnvConfig config = {});

  StateVector reset(World world);
  StepResult step(const Action& action);

  /// Event classification for a pose after `steps` steps. Collision wins over
  /// goal, goal over timeout.
  StepEvent classify(const Pose& pose, int steps) const;

  const EnvConfig& config() const { return config_; }
  const World& world() const { return world_; }
  const RobotState& robot() const { return robot_; }
  const LaserScan& last_scan() const { return scan_; }
  int steps() const { return steps_; }
  bool done() const { return done_; }
  int state_dim() const { return StateVector::dimension(config_.state.n_bins); }

 private:
  StateVector observe() const;

  EnvConfig config_;
  World world_;
  RobotState robot_;
  LaserScan scan_;
  Action prev_action_ = kStopAction;
  int steps_ = 0;
  bool done_ = true;
};

}  // namespace dtnav
