#pragma once

#include <numbers>
#include <vector>

#include "dtnav/lidarsim.hpp"
#include "dtnav/worldsim.hpp"

namespace dtnav {

/// Normalized policy action. Maps to v = v_max * (linear + 1) / 2, w = w_max * angular.
struct Action {
  double linear = 0.0;
  double angular = 0.0;

  Action clamped() const;
  double v(const MotionLimits& limits) const;
  double w(const MotionLimits& limits) const;
  friend bool operator==(const Action&, const Action&) = default;
};

/// The action that commands v = 0, w = 0.
inline constexpr Action kStopAction{-1.0, 0.0};

struct StateParams {
  int n_bins = 20;
  /// Normalizer for goal distance. Fixed so twin and training share one scale.
  double world_diagonal = 10.0 * std::numbers::sqrt2;
  MotionLimits limits;
};

struct StateVector {
  std::vector<double> lidar_bins;
  double goal_dist = 0.0;
  double goal_heading = 0.0;
  double prev_v = 0.0;
  double prev_w = 0.0;

  /// lidar_bins followed by goal_dist, goal_heading, prev_v, prev_w.
  std::vector<double> features() const;
  static int dimension(int n_bins) { return n_bins + 4; }
};

StateVector build_state(const LaserScan& scan, const Pose& pose, Vec2 goal, const Action& prev_action,
                        const StateParams& params);

struct RewardParams {
  double goal_reward = 100.0;
  double collision_reward = -100.0;
  double orientation_scale = 50.0;
};

/// Terminal events give the fixed goal/collision rewards; otherwise
/// R = d + a + o with d = (1 - dist)/2 inside 1 m, a = a_l/2 - |a_w|/2 and
/// o = heading . unit(target - robot) * orientation_scale.
double compute_reward(StepEvent event, double dist_to_target, const Action& action, Vec2 orient_unit,
                      Vec2 target, Vec2 robot, const RewardParams& params = {});

}  // namespace dtnav
