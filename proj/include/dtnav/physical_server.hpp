#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "dtnav/lidarsim.hpp"
#include "dtnav/transport.hpp"
#include "dtnav/twin_protocol.hpp"
#include "dtnav/worldsim.hpp"

namespace dtnav {

/// Obstacle that appears once the physical robot has integrated `step` commands.
struct ObstacleInjection {
  ObstacleBox box;
  int step = 0;

  /// Parses "cx,cy,w,h@step".
  static ObstacleInjection parse(const std::string& text);
};

struct PhysicalParams {
  double dt = 0.1;
  MotionLimits limits;
  ScanParams scan;
  double safe_dist = 0.5;
  double goal_tol = 0.3;
  int step_budget = 500;
  std::vector<ObstacleInjection> injections;
  std::chrono::milliseconds io_timeout{30000};
  /// Wait allowed while paused; the twin may be retraining.
  std::chrono::milliseconds pause_timeout{600000};
};

/// Lockstep physical world: dynamics advance only on received CmdVel while unpaused.
class PhysicalSim {
 public:
  PhysicalSim(World world, PhysicalParams params);

  /// Replies to one client message. CmdVel yields {Scan, Status}; Pause and
  /// Resume yield a Status acknowledgement; Bye yields nothing.
  std::vector<TwinMessage> handle(const TwinMessage& message);

  const World& world() const { return world_; }
  const RobotState& state() const { return state_; }
  int steps() const { return steps_; }
  bool paused() const { return paused_; }
  StepEvent event() const { return event_; }
  bool bye_received() const { return bye_; }

 private:
  msg::Status status() const;

  World world_;
  PhysicalParams params_;
  RobotState state_;
  int steps_ = 0;
  bool paused_ = false;
  bool bye_ = false;
  StepEvent event_ = StepEvent::None;
};

struct SessionOutcome {
  StepEvent event = StepEvent::None;
  int steps = 0;
  RobotState final_state;
  /// Ground truth at session end, including injected obstacles.
  World world;
  int collisions = 0;
  bool aborted = false;
  std::string diagnostic;
};

/// Accepts one twin connection and serves it until Bye, a terminal event or a
/// connection failure.
SessionOutcome serve_physical(const World& world, Listener& listener, const PhysicalParams& params,
                              const LineChannel::Tap& tap = {});

}  // namespace dtnav
