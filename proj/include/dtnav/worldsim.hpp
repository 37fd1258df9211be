#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dtnav {

/// Raised when an operation receives non-finite or out-of-contract input.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by sample_world when rejection sampling cannot place the layout.
class InfeasibleConfig : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// Planar pose. theta is kept in (-pi, pi].
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Vec2 position() const { return {x, y}; }
  friend bool operator==(const Pose&, const Pose&) = default;
};

struct RobotState {
  Pose pose;
  double v = 0.0;
  double w = 0.0;

  friend bool operator==(const RobotState&, const RobotState&) = default;
};

/// Axis-aligned obstacle, center plus full extents.
struct ObstacleBox {
  double cx = 0.0;
  double cy = 0.0;
  double width = 0.0;
  double height = 0.0;

  double xmin() const { return cx - 0.5 * width; }
  double xmax() const { return cx + 0.5 * width; }
  double ymin() const { return cy - 0.5 * height; }
  double ymax() const { return cy + 0.5 * height; }
  friend bool operator==(const ObstacleBox&, const ObstacleBox&) = default;
};

struct Bounds {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  bool contains(Vec2 p) const { return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax; }
  double diagonal() const;
  friend bool operator==(const Bounds&, const Bounds&) = default;
};

struct World {
  std::vector<ObstacleBox> obstacles;
  Bounds bounds;
  Vec2 goal;
  /// Where episodes in this world begin. Not part of the ground truth geometry.
  Pose start;

  friend bool operator==(const World&, const World&) = default;
};

enum class StepEvent { None, GoalReached, Collision, Timeout };

std::string to_string(StepEvent event);
StepEvent step_event_from_string(const std::string& name);
inline bool is_terminal(StepEvent e) { return e != StepEvent::None; }

struct MotionLimits {
  double v_max = 1.0;
  double w_max = 1.0;
};

/// Wraps an angle into (-pi, pi].
double normalize_angle(double angle);

/// One forward-Euler unicycle step. Commands are clamped to the limits first.
RobotState step_dynamics(const RobotState& state, double v_cmd, double w_cmd, double dt,
                         const MotionLimits& limits = {});

/// Euclidean distance from a point to the box surface; 0 inside.
double distance_to_box(Vec2 p, const ObstacleBox& box);

/// Distance from a point to the nearest obstacle, +inf for an empty world.
double nearest_obstacle_distance(const World& world, Vec2 p);

bool check_collision(const World& world, const Pose& pose, double safe_dist);
bool goal_reached(const Pose& pose, Vec2 goal, double goal_tol);

/// Surface-to-surface gap between two boxes; 0 when they touch or overlap.
double box_separation(const ObstacleBox& a, const ObstacleBox& b);

struct WorldConfig {
  Bounds bounds{0.0, 0.0, 10.0, 10.0};
  int n_obstacles = 4;
  double min_obstacle_size = 0.5;
  double max_obstacle_size = 1.5;
  double min_separation = 1.2;
  double safe_dist = 0.5;
  /// Extra clearance on top of safe_dist for start and goal.
  double clearance_margin = 0.5;
  /// Start and goal keep this far from the world bounds.
  double border_margin = 1.0;
  double min_start_goal_distance = 3.0;
  int max_attempts = 10000;
};

/// Draws a sparse random layout with start and goal. Deterministic in seed.
World sample_world(const WorldConfig& config, std::uint64_t seed);

/// Checks every post-condition sample_world promises. Returns an empty string
/// when the world is valid, otherwise a description of the first violation.
std::string validate_sampled_world(const World& world, const WorldConfig& config);

}  // namespace dtnav
