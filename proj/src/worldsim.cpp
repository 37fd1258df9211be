#include "dtnav/worldsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace dtnav {

namespace {

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) throw ValidationError(std::string("non-finite ") + what);
}

}  // namespace

double Bounds::diagonal() const { return std::hypot(xmax - xmin, ymax - ymin); }

std::string to_string(StepEvent event) {
  switch (event) {
    case StepEvent::None: return "none";
    case StepEvent::GoalReached: return "goal";
    case StepEvent::Collision: return "collision";
    case StepEvent::Timeout: return "timeout";
  }
  return "none";
}

StepEvent step_event_from_string(const std::string& name) {
  if (name == "none") return StepEvent::None;
  if (name == "goal") return StepEvent::GoalReached;
  if (name == "collision") return StepEvent::Collision;
  if (name == "timeout") return StepEvent::Timeout;
  throw ValidationError("unknown step event '" + name + "'");
}

double normalize_angle(double angle) {
  constexpr double kPi = std::numbers::pi;
  double a = std::fmod(angle, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

RobotState step_dynamics(const RobotState& state, double v_cmd, double w_cmd, double dt,
                         const MotionLimits& limits) {
  require_finite(state.pose.x, "pose.x");
  require_finite(state.pose.y, "pose.y");
  require_finite(state.pose.theta, "pose.theta");
  require_finite(v_cmd, "linear command");
  require_finite(w_cmd, "angular command");
  require_finite(dt, "dt");
  if (dt <= 0.0) throw ValidationError("dt must be positive");

  const double v = std::clamp(v_cmd, 0.0, limits.v_max);
  const double w = std::clamp(w_cmd, -limits.w_max, limits.w_max);
  RobotState next;
  next.pose.x = state.pose.x + v * std::cos(state.pose.theta) * dt;
  next.pose.y = state.pose.y + v * std::sin(state.pose.theta) * dt;
  next.pose.theta = normalize_angle(state.pose.theta + w * dt);
  next.v = v;
  next.w = w;
  return next;
}

double distance_to_box(Vec2 p, const ObstacleBox& box) {
  const double dx = std::max({box.xmin() - p.x, 0.0, p.x - box.xmax()});
  const double dy = std::max({box.ymin() - p.y, 0.0, p.y - box.ymax()});
  return std::hypot(dx, dy);
}

double nearest_obstacle_distance(const World& world, Vec2 p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& box : world.obstacles) best = std::min(best, distance_to_box(p, box));
  return best;
}

bool check_collision(const World& world, const Pose& pose, double safe_dist) {
  const Vec2 p = pose.position();
  if (!world.bounds.contains(p)) return true;
  return nearest_obstacle_distance(world, p) < safe_dist;
}

bool goal_reached(const Pose& pose, Vec2 goal, double goal_tol) {
  return std::hypot(pose.x - goal.x, pose.y - goal.y) < goal_tol;
}

double box_separation(const ObstacleBox& a, const ObstacleBox& b) {
  const double gx = std::max({a.xmin() - b.xmax(), 0.0, b.xmin() - a.xmax()});
  const double gy = std::max({a.ymin() - b.ymax(), 0.0, b.ymin() - a.ymax()});
  return std::hypot(gx, gy);
}

World sample_world(const WorldConfig& config, std::uint64_t seed) {
  const Bounds& b = config.bounds;
  if (!(b.xmax > b.xmin && b.ymax > b.ymin)) throw ValidationError("empty world bounds");
  if (config.n_obstacles < 0) throw ValidationError("negative obstacle count");
  if (config.min_obstacle_size <= 0.0 || config.max_obstacle_size < config.min_obstacle_size) {
    throw ValidationError("invalid obstacle size range");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  World world;
  world.bounds = b;
  const double clearance = config.safe_dist + config.clearance_margin;
  const double m = config.border_margin;
  if (b.xmax - b.xmin <= 2 * m || b.ymax - b.ymin <= 2 * m) {
    throw InfeasibleConfig("border margin leaves no room for start and goal");
  }

  int attempts = 0;
  auto budget_left = [&] { return attempts++ < config.max_attempts; };

  // Start and goal first, then obstacles around them.
  bool placed = false;
  while (budget_left()) {
    world.start.x = uniform(b.xmin + m, b.xmax - m);
    world.start.y = uniform(b.ymin + m, b.ymax - m);
    world.goal.x = uniform(b.xmin + m, b.xmax - m);
    world.goal.y = uniform(b.ymin + m, b.ymax - m);
    if (std::hypot(world.goal.x - world.start.x, world.goal.y - world.start.y) >=
        config.min_start_goal_distance) {
      placed = true;
      break;
    }
  }
  if (!placed) throw InfeasibleConfig("could not place start and goal");
  world.start.theta = normalize_angle(uniform(-std::numbers::pi, std::numbers::pi));

  while (static_cast<int>(world.obstacles.size()) < config.n_obstacles) {
    if (!budget_left()) {
      throw InfeasibleConfig("could not place " + std::to_string(config.n_obstacles) +
                             " obstacles within " + std::to_string(config.max_attempts) +
                             " attempts");
    }
    ObstacleBox box;
    box.width = uniform(config.min_obstacle_size, config.max_obstacle_size);
    box.height = uniform(config.min_obstacle_size, config.max_obstacle_size);
    box.cx = uniform(b.xmin + 0.5 * box.width, b.xmax - 0.5 * box.width);
    box.cy = uniform(b.ymin + 0.5 * box.height, b.ymax - 0.5 * box.height);
    if (distance_to_box(world.start.position(), box) < clearance) continue;
    if (distance_to_box(world.goal, box) < clearance) continue;
    const bool spaced = std::all_of(world.obstacles.begin(), world.obstacles.end(), [&](const ObstacleBox& o) {
      return box_separation(o, box) >= config.min_separation;
    });
    if (spaced) world.obstacles.push_back(box);
  }
  return world;
}

std::string validate_sampled_world(const World& world, const WorldConfig& config) {
  const double clearance = config.safe_dist + config.clearance_margin;
  if (!world.bounds.contains(world.goal)) return "goal outside bounds";
  if (!world.bounds.contains(world.start.position())) return "start outside bounds";
  for (std::size_t i = 0; i < world.obstacles.size(); ++i) {
    const auto& o = world.obstacles[i];
    if (o.width <= 0.0 || o.height <= 0.0) return "degenerate obstacle " + std::to_string(i);
    if (o.xmin() < world.bounds.xmin || o.xmax() > world.bounds.xmax || o.ymin() < world.bounds.ymin ||
        o.ymax() > world.bounds.ymax) {
      return "obstacle " + std::to_string(i) + " leaves bounds";
    }
    if (distance_to_box(world.start.position(), o) < clearance) return "start too close to obstacle " + std::to_string(i);
    if (distance_to_box(world.goal, o) < clearance) return "goal too close to obstacle " + std::to_string(i);
    for (std::size_t j = i + 1; j < world.obstacles.size(); ++j) {
      if (box_separation(o, world.obstacles[j]) < config.min_separation) {
        return "obstacles " + std::to_string(i) + " and " + std::to_string(j) + " closer than separation";
      }
    }
  }
  return {};
}

}  // namespace dtnav
