#pragma once

#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "dtnav/worldsim.hpp"

namespace dtnav {

/// Range value used for beams without a return.
inline constexpr double kNoReturn = std::numeric_limits<double>::infinity();

inline bool has_return(double range) { return range != kNoReturn; }

/// Beam i points at angle_min + i * (angle_max - angle_min) / (n_beams - 1),
/// relative to the robot heading. The default covers the full circle in 2 degree
/// steps without duplicating the -pi/pi direction.
struct ScanParams {
  int n_beams = 180;
  double angle_min = -std::numbers::pi;
  double angle_max = std::numbers::pi - 2.0 * std::numbers::pi / 180.0;
  double max_range = 10.0;

  double beam_angle(int i) const { return angle_min + i * (angle_max - angle_min) / (n_beams - 1); }
  void validate() const;
  friend bool operator==(const ScanParams&, const ScanParams&) = default;
};

struct LaserScan {
  std::vector<double> ranges;
  ScanParams params;

  /// Smallest finite range, or kNoReturn when every beam misses.
  double min_range() const;
  friend bool operator==(const LaserScan&, const LaserScan&) = default;
};

/// Slab-method ray/box test. Returns the entry distance, 0 when the origin is
/// inside or on the box, nullopt when the ray misses.
std::optional<double> ray_box_intersect(Vec2 origin, Vec2 direction, const ObstacleBox& box);

LaserScan simulate_scan(const World& world, const Pose& pose, const ScanParams& params);

/// Adds uniform jitter in [-amplitude, amplitude] to every returned range,
/// keeping results inside (0, max_range]. Off in every default pipeline.
void apply_range_jitter(LaserScan& scan, double amplitude, std::mt19937_64& rng);

}  // namespace dtnav
