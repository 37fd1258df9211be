#pragma once

#include <cstddef>
#include <vector>

#include "dtnav/lidarsim.hpp"
#include "dtnav/worldsim.hpp"

namespace dtnav {

using Point2 = Vec2;

/// Per-point DBSCAN assignment. Cluster ids are dense from 0 in creation order.
struct ClusterLabel {
  static constexpr int kUnvisited = -2;
  static constexpr int kNoise = -1;

  std::vector<int> labels;
  int cluster_count = 0;

  std::vector<std::size_t> members(int cluster) const;
  friend bool operator==(const ClusterLabel&, const ClusterLabel&) = default;
};

struct ObstacleEstimate {
  Vec2 center;
  double width = 0.0;
  double height = 0.0;
  double distance_to_robot = 0.0;
};

struct PerceptionParams {
  double eps = 0.35;
  int min_pts = 3;
  double min_spawn_size = 0.2;
};

/// Projects every beam with a finite, nonzero range into the world frame.
std::vector<Point2> scan_to_points(const LaserScan& scan, const Pose& robot_pose);

/// Indices of all points within eps of p (inclusive), in input order.
std::vector<std::size_t> region_query(Point2 p, const std::vector<Point2>& points, double eps);

ClusterLabel dbscan(const std::vector<Point2>& points, double eps, int min_pts);

ObstacleEstimate cluster_properties(const std::vector<Point2>& cluster_points, const Pose& robot_pose,
                                    double min_spawn_size);

std::vector<ObstacleEstimate> extract_obstacles(const LaserScan& scan, const Pose& robot_pose,
                                                const PerceptionParams& params);

ObstacleBox to_box(const ObstacleEstimate& estimate);

/// Rebuilds a world from one scan. Goal and bounds are copied through and the
/// robot pose becomes the world start.
World reconstruct_world(const LaserScan& scan, const Pose& robot_pose, Vec2 goal, const Bounds& bounds,
                        const PerceptionParams& params);

}  // namespace dtnav
