#include "dtnav/perception.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dtnav {

std::vector<std::size_t> ClusterLabel::members(int cluster) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == cluster) out.push_back(i);
  }
  return out;
}

std::vector<Point2> scan_to_points(const LaserScan& scan, const Pose& robot_pose) {
  std::vector<Point2> points;
  points.reserve(scan.ranges.size());
  for (std::size_t i = 0; i < scan.ranges.size(); ++i) {
    const double r = scan.ranges[i];
    // Misses would become phantom points at the sensor origin if kept as 0.
    if (!std::isfinite(r) || r <= 0.0) continue;
    const double angle = robot_pose.theta + scan.params.beam_angle(static_cast<int>(i));
    points.push_back({robot_pose.x + r * std::cos(angle), robot_pose.y + r * std::sin(angle)});
  }
  return points;
}

std::vector<std::size_t> region_query(Point2 p, const std::vector<Point2>& points, double eps) {
  if (!(eps > 0.0)) throw ValidationError("eps must be positive");
  std::vector<std::size_t> neighbors;
  for (std::size_t q = 0; q < points.size(); ++q) {
    if (std::hypot(points[q].x - p.x, points[q].y - p.y) <= eps) neighbors.push_back(q);
  }
  return neighbors;
}

namespace {

// Cluster growth from a core point. `seeds` is the growing neighborhood N;
// `in_seeds` keeps N a set under union.
void expand_cluster(std::size_t core, std::vector<std::size_t> seeds, const std::vector<Point2>& points,
                    double eps, int min_pts, int cluster, std::vector<int>& labels, std::vector<char>& visited) {
  std::vector<char> in_seeds(points.size(), 0);
  for (auto s : seeds) in_seeds[s] = 1;
  labels[core] = cluster;

  for (std::size_t k = 0; k < seeds.size(); ++k) {
    const std::size_t q = seeds[k];
    if (!visited[q]) {
      visited[q] = 1;
      auto grown = region_query(points[q], points, eps);
      if (static_cast<int>(grown.size()) >= min_pts) {
        for (auto n : grown) {
          if (!in_seeds[n]) {
            in_seeds[n] = 1;
            seeds.push_back(n);
          }
        }
      }
    }
    if (labels[q] < 0) labels[q] = cluster;
  }
}

}  // namespace

ClusterLabel dbscan(const std::vector<Point2>& points, double eps, int min_pts) {
  if (!(eps > 0.0)) throw ValidationError("eps must be positive");
  if (min_pts < 1) throw ValidationError("min_pts must be at least 1");
  ClusterLabel result;
  result.labels.assign(points.size(), ClusterLabel::kUnvisited);
  std::vector<char> visited(points.size(), 0);

  for (std::size_t p = 0; p < points.size(); ++p) {
    if (visited[p]) continue;
    visited[p] = 1;
    auto neighbors = region_query(points[p], points, eps);
    if (static_cast<int>(neighbors.size()) >= min_pts) {
      expand_cluster(p, std::move(neighbors), points, eps, min_pts, result.cluster_count, result.labels, visited);
      ++result.cluster_count;
    } else {
      result.labels[p] = ClusterLabel::kNoise;
    }
  }
  return result;
}

ObstacleEstimate cluster_properties(const std::vector<Point2>& cluster_points, const Pose& robot_pose,
                                    double min_spawn_size) {
  if (cluster_points.empty()) throw ValidationError("cluster_properties needs a non-empty cluster");
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& p : cluster_points) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  ObstacleEstimate est;
  est.center = {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)};
  est.distance_to_robot = std::hypot(est.center.x - robot_pose.x, est.center.y - robot_pose.y);
  est.width = std::max(xmax - xmin, min_spawn_size);
  est.height = std::max(ymax - ymin, min_spawn_size);
  return est;
}

std::vector<ObstacleEstimate> extract_obstacles(const LaserScan& scan, const Pose& robot_pose,
                                                const PerceptionParams& params) {
  const auto points = scan_to_points(scan, robot_pose);
  const auto labels = dbscan(points, params.eps, params.min_pts);
  std::vector<std::vector<Point2>> clusters(static_cast<std::size_t>(labels.cluster_count));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (labels.labels[i] >= 0) clusters[static_cast<std::size_t>(labels.labels[i])].push_back(points[i]);
  }
  std::vector<ObstacleEstimate> estimates;
  estimates.reserve(clusters.size());
  for (const auto& c : clusters) estimates.push_back(cluster_properties(c, robot_pose, params.min_spawn_size));
  return estimates;
}

ObstacleBox to_box(const ObstacleEstimate& estimate) {
  return {estimate.center.x, estimate.center.y, estimate.width, estimate.height};
}

World reconstruct_world(const LaserScan& scan, const Pose& robot_pose, Vec2 goal, const Bounds& bounds,
                        const PerceptionParams& params) {
  World world;
  world.bounds = bounds;
  world.goal = goal;
  world.start = robot_pose;
  for (const auto& est : extract_obstacles(scan, robot_pose, params)) world.obstacles.push_back(to_box(est));
  return world;
}

}  // namespace dtnav
