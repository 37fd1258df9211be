#include "dtnav/lidarsim.hpp"

#include <algorithm>
#include <cmath>

namespace dtnav {

void ScanParams::validate() const {
  if (n_beams < 2) throw ValidationError("scan needs at least two beams");
  if (!(angle_min < angle_max)) throw ValidationError("scan angle_min must be below angle_max");
  if (!(max_range > 0.0) || !std::isfinite(max_range)) throw ValidationError("scan max_range must be positive");
}

double LaserScan::min_range() const {
  double best = kNoReturn;
  for (double r : ranges) best = std::min(best, r);
  return best;
}

std::optional<double> ray_box_intersect(Vec2 origin, Vec2 direction, const ObstacleBox& box) {
  double t_enter = -std::numeric_limits<double>::infinity();
  double t_exit = std::numeric_limits<double>::infinity();

  auto slab = [&](double o, double d, double lo, double hi) {
    if (d == 0.0) return o >= lo && o <= hi;
    double t0 = (lo - o) / d;
    double t1 = (hi - o) / d;
    if (t0 > t1) std::swap(t0, t1);
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
    return true;
  };

  if (!slab(origin.x, direction.x, box.xmin(), box.xmax())) return std::nullopt;
  if (!slab(origin.y, direction.y, box.ymin(), box.ymax())) return std::nullopt;
  if (t_enter > t_exit || t_exit < 0.0) return std::nullopt;
  return std::max(t_enter, 0.0);
}

LaserScan simulate_scan(const World& world, const Pose& pose, const ScanParams& params) {
  params.validate();
  LaserScan scan;
  scan.params = params;
  scan.ranges.assign(static_cast<std::size_t>(params.n_beams), kNoReturn);
  const Vec2 origin = pose.position();
  for (int i = 0; i < params.n_beams; ++i) {
    const double angle = pose.theta + params.beam_angle(i);
    const Vec2 dir{std::cos(angle), std::sin(angle)};
    double best = kNoReturn;
    for (const auto& box : world.obstacles) {
      if (auto t = ray_box_intersect(origin, dir, box); t && *t < best) best = *t;
    }
    if (best <= params.max_range) scan.ranges[static_cast<std::size_t>(i)] = best;
  }
  return scan;
}

void apply_range_jitter(LaserScan& scan, double amplitude, std::mt19937_64& rng) {
  if (amplitude <= 0.0) return;
  std::uniform_real_distribution<double> noise(-amplitude, amplitude);
  const double max_range = scan.params.max_range;
  for (double& r : scan.ranges) {
    if (!has_return(r)) continue;
    r = std::clamp(r + noise(rng), 1e-6, max_range);
  }
}

}  // namespace dtnav
