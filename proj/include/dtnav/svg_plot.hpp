#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dtnav/records.hpp"
#include "dtnav/worldsim.hpp"

namespace dtnav {

/// Obstacles as rectangles, goals as points and one polyline per episode.
/// Collision-terminated paths are drawn red and dashed. Output is byte-stable.
std::string render_trajectories_svg(const std::vector<EpisodeTrace>& episodes, const std::optional<World>& world);

/// Average-Q per update, smoothed with a trailing window.
std::string render_q_curve_svg(const TrainingLog& log, std::size_t window = 100);

}  // namespace dtnav
