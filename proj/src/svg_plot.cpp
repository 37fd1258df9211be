#include "dtnav/svg_plot.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

namespace dtnav {

namespace {

constexpr double kCanvas = 600.0;
constexpr double kPad = 20.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

struct Frame {
  double xmin, ymin, xmax, ymax;

  double scale() const { return (kCanvas - 2 * kPad) / std::max({xmax - xmin, ymax - ymin, 1e-9}); }
  double px(double x) const { return kPad + (x - xmin) * scale(); }
  double py(double y) const { return kCanvas - kPad - (y - ymin) * scale(); }
};

}  // namespace

std::string render_trajectories_svg(const std::vector<EpisodeTrace>& episodes, const std::optional<World>& world) {
  if (episodes.empty()) throw ValidationError("nothing to plot: no trajectories");
  Frame f{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  auto extend = [&f](double x, double y) {
    f.xmin = std::min(f.xmin, x);
    f.ymin = std::min(f.ymin, y);
    f.xmax = std::max(f.xmax, x);
    f.ymax = std::max(f.ymax, y);
  };
  if (world) {
    extend(world->bounds.xmin, world->bounds.ymin);
    extend(world->bounds.xmax, world->bounds.ymax);
  }
  for (const auto& ep : episodes) {
    extend(ep.goal.x, ep.goal.y);
    for (const auto& r : ep.records) extend(r.x, r.y);
  }

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" viewBox=\"0 0 600 600\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"600\" height=\"600\" fill=\"white\"/>\n";
  if (world) {
    for (const auto& o : world->obstacles) {
      svg += "<rect class=\"obstacle\" x=\"" + fmt(f.px(o.xmin())) + "\" y=\"" + fmt(f.py(o.ymax())) + "\" width=\"" +
             fmt(o.width * f.scale()) + "\" height=\"" + fmt(o.height * f.scale()) + "\" fill=\"#888888\"/>\n";
    }
  }
  for (const auto& ep : episodes) {
    const bool collided = ep.outcome == "collision";
    svg += "<polyline class=\"" + std::string(collided ? "path collision" : "path") + "\" fill=\"none\" stroke=\"" +
           (collided ? "#d62728" : "#1f77b4") + "\" stroke-width=\"2\"" +
           (collided ? " stroke-dasharray=\"6,3\"" : " stroke-dasharray=\"2,2\"") + " points=\"";
    for (std::size_t i = 0; i < ep.records.size(); ++i) {
      if (i) svg += ' ';
      svg += fmt(f.px(ep.records[i].x)) + "," + fmt(f.py(ep.records[i].y));
    }
    svg += "\"/>\n";
    svg += "<circle class=\"goal\" cx=\"" + fmt(f.px(ep.goal.x)) + "\" cy=\"" + fmt(f.py(ep.goal.y)) +
           "\" r=\"5\" fill=\"#2ca02c\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string render_q_curve_svg(const TrainingLog& log, std::size_t window) {
  std::vector<double> smoothed;
  double acc = 0.0;
  for (std::size_t i = 0; i < log.updates.size(); ++i) {
    acc += log.updates[i].avg_q;
    if (i >= window) acc -= log.updates[i - window].avg_q;
    smoothed.push_back(acc / static_cast<double>(std::min(i + 1, window)));
  }
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" viewBox=\"0 0 600 600\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"600\" height=\"600\" fill=\"white\"/>\n";
  if (!smoothed.empty()) {
    const auto [lo, hi] = std::minmax_element(smoothed.begin(), smoothed.end());
    const double span = std::max(*hi - *lo, 1e-9);
    const std::size_t stride = std::max<std::size_t>(1, smoothed.size() / 1000);
    svg += "<polyline class=\"avg-q\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < smoothed.size(); i += stride) {
      const double x = kPad + (kCanvas - 2 * kPad) * static_cast<double>(i) / std::max<double>(1.0, smoothed.size() - 1.0);
      const double y = kCanvas - kPad - (kCanvas - 2 * kPad) * (smoothed[i] - *lo) / span;
      if (!first) svg += ' ';
      first = false;
      svg += fmt(x) + "," + fmt(y);
    }
    svg += "\"/>\n";
    svg += "<text x=\"25\" y=\"15\" font-size=\"12\">average Q: " + fmt(*lo) + " .. " + fmt(*hi) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace dtnav
