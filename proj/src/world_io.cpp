#include "dtnav/world_io.hpp"

#include <cmath>
#include <fstream>

namespace dtnav {

namespace {

double number(const nlohmann::json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key) || !obj.at(key).is_number()) {
    throw ValidationError(std::string("world document: missing numeric field '") + key + "'");
  }
  const double v = obj.at(key).get<double>();
  if (!std::isfinite(v)) throw ValidationError(std::string("world document: non-finite '") + key + "'");
  return v;
}

}  // namespace

nlohmann::json world_to_json(const World& world) {
  nlohmann::json doc;
  doc["bounds"] = {{"xmin", world.bounds.xmin},
                   {"ymin", world.bounds.ymin},
                   {"xmax", world.bounds.xmax},
                   {"ymax", world.bounds.ymax}};
  doc["goal"] = {{"x", world.goal.x}, {"y", world.goal.y}};
  doc["start"] = {{"x", world.start.x}, {"y", world.start.y}, {"theta", world.start.theta}};
  auto obstacles = nlohmann::json::array();
  for (const auto& o : world.obstacles) {
    obstacles.push_back({{"cx", o.cx}, {"cy", o.cy}, {"width", o.width}, {"height", o.height}});
  }
  doc["obstacles"] = std::move(obstacles);
  return doc;
}

World world_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("world document must be an object");
  World world;
  const auto& b = doc.value("bounds", nlohmann::json{});
  world.bounds = {number(b, "xmin"), number(b, "ymin"), number(b, "xmax"), number(b, "ymax")};
  if (!(world.bounds.xmax > world.bounds.xmin && world.bounds.ymax > world.bounds.ymin)) {
    throw ValidationError("world document: empty bounds");
  }
  const auto& g = doc.value("goal", nlohmann::json{});
  world.goal = {number(g, "x"), number(g, "y")};
  if (!world.bounds.contains(world.goal)) throw ValidationError("world document: goal outside bounds");
  if (doc.contains("start")) {
    const auto& s = doc.at("start");
    world.start = {number(s, "x"), number(s, "y"), s.contains("theta") ? number(s, "theta") : 0.0};
    world.start.theta = normalize_angle(world.start.theta);
  }
  if (doc.contains("obstacles")) {
    if (!doc.at("obstacles").is_array()) throw ValidationError("world document: obstacles must be an array");
    for (const auto& o : doc.at("obstacles")) {
      ObstacleBox box{number(o, "cx"), number(o, "cy"), number(o, "width"), number(o, "height")};
      if (box.width <= 0.0 || box.height <= 0.0) throw ValidationError("world document: obstacle with non-positive size");
      world.obstacles.push_back(box);
    }
  }
  return world;
}

World load_world_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open world file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("world file " + path.string() + ": " + e.what());
  }
  return world_from_json(doc);
}

void save_world_file(const World& world, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write world file " + path.string());
  out << world_to_json(world).dump(2) << '\n';
}

}  // namespace dtnav
