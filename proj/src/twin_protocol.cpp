#include "dtnav/twin_protocol.hpp"

#include <cmath>

#include "json.hpp"

namespace dtnav {

using nlohmann::json;

namespace msg {

LaserScan Scan::to_laser_scan() const {
  LaserScan scan;
  scan.ranges = ranges;
  scan.params.n_beams = static_cast<int>(ranges.size());
  scan.params.angle_min = angle_min;
  scan.params.angle_max = angle_max;
  scan.params.max_range = max_range;
  return scan;
}

Scan Scan::from(const LaserScan& scan, const Pose& pose) {
  return Scan{pose, scan.ranges, scan.params.angle_min, scan.params.angle_max, scan.params.max_range};
}

}  // namespace msg

namespace {

void require_finite(double v, const char* field) {
  if (!std::isfinite(v)) throw ValidationError(std::string("cannot encode non-finite ") + field);
}

json pose_json(const Pose& p) {
  require_finite(p.x, "pose.x");
  require_finite(p.y, "pose.y");
  require_finite(p.theta, "pose.theta");
  return {{"x", p.x}, {"y", p.y}, {"theta", p.theta}};
}

json to_json(const msg::CmdVel& m) {
  require_finite(m.v, "v");
  require_finite(m.w, "w");
  return {{"type", "cmd_vel"}, {"v", m.v}, {"w", m.w}};
}

json to_json(const msg::Scan& m) {
  json ranges = json::array();
  for (double r : m.ranges) {
    if (has_return(r)) {
      require_finite(r, "range");
      ranges.push_back(r);
    } else {
      ranges.push_back(nullptr);
    }
  }
  require_finite(m.angle_min, "angle_min");
  require_finite(m.angle_max, "angle_max");
  require_finite(m.max_range, "max_range");
  return {{"type", "scan"},         {"pose", pose_json(m.pose)},   {"ranges", std::move(ranges)},
          {"angle_min", m.angle_min}, {"angle_max", m.angle_max}, {"max_range", m.max_range}};
}

json to_json(const msg::Status& m) {
  require_finite(m.goal.x, "goal.x");
  require_finite(m.goal.y, "goal.y");
  return {{"type", "status"},
          {"event", to_string(m.event)},
          {"pose", pose_json(m.pose)},
          {"goal", {{"x", m.goal.x}, {"y", m.goal.y}}}};
}

json to_json(const msg::Pause&) { return {{"type", "pause"}}; }
json to_json(const msg::Resume&) { return {{"type", "resume"}}; }
json to_json(const msg::Bye&) { return {{"type", "bye"}}; }

// Field accessors that turn schema violations into ProtocolError.
struct Reader {
  std::string_view line;

  [[noreturn]] void fail(const std::string& why) const { throw ProtocolError("protocol error: " + why, std::string(line)); }

  const json& field(const json& obj, const char* key) const {
    if (!obj.is_object()) fail("expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(std::string("missing field '") + key + "'");
    return *it;
  }

  double number(const json& obj, const char* key) const {
    const json& v = field(obj, key);
    if (!v.is_number()) fail(std::string("field '") + key + "' is not a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(std::string("field '") + key + "' is not finite");
    return d;
  }

  Pose pose(const json& obj, const char* key) const {
    const json& p = field(obj, key);
    return {number(p, "x"), number(p, "y"), number(p, "theta")};
  }

  void exact_keys(const json& obj, std::initializer_list<const char*> keys) const {
    if (obj.size() != keys.size()) fail("unexpected fields in message");
    for (const char* k : keys) field(obj, k);
  }
};

}  // namespace

std::string encode_message(const TwinMessage& message) {
  return std::visit([](const auto& m) { return to_json(m).dump(); }, message);
}

std::string message_type(const TwinMessage& message) {
  return std::visit([](const auto& m) { return to_json(m).at("type").template get<std::string>(); }, message);
}

TwinMessage decode_message(std::string_view line) {
  Reader rd{line};
  if (line.size() > kMaxFrameBytes) {
    throw ProtocolError("protocol error: frame exceeds 1 MiB", std::string(line.substr(0, 256)));
  }
  json doc = json::parse(line.begin(), line.end(), nullptr, false);
  if (doc.is_discarded()) rd.fail("malformed JSON");
  if (!doc.is_object()) rd.fail("message is not an object");
  const json& type_field = rd.field(doc, "type");
  if (!type_field.is_string()) rd.fail("type is not a string");
  const std::string type = type_field.get<std::string>();

  if (type == "cmd_vel") {
    rd.exact_keys(doc, {"type", "v", "w"});
    return msg::CmdVel{rd.number(doc, "v"), rd.number(doc, "w")};
  }
  if (type == "scan") {
    rd.exact_keys(doc, {"type", "pose", "ranges", "angle_min", "angle_max", "max_range"});
    msg::Scan scan;
    scan.pose = rd.pose(doc, "pose");
    const json& ranges = rd.field(doc, "ranges");
    if (!ranges.is_array()) rd.fail("ranges is not an array");
    scan.ranges.reserve(ranges.size());
    for (const json& r : ranges) {
      if (r.is_null()) {
        scan.ranges.push_back(kNoReturn);
      } else if (r.is_number() && std::isfinite(r.get<double>())) {
        scan.ranges.push_back(r.get<double>());
      } else {
        rd.fail("range entries must be numbers or null");
      }
    }
    scan.angle_min = rd.number(doc, "angle_min");
    scan.angle_max = rd.number(doc, "angle_max");
    scan.max_range = rd.number(doc, "max_range");
    return scan;
  }
  if (type == "status") {
    rd.exact_keys(doc, {"type", "event", "pose", "goal"});
    const json& ev = rd.field(doc, "event");
    if (!ev.is_string()) rd.fail("event is not a string");
    msg::Status status;
    try {
      status.event = step_event_from_string(ev.get<std::string>());
    } catch (const ValidationError&) {
      rd.fail("unknown event '" + ev.get<std::string>() + "'");
    }
    status.pose = rd.pose(doc, "pose");
    const json& goal = rd.field(doc, "goal");
    status.goal = {rd.number(goal, "x"), rd.number(goal, "y")};
    return status;
  }
  if (type == "pause" || type == "resume" || type == "bye") {
    rd.exact_keys(doc, {"type"});
    if (type == "pause") return msg::Pause{};
    if (type == "resume") return msg::Resume{};
    return msg::Bye{};
  }
  rd.fail("unknown message type '" + type + "'");
}

}  // namespace dtnav
