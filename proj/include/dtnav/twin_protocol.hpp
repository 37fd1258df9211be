#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dtnav/lidarsim.hpp"
#include "dtnav/worldsim.hpp"

namespace dtnav {

/// Largest accepted frame, excluding the newline.
inline constexpr std::size_t kMaxFrameBytes = 1 << 20;

class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(const std::string& what, std::string offending)
      : std::runtime_error(what), offending_(std::move(offending)) {}
  const std::string& offending_bytes() const { return offending_; }

 private:
  std::string offending_;
};

namespace msg {

struct CmdVel {
  double v = 0.0;
  double w = 0.0;
  friend bool operator==(const CmdVel&, const CmdVel&) = default;
};

/// Ranges use kNoReturn for misses; they travel as JSON null.
struct Scan {
  Pose pose;
  std::vector<double> ranges;
  double angle_min = 0.0;
  double angle_max = 0.0;
  double max_range = 0.0;

  LaserScan to_laser_scan() const;
  static Scan from(const LaserScan& scan, const Pose& pose);
  friend bool operator==(const Scan&, const Scan&) = default;
};

struct Status {
  StepEvent event = StepEvent::None;
  Pose pose;
  Vec2 goal;
  friend bool operator==(const Status&, const Status&) = default;
};

struct Pause {
  friend bool operator==(const Pause&, const Pause&) = default;
};
struct Resume {
  friend bool operator==(const Resume&, const Resume&) = default;
};
struct Bye {
  friend bool operator==(const Bye&, const Bye&) = default;
};

}  // namespace msg

using TwinMessage = std::variant<msg::CmdVel, msg::Scan, msg::Status, msg::Pause, msg::Resume, msg::Bye>;

/// One JSON object, no trailing newline.
std::string encode_message(const TwinMessage& message);
TwinMessage decode_message(std::string_view line);

/// Wire tag of a message: cmd_vel, scan, status, pause, resume or bye.
std::string message_type(const TwinMessage& message);

}  // namespace dtnav
