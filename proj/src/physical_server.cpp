#include "dtnav/physical_server.hpp"

#include <sstream>

namespace dtnav {

ObstacleInjection ObstacleInjection::parse(const std::string& text) {
  const auto at = text.find('@');
  if (at == std::string::npos) throw ValidationError("injection must look like cx,cy,w,h@step: '" + text + "'");
  std::stringstream ss(text.substr(0, at));
  std::vector<double> values;
  std::string cell;
  try {
    while (std::getline(ss, cell, ',')) values.push_back(std::stod(cell));
    ObstacleInjection inj;
    inj.step = std::stoi(text.substr(at + 1));
    if (values.size() != 4 || values[2] <= 0.0 || values[3] <= 0.0 || inj.step < 0) throw std::invalid_argument("shape");
    inj.box = {values[0], values[1], values[2], values[3]};
    return inj;
  } catch (const std::exception&) {
    throw ValidationError("injection must look like cx,cy,w,h@step: '" + text + "'");
  }
}

PhysicalSim::PhysicalSim(World world, PhysicalParams params)
    : world_(std::move(world)), params_(std::move(params)), state_{world_.start, 0.0, 0.0} {
  params_.scan.validate();
  for (const auto& inj : params_.injections) {
    if (inj.step == 0) world_.obstacles.push_back(inj.box);
  }
}

msg::Status PhysicalSim::status() const { return {event_, state_.pose, world_.goal}; }

std::vector<TwinMessage> PhysicalSim::handle(const TwinMessage& message) {
  if (const auto* cmd = std::get_if<msg::CmdVel>(&message)) {
    if (!paused_ && event_ == StepEvent::None) {
      state_ = step_dynamics(state_, cmd->v, cmd->w, params_.dt, params_.limits);
      ++steps_;
      for (const auto& inj : params_.injections) {
        if (inj.step == steps_) world_.obstacles.push_back(inj.box);
      }
      if (check_collision(world_, state_.pose, params_.safe_dist)) {
        event_ = StepEvent::Collision;
      } else if (goal_reached(state_.pose, world_.goal, params_.goal_tol)) {
        event_ = StepEvent::GoalReached;
      } else if (steps_ >= params_.step_budget) {
        event_ = StepEvent::Timeout;
      }
    }
    return {msg::Scan::from(simulate_scan(world_, state_.pose, params_.scan), state_.pose), status()};
  }
  if (std::holds_alternative<msg::Pause>(message)) {
    paused_ = true;
    return {status()};
  }
  if (std::holds_alternative<msg::Resume>(message)) {
    paused_ = false;
    return {status()};
  }
  if (std::holds_alternative<msg::Bye>(message)) {
    bye_ = true;
    return {};
  }
  throw ProtocolError("protocol error: physical side received a '" + message_type(message) + "' message",
                      encode_message(message));
}

SessionOutcome serve_physical(const World& world, Listener& listener, const PhysicalParams& params,
                              const LineChannel::Tap& tap) {
  PhysicalSim sim(world, params);
  SessionOutcome outcome;
  auto finish = [&] {
    outcome.event = sim.event();
    outcome.steps = sim.steps();
    outcome.final_state = sim.state();
    outcome.world = sim.world();
    outcome.collisions = sim.event() == StepEvent::Collision ? 1 : 0;
    return outcome;
  };

  LineChannel channel = listener.accept(params.io_timeout);
  if (tap) channel.set_tap(tap);
  try {
    while (!sim.bye_received()) {
      const TwinMessage request = channel.receive(sim.paused() ? params.pause_timeout : params.io_timeout);
      for (const auto& reply : sim.handle(request)) channel.send(reply);
    }
  } catch (const ConnectionClosed& e) {
    // A twin may hang up once the run has ended.
    if (sim.event() == StepEvent::None) {
      outcome.aborted = true;
      outcome.diagnostic = std::string("connection lost mid-session: ") + e.what();
    }
  } catch (const std::exception& e) {
    outcome.aborted = true;
    outcome.diagnostic = e.what();
  }
  return finish();
}

}  // namespace dtnav
