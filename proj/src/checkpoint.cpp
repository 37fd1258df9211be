#include "dtnav/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace dtnav {

namespace {

constexpr char kMagic[8] = {'D', 'T', 'N', 'A', 'V', 'C', 'K', '1'};

void write_doubles(std::ostream& out, const double* data, Eigen::Index n) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

void read_doubles(std::istream& in, double* data, Eigen::Index n) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw std::runtime_error("checkpoint truncated");
}

void write_net(std::ostream& out, const Mlp& net) {
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    write_doubles(out, net.weight(l).data(), net.weight(l).size());
    write_doubles(out, net.bias(l).data(), net.bias(l).size());
  }
}

void read_net(std::istream& in, Mlp& net) {
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    read_doubles(in, net.weight(l).data(), net.weight(l).size());
    read_doubles(in, net.bias(l).data(), net.bias(l).size());
  }
}

void write_adam(std::ostream& out, const Adam& opt) {
  for (std::size_t l = 0; l < opt.m_weights().size(); ++l) {
    write_doubles(out, opt.m_weights()[l].data(), opt.m_weights()[l].size());
    write_doubles(out, opt.v_weights()[l].data(), opt.v_weights()[l].size());
    write_doubles(out, opt.m_biases()[l].data(), opt.m_biases()[l].size());
    write_doubles(out, opt.v_biases()[l].data(), opt.v_biases()[l].size());
  }
}

void read_adam(std::istream& in, Adam& opt) {
  for (std::size_t l = 0; l < opt.m_weights().size(); ++l) {
    read_doubles(in, opt.m_weights()[l].data(), opt.m_weights()[l].size());
    read_doubles(in, opt.v_weights()[l].data(), opt.v_weights()[l].size());
    read_doubles(in, opt.m_biases()[l].data(), opt.m_biases()[l].size());
    read_doubles(in, opt.v_biases()[l].data(), opt.v_biases()[l].size());
  }
}

nlohmann::json read_header(std::istream& in, const std::filesystem::path& path) {
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("not a checkpoint file: " + path.string());
  }
  std::uint32_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  std::string text(len, '\0');
  in.read(text.data(), len);
  if (!in) throw std::runtime_error("checkpoint header truncated: " + path.string());
  return nlohmann::json::parse(text);
}

}  // namespace

void save_checkpoint(const Td3Agent& agent, const std::filesystem::path& path) {
  std::ostringstream rng_state;
  rng_state << agent.rng;
  const auto& c = agent.config();
  nlohmann::json header = {
      {"architecture", agent.architecture()},
      {"state_dim", agent.state_dim()},
      {"hidden", c.hidden},
      {"gamma", c.gamma},
      {"tau", c.tau},
      {"policy_delay", c.policy_delay},
      {"policy_noise", c.policy_noise},
      {"noise_clip", c.noise_clip},
      {"actor_lr", c.actor_lr},
      {"critic_lr", c.critic_lr},
      {"adam_steps", {agent.actor_opt.step_count(), agent.critic1_opt.step_count(), agent.critic2_opt.step_count()}},
      {"rng", rng_state.str()},
  };
  const std::string text = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  out.write(kMagic, sizeof(kMagic));
  const auto len = static_cast<std::uint32_t>(text.size());
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const Mlp* net : {&agent.actor, &agent.actor_target, &agent.critic1, &agent.critic2, &agent.critic1_target,
                         &agent.critic2_target}) {
    write_net(out, *net);
  }
  write_adam(out, agent.actor_opt);
  write_adam(out, agent.critic1_opt);
  write_adam(out, agent.critic2_opt);
  if (!out) throw std::runtime_error("failed writing checkpoint " + path.string());
}

void load_checkpoint(Td3Agent& agent, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  const nlohmann::json header = read_header(in, path);
  const std::string stored = header.at("architecture").get<std::string>();
  if (stored != agent.architecture()) {
    throw ArchitectureMismatch("checkpoint architecture '" + stored + "' does not match '" + agent.architecture() + "'");
  }
  for (Mlp* net : {&agent.actor, &agent.actor_target, &agent.critic1, &agent.critic2, &agent.critic1_target,
                   &agent.critic2_target}) {
    read_net(in, *net);
  }
  read_adam(in, agent.actor_opt);
  read_adam(in, agent.critic1_opt);
  read_adam(in, agent.critic2_opt);
  const auto steps = header.at("adam_steps");
  agent.actor_opt.set_step_count(steps.at(0).get<long>());
  agent.critic1_opt.set_step_count(steps.at(1).get<long>());
  agent.critic2_opt.set_step_count(steps.at(2).get<long>());
  std::istringstream rng_state(header.at("rng").get<std::string>());
  rng_state >> agent.rng;
  if (in.peek() != std::char_traits<char>::eof()) throw std::runtime_error("trailing bytes in checkpoint " + path.string());
}

std::string checkpoint_architecture(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  return read_header(in, path).at("architecture").get<std::string>();
}

}  // namespace dtnav
