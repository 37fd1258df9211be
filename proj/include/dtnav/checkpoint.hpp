#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "dtnav/td3_agent.hpp"

namespace dtnav {

class ArchitectureMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Layout: magic "DTNAVCK1", u32 header length, JSON header (architecture
// descriptor, hyperparameters, generator state), then raw little-endian
// doubles for the six networks followed by the three Adam optimizers.
void save_checkpoint(const Td3Agent& agent, const std::filesystem::path& path);

/// Loads parameters and optimizer moments into `agent`. Throws
/// ArchitectureMismatch when the stored descriptor differs from the agent's.
void load_checkpoint(Td3Agent& agent, const std::filesystem::path& path);

/// Architecture descriptor stored in a checkpoint file.
std::string checkpoint_architecture(const std::filesystem::path& path);

}  // namespace dtnav
