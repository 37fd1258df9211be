#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "dtnav/nav_env.hpp"
#include "dtnav/perception.hpp"
#include "dtnav/records.hpp"
#include "dtnav/retrain.hpp"
#include "dtnav/transport.hpp"

namespace dtnav {

enum class TwinPhase { Bootstrapping, Navigating, DangerPaused, Retraining, Returning, Resuming, Done };

std::string to_string(TwinPhase phase);
TwinPhase twin_phase_from_string(const std::string& name);
bool is_legal_transition(TwinPhase from, TwinPhase to);
/// True iff the sequence starts at Bootstrapping and every step is legal.
bool is_legal_phase_path(const std::vector<TwinPhase>& phases);

struct TwinConfig {
  double danger_threshold = 1.0;
  /// Pause as for danger when goal distance shrinks by less than stall_progress
  /// over stall_window ticks. A window of 0 disables the check.
  int stall_window = 50;
  double stall_progress = 0.2;
  /// Shared with training: dt, limits, collision distance, goal tolerance,
  /// step budget, scan format and state encoding.
  EnvConfig env;
  PerceptionParams perception;
  RetrainConfig retrain;
  std::chrono::milliseconds io_timeout{30000};
  std::uint64_t seed = 0;

  void validate() const;
};

/// True iff the smallest finite range is below the threshold.
bool danger_monitor(const LaserScan& scan, double danger_threshold);

struct TraceEntry {
  bool outgoing = false;
  std::string line;
};

struct TwinRun {
  /// goal, collision, timeout, retrain_failed, protocol_error or connection_lost.
  std::string outcome;
  std::string diagnostic;
  Metrics metrics;
  EpisodeTrace trajectory;
  std::vector<TwinPhase> phases;
  std::vector<TraceEntry> trace;
  int pauses = 0;
  int retrains = 0;
  long retrain_gradient_steps = 0;
};

/// Drives the physical robot over `channel` with the agent's greedy policy,
/// pausing and retraining whenever the danger monitor fires.
TwinRun run_twin(Td3Agent& agent, ReplayBuffer& buffer, LineChannel& channel, const TwinConfig& config);

/// Counts nonzero CmdVel frames sent between a Pause and the following Resume.
int nonzero_commands_while_paused(const std::vector<TraceEntry>& trace);

void write_trace(const std::vector<TraceEntry>& trace, const std::filesystem::path& path);
std::vector<TraceEntry> read_trace(const std::filesystem::path& path);

}  // namespace dtnav
