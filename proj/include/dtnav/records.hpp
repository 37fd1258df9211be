#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "dtnav/worldsim.hpp"

namespace dtnav {

/// One control tick of a run.
struct TrajectoryRecord {
  double t = 0.0;
  double x = 0.0, y = 0.0, theta = 0.0;
  double v = 0.0, w = 0.0;
  double reward = 0.0;
  double min_scan_range = 0.0;
  std::string phase = "Navigating";
};

struct EpisodeTrace {
  int episode = 0;
  Vec2 goal;
  /// Terminal event, or "retrain_failed" for twin runs stopped after a failed retrain.
  std::string outcome = "none";
  double episode_return = 0.0;
  std::vector<TrajectoryRecord> records;
};

/// Outcome rates shared by evaluation runs and twin runs.
struct Metrics {
  int episodes = 0;
  int successes = 0;
  int collisions = 0;
  int timeouts = 0;
  int retrain_failures = 0;

  void add(const std::string& outcome);
  double success_rate() const;
  double collision_rate() const;
  double timeout_rate() const;
  double retrain_failed_rate() const;
};

nlohmann::json metrics_to_json(const Metrics& m);
Metrics metrics_from_json(const nlohmann::json& doc);
void write_metrics(const Metrics& m, const std::filesystem::path& path);

/// CSV header: episode,t,x,y,theta,v,w,reward,min_scan_range,phase,goal_x,goal_y,outcome
void write_trajectories(const std::vector<EpisodeTrace>& episodes, const std::filesystem::path& path);
std::vector<EpisodeTrace> read_trajectories(const std::filesystem::path& path);

struct EpisodeLog {
  long episode = 0;
  double episode_return = 0.0;
  StepEvent outcome = StepEvent::None;
  int steps = 0;
  friend bool operator==(const EpisodeLog&, const EpisodeLog&) = default;
};

struct UpdateLog {
  long update = 0;
  double critic1_loss = 0.0;
  double critic2_loss = 0.0;
  double avg_q = 0.0;
  friend bool operator==(const UpdateLog&, const UpdateLog&) = default;
};

struct TrainingLog {
  std::vector<EpisodeLog> episodes;
  std::vector<UpdateLog> updates;

  /// Mean avg_q over the first and last `fraction` of updates.
  std::pair<double, double> q_deciles(double fraction = 0.1) const;
  friend bool operator==(const TrainingLog&, const TrainingLog&) = default;
};

/// Writes episodes.csv (episode,return,outcome,steps) and updates.csv
/// (update,critic1_loss,critic2_loss,avg_q).
void write_training_log(const TrainingLog& log, const std::filesystem::path& episodes_csv,
                        const std::filesystem::path& updates_csv);
TrainingLog read_training_log(const std::filesystem::path& episodes_csv, const std::filesystem::path& updates_csv);

}  // namespace dtnav
