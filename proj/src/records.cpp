#include "dtnav/records.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace dtnav {

void Metrics::add(const std::string& outcome) {
  ++episodes;
  if (outcome == "goal") {
    ++successes;
  } else if (outcome == "collision") {
    ++collisions;
  } else if (outcome == "timeout") {
    ++timeouts;
  } else if (outcome == "retrain_failed") {
    ++retrain_failures;
  } else {
    throw ValidationError("episode ended without an outcome: '" + outcome + "'");
  }
}

namespace {

double rate(int count, int total) { return total == 0 ? 0.0 : static_cast<double>(count) / total; }

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

}  // namespace

double Metrics::success_rate() const { return rate(successes, episodes); }
double Metrics::collision_rate() const { return rate(collisions, episodes); }
double Metrics::timeout_rate() const { return rate(timeouts, episodes); }
double Metrics::retrain_failed_rate() const { return rate(retrain_failures, episodes); }

nlohmann::json metrics_to_json(const Metrics& m) {
  return {{"episodes", m.episodes},
          {"successes", m.successes},
          {"collisions", m.collisions},
          {"timeouts", m.timeouts},
          {"retrain_failures", m.retrain_failures},
          {"success_rate", m.success_rate()},
          {"collision_rate", m.collision_rate()},
          {"timeout_rate", m.timeout_rate()},
          {"retrain_failed_rate", m.retrain_failed_rate()}};
}

Metrics metrics_from_json(const nlohmann::json& doc) {
  Metrics m;
  m.episodes = doc.at("episodes").get<int>();
  m.successes = doc.at("successes").get<int>();
  m.collisions = doc.at("collisions").get<int>();
  m.timeouts = doc.at("timeouts").get<int>();
  m.retrain_failures = doc.at("retrain_failures").get<int>();
  return m;
}

void write_metrics(const Metrics& m, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << metrics_to_json(m).dump(2) << '\n';
}

void write_trajectories(const std::vector<EpisodeTrace>& episodes, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "episode,t,x,y,theta,v,w,reward,min_scan_range,phase,goal_x,goal_y,outcome\n";
  for (const auto& ep : episodes) {
    for (const auto& r : ep.records) {
      out << ep.episode << ',' << r.t << ',' << r.x << ',' << r.y << ',' << r.theta << ',' << r.v << ',' << r.w
          << ',' << r.reward << ',' << r.min_scan_range << ',' << r.phase << ',' << ep.goal.x << ',' << ep.goal.y
          << ',' << ep.outcome << '\n';
    }
  }
}

std::vector<EpisodeTrace> read_trajectories(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("episode,t,x,y", 0) != 0) {
    throw ValidationError("trajectory file " + path.string() + " lacks the expected header");
  }
  std::vector<EpisodeTrace> episodes;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 13) throw ValidationError("malformed trajectory row: " + line);
    const int episode = std::stoi(cells[0]);
    if (episodes.empty() || episodes.back().episode != episode) {
      EpisodeTrace trace;
      trace.episode = episode;
      trace.goal = {std::stod(cells[10]), std::stod(cells[11])};
      trace.outcome = cells[12];
      episodes.push_back(std::move(trace));
    }
    TrajectoryRecord r;
    r.t = std::stod(cells[1]);
    r.x = std::stod(cells[2]);
    r.y = std::stod(cells[3]);
    r.theta = std::stod(cells[4]);
    r.v = std::stod(cells[5]);
    r.w = std::stod(cells[6]);
    r.reward = std::stod(cells[7]);
    r.min_scan_range = std::stod(cells[8]);
    r.phase = cells[9];
    episodes.back().records.push_back(std::move(r));
  }
  return episodes;
}

std::pair<double, double> TrainingLog::q_deciles(double fraction) const {
  if (updates.empty()) return {0.0, 0.0};
  const std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(updates.size() * fraction));
  double first = 0.0, last = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    first += updates[i].avg_q;
    last += updates[updates.size() - k + i].avg_q;
  }
  return {first / static_cast<double>(k), last / static_cast<double>(k)};
}

void write_training_log(const TrainingLog& log, const std::filesystem::path& episodes_csv,
                        const std::filesystem::path& updates_csv) {
  auto ep = open_out(episodes_csv);
  ep << "episode,return,outcome,steps\n";
  for (const auto& e : log.episodes) {
    ep << e.episode << ',' << e.episode_return << ',' << to_string(e.outcome) << ',' << e.steps << '\n';
  }
  auto up = open_out(updates_csv);
  up << "update,critic1_loss,critic2_loss,avg_q\n";
  for (const auto& u : log.updates) {
    up << u.update << ',' << u.critic1_loss << ',' << u.critic2_loss << ',' << u.avg_q << '\n';
  }
}

TrainingLog read_training_log(const std::filesystem::path& episodes_csv, const std::filesystem::path& updates_csv) {
  TrainingLog log;
  auto ep = open_in(episodes_csv);
  std::string line;
  std::getline(ep, line);
  while (std::getline(ep, line)) {
    const auto c = split_csv(line);
    if (c.size() != 4) throw ValidationError("malformed episode row: " + line);
    log.episodes.push_back({std::stol(c[0]), std::stod(c[1]), step_event_from_string(c[2]), std::stoi(c[3])});
  }
  auto up = open_in(updates_csv);
  std::getline(up, line);
  while (std::getline(up, line)) {
    const auto c = split_csv(line);
    if (c.size() != 4) throw ValidationError("malformed update row: " + line);
    log.updates.push_back({std::stol(c[0]), std::stod(c[1]), std::stod(c[2]), std::stod(c[3])});
  }
  return log;
}

}  // namespace dtnav
