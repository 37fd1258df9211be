#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <filesystem>
#include <random>
#include <vector>

#include "dtnav/navigation.hpp"

namespace dtnav {

struct Transition {
  std::vector<double> state;
  Action action;
  double reward = 0.0;
  std::vector<double> next_state;
  bool done = false;

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Column-major minibatch: one sample per column.
struct Batch {
  Eigen::MatrixXd states;
  Eigen::MatrixXd actions;
  Eigen::RowVectorXd rewards;
  Eigen::MatrixXd next_states;
  Eigen::RowVectorXd dones;

  Eigen::Index size() const { return states.cols(); }
};

Batch make_batch(const std::vector<Transition>& transitions);

/// Fixed-capacity FIFO of transitions with uniform sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 100000);

  void push(Transition t);
  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return data_.empty(); }

  /// i-th oldest transition.
  const Transition& at(std::size_t i) const;
  std::vector<Transition> in_order() const;

  /// Uniform sampling with replacement. Requires size() >= batch_size.
  Batch sample(std::size_t batch_size, std::mt19937_64& rng) const;

  // Snapshot: magic "DTNAVRB1", u64 count, then per record a u32 byte length
  // followed by the record (u32 state dim, state, action, reward, next state, u8 done).
  void save(const std::filesystem::path& path) const;
  static ReplayBuffer load(const std::filesystem::path& path, std::size_t capacity);

 private:
  std::size_t capacity_;
  std::vector<Transition> data_;
  std::size_t head_ = 0;  // next slot to overwrite once full
};

}  // namespace dtnav
