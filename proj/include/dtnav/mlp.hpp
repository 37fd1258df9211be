#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace dtnav {

enum class Activation { Identity, Relu, Tanh };

std::string to_string(Activation act);

struct MlpGradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  /// Gradient w.r.t. the network input, one column per sample.
  Eigen::MatrixXd input;
};

/// Fully connected network. Inputs and outputs are column-major batches,
/// one sample per column. The architecture is fixed at construction.
class Mlp {
 public:
  struct Cache {
    // layer_inputs[0] is the network input, layer_inputs[l] the activated output of layer l-1.
    std::vector<Eigen::MatrixXd> layer_inputs;
    Eigen::MatrixXd output;
  };

  Mlp() = default;
  Mlp(std::vector<int> widths, std::vector<Activation> activations);

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
  void init_uniform(std::mt19937_64& rng);
  void set_zero();

  Eigen::MatrixXd forward(const Eigen::MatrixXd& input) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& input, Cache& cache) const;
  Eigen::VectorXd forward_one(const Eigen::VectorXd& input) const;

  /// Backprop of sum(upstream .* output) given a cache from forward().
  MlpGradients backward(const Cache& cache, const Eigen::MatrixXd& upstream) const;

  /// target <- tau * online + (1 - tau) * target
  void polyak_update(const Mlp& online, double tau);

  int input_dim() const { return widths_.front(); }
  int output_dim() const { return widths_.back(); }
  std::size_t layer_count() const { return weights_.size(); }
  std::size_t parameter_count() const;
  const std::vector<int>& widths() const { return widths_; }
  const std::vector<Activation>& activations() const { return activations_; }

  /// e.g. "24-256relu-256relu-2tanh"
  std::string descriptor() const;

  Eigen::MatrixXd& weight(std::size_t layer) { return weights_[layer]; }
  const Eigen::MatrixXd& weight(std::size_t layer) const { return weights_[layer]; }
  Eigen::VectorXd& bias(std::size_t layer) { return biases_[layer]; }
  const Eigen::VectorXd& bias(std::size_t layer) const { return biases_[layer]; }

  bool all_finite() const;
  friend bool operator==(const Mlp& a, const Mlp& b);

 private:
  std::vector<int> widths_;
  std::vector<Activation> activations_;
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
};

MlpGradients mlp_gradients(const Mlp& net, const Eigen::MatrixXd& input, const Eigen::MatrixXd& upstream);

class Adam {
 public:
  Adam() = default;
  Adam(const Mlp& net, double lr, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);

  void step(Mlp& net, const MlpGradients& grads);

  double learning_rate() const { return lr_; }
  long step_count() const { return t_; }

  // Moment access for checkpointing.
  std::vector<Eigen::MatrixXd>& m_weights() { return m_w_; }
  std::vector<Eigen::MatrixXd>& v_weights() { return v_w_; }
  std::vector<Eigen::VectorXd>& m_biases() { return m_b_; }
  std::vector<Eigen::VectorXd>& v_biases() { return v_b_; }
  const std::vector<Eigen::MatrixXd>& m_weights() const { return m_w_; }
  const std::vector<Eigen::MatrixXd>& v_weights() const { return v_w_; }
  const std::vector<Eigen::VectorXd>& m_biases() const { return m_b_; }
  const std::vector<Eigen::VectorXd>& v_biases() const { return v_b_; }
  void set_step_count(long t) { t_ = t; }

 private:
  double lr_ = 1e-3, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  long t_ = 0;
  std::vector<Eigen::MatrixXd> m_w_, v_w_;
  std::vector<Eigen::VectorXd> m_b_, v_b_;
};

}  // namespace dtnav
