#include "dtnav/mlp.hpp"

#include <cmath>

#include "dtnav/worldsim.hpp"

namespace dtnav {

std::string to_string(Activation act) {
  switch (act) {
    case Activation::Identity: return "linear";
    case Activation::Relu: return "relu";
    case Activation::Tanh: return "tanh";
  }
  return "linear";
}

namespace {

void activate(Eigen::MatrixXd& z, Activation act) {
  switch (act) {
    case Activation::Identity: break;
    case Activation::Relu: z = z.cwiseMax(0.0); break;
    case Activation::Tanh: z = z.array().tanh().matrix(); break;
  }
}

// Multiplies the upstream gradient by the activation derivative, expressed in
// terms of the activated output.
void activation_backward(Eigen::MatrixXd& grad, const Eigen::MatrixXd& out, Activation act) {
  switch (act) {
    case Activation::Identity: break;
    case Activation::Relu: grad = (out.array() > 0.0).select(grad, 0.0); break;
    case Activation::Tanh: grad = (grad.array() * (1.0 - out.array().square())).matrix(); break;
  }
}

}  // namespace

Mlp::Mlp(std::vector<int> widths, std::vector<Activation> activations)
    : widths_(std::move(widths)), activations_(std::move(activations)) {
  if (widths_.size() < 2) throw ValidationError("an MLP needs at least input and output widths");
  if (activations_.size() != widths_.size() - 1) throw ValidationError("one activation per layer required");
  for (int w : widths_) {
    if (w <= 0) throw ValidationError("layer widths must be positive");
  }
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    weights_.push_back(Eigen::MatrixXd::Zero(widths_[l + 1], widths_[l]));
    biases_.push_back(Eigen::VectorXd::Zero(widths_[l + 1]));
  }
}

void Mlp::init_uniform(std::mt19937_64& rng) {
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(weights_[l].cols()));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index j = 0; j < weights_[l].cols(); ++j) {
      for (Eigen::Index i = 0; i < weights_[l].rows(); ++i) weights_[l](i, j) = dist(rng);
    }
    for (Eigen::Index i = 0; i < biases_[l].size(); ++i) biases_[l](i) = dist(rng);
  }
}

void Mlp::set_zero() {
  for (auto& w : weights_) w.setZero();
  for (auto& b : biases_) b.setZero();
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& input) const {
  if (input.rows() != input_dim()) {
    throw ValidationError("MLP input has " + std::to_string(input.rows()) + " rows, expected " +
                          std::to_string(input_dim()));
  }
  Eigen::MatrixXd x = input;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::MatrixXd z = weights_[l] * x;
    z.colwise() += biases_[l];
    activate(z, activations_[l]);
    x = std::move(z);
  }
  return x;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& input, Cache& cache) const {
  if (input.rows() != input_dim()) {
    throw ValidationError("MLP input has " + std::to_string(input.rows()) + " rows, expected " +
                          std::to_string(input_dim()));
  }
  cache.layer_inputs.resize(weights_.size());
  cache.layer_inputs[0] = input;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::MatrixXd z = weights_[l] * cache.layer_inputs[l];
    z.colwise() += biases_[l];
    activate(z, activations_[l]);
    if (l + 1 < weights_.size()) {
      cache.layer_inputs[l + 1] = std::move(z);
    } else {
      cache.output = std::move(z);
    }
  }
  return cache.output;
}

Eigen::VectorXd Mlp::forward_one(const Eigen::VectorXd& input) const {
  return forward(Eigen::MatrixXd(input)).col(0);
}

MlpGradients Mlp::backward(const Cache& cache, const Eigen::MatrixXd& upstream) const {
  if (upstream.rows() != output_dim() || upstream.cols() != cache.output.cols()) {
    throw ValidationError("upstream gradient shape does not match the network output");
  }
  MlpGradients grads;
  grads.weights.resize(weights_.size());
  grads.biases.resize(weights_.size());
  Eigen::MatrixXd delta = upstream;
  for (std::size_t k = weights_.size(); k-- > 0;) {
    const Eigen::MatrixXd& out = (k + 1 == weights_.size()) ? cache.output : cache.layer_inputs[k + 1];
    activation_backward(delta, out, activations_[k]);
    grads.weights[k].noalias() = delta * cache.layer_inputs[k].transpose();
    grads.biases[k] = delta.rowwise().sum();
    Eigen::MatrixXd prev = weights_[k].transpose() * delta;
    delta = std::move(prev);
  }
  grads.input = std::move(delta);
  return grads;
}

MlpGradients mlp_gradients(const Mlp& net, const Eigen::MatrixXd& input, const Eigen::MatrixXd& upstream) {
  Mlp::Cache cache;
  net.forward(input, cache);
  return net.backward(cache, upstream);
}

void Mlp::polyak_update(const Mlp& online, double tau) {
  if (online.widths_ != widths_ || online.activations_ != activations_) {
    throw ValidationError("polyak update between different architectures");
  }
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    weights_[l] = tau * online.weights_[l] + (1.0 - tau) * weights_[l];
    biases_[l] = tau * online.biases_[l] + (1.0 - tau) * biases_[l];
  }
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].size() + biases_[l].size();
  return n;
}

std::string Mlp::descriptor() const {
  std::string d = std::to_string(widths_.front());
  for (std::size_t l = 0; l < activations_.size(); ++l) {
    d += "-" + std::to_string(widths_[l + 1]) + to_string(activations_[l]);
  }
  return d;
}

bool Mlp::all_finite() const {
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (!weights_[l].allFinite() || !biases_[l].allFinite()) return false;
  }
  return true;
}

bool operator==(const Mlp& a, const Mlp& b) {
  return a.widths_ == b.widths_ && a.activations_ == b.activations_ && a.weights_ == b.weights_ &&
         a.biases_ == b.biases_;
}

Adam::Adam(const Mlp& net, double lr, double beta1, double beta2, double epsilon)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(epsilon) {
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    m_w_.push_back(Eigen::MatrixXd::Zero(net.weight(l).rows(), net.weight(l).cols()));
    v_w_.push_back(m_w_.back());
    m_b_.push_back(Eigen::VectorXd::Zero(net.bias(l).size()));
    v_b_.push_back(m_b_.back());
  }
}

void Adam::step(Mlp& net, const MlpGradients& grads) {
  if (grads.weights.size() != m_w_.size()) throw ValidationError("gradient layer count mismatch");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  const double step = lr_ * std::sqrt(c2) / c1;
  for (std::size_t l = 0; l < m_w_.size(); ++l) {
    m_w_[l] = beta1_ * m_w_[l] + (1.0 - beta1_) * grads.weights[l];
    v_w_[l] = beta2_ * v_w_[l] + (1.0 - beta2_) * grads.weights[l].cwiseAbs2();
    net.weight(l).array() -= step * m_w_[l].array() / (v_w_[l].array().sqrt() + eps_ * std::sqrt(c2));
    m_b_[l] = beta1_ * m_b_[l] + (1.0 - beta1_) * grads.biases[l];
    v_b_[l] = beta2_ * v_b_[l] + (1.0 - beta2_) * grads.biases[l].cwiseAbs2();
    net.bias(l).array() -= step * m_b_[l].array() / (v_b_[l].array().sqrt() + eps_ * std::sqrt(c2));
  }
}

}  // namespace dtnav
