#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "ellm/rng.hpp"

namespace ellm::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Fully-connected layer with its gradient and Adam moment buffers.
struct Linear {
  Matrix w;  // in x out
  Vector b;
  Matrix gw;
  Vector gb;
  Matrix mw, vw;
  Vector mb, vb;

  void init(int in, int out, Rng& rng);
  Matrix forward(const Matrix& x) const { return (x * w).rowwise() + b.transpose(); }
  // Accumulates parameter gradients and returns dL/dx.
  Matrix backward(const Matrix& x, const Matrix& grad_out);
  void zero_grad();
  void adam_step(const AdamConfig& cfg, std::int64_t t);

  std::size_t parameter_count() const;
};

// Linear stack with ReLU between layers (none after the last).
struct Mlp {
  std::vector<Linear> layers;

  void init(const std::vector<int>& dims, Rng& rng);
  Matrix forward(const Matrix& x, std::vector<Matrix>* pre_activations = nullptr) const;
  // grad_out is dL/d(output); returns dL/d(input).
  Matrix backward(const Matrix& x, const std::vector<Matrix>& pre_activations,
                  const Matrix& grad_out);
  void zero_grad();
  void adam_step(const AdamConfig& cfg, std::int64_t t);

  std::size_t parameter_count() const;
  void flatten_into(std::vector<double>& out) const;
  void flatten_gradients_into(std::vector<double>& out) const;
  std::size_t unflatten_from(const std::vector<double>& in, std::size_t offset);
};

// Dueling Q-network: linear encoder with ReLU feeding 3-layer value and
// advantage streams; Q(s,.) = V(s) + A(s,.) - mean_a A(s,a).
class DuelingQNetwork {
 public:
  DuelingQNetwork() = default;
  DuelingQNetwork(int input_dim, int hidden_width, int num_actions, Rng& rng);

  int input_dim() const { return input_dim_; }
  int num_actions() const { return num_actions_; }

  Matrix q_values(const Matrix& inputs) const;
  Vector q_values_single(const Vector& input) const;

  // Mean squared TD error against per-row targets on the chosen actions.
  double loss(const Matrix& inputs, const std::vector<int>& actions, const Vector& targets) const;
  // Computes loss and leaves gradients in the layer buffers.
  double loss_and_grad(const Matrix& inputs, const std::vector<int>& actions,
                       const Vector& targets);
  void adam_step(const AdamConfig& cfg);

  std::vector<double> flatten() const;
  void unflatten(const std::vector<double>& params);
  // Gradients accumulated by the last loss_and_grad call, in flatten order.
  std::vector<double> flatten_gradients() const;
  std::size_t parameter_count() const;
  // FNV-1a hash of the parameter bytes, for frozen-guide assertions.
  std::uint64_t parameter_hash() const;

 private:
  int input_dim_ = 0;
  int num_actions_ = 0;
  Linear encoder_;
  Mlp value_;
  Mlp advantage_;
  std::int64_t adam_t_ = 0;
};

// Dueling combination used by the Q-network, exposed for direct tests:
// Q = V + A - rowwise mean(A).
Matrix dueling_combine(const Matrix& value, const Matrix& advantage);

}  // namespace ellm::nn
