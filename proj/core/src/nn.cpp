#include "ellm/nn.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace ellm::nn {

void Linear::init(int in, int out, Rng& rng) {
  w.resize(in, out);
  b.resize(out);
  const double scale = std::sqrt(6.0 / (in + out));
  for (int r = 0; r < in; ++r) {
    for (int c = 0; c < out; ++c) {
      w(r, c) = (rng.next_unit() * 2.0 - 1.0) * scale;
    }
  }
  // Small nonzero biases keep pre-activations off the ReLU kink.
  const double bias_scale = 1.0 / std::sqrt(static_cast<double>(in));
  for (int c = 0; c < out; ++c) {
    b(c) = (rng.next_unit() * 2.0 - 1.0) * bias_scale;
  }
  gw = Matrix::Zero(in, out);
  gb = Vector::Zero(out);
  mw = Matrix::Zero(in, out);
  vw = Matrix::Zero(in, out);
  mb = Vector::Zero(out);
  vb = Vector::Zero(out);
}

Matrix Linear::backward(const Matrix& x, const Matrix& grad_out) {
  gw.noalias() += x.transpose() * grad_out;
  gb.noalias() += grad_out.colwise().sum().transpose();
  return grad_out * w.transpose();
}

void Linear::zero_grad() {
  gw.setZero();
  gb.setZero();
}

void Linear::adam_step(const AdamConfig& cfg, std::int64_t t) {
  const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  mw = cfg.beta1 * mw + (1.0 - cfg.beta1) * gw;
  vw = cfg.beta2 * vw + (1.0 - cfg.beta2) * gw.cwiseProduct(gw);
  mb = cfg.beta1 * mb + (1.0 - cfg.beta1) * gb;
  vb = cfg.beta2 * vb + (1.0 - cfg.beta2) * gb.cwiseProduct(gb);
  w.array() -= cfg.lr * (mw.array() / bias1) / ((vw.array() / bias2).sqrt() + cfg.eps);
  b.array() -= cfg.lr * (mb.array() / bias1) / ((vb.array() / bias2).sqrt() + cfg.eps);
}

std::size_t Linear::parameter_count() const {
  return static_cast<std::size_t>(w.size()) + static_cast<std::size_t>(b.size());
}

void Mlp::init(const std::vector<int>& dims, Rng& rng) {
  layers.clear();
  layers.resize(dims.size() - 1);
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    layers[i].init(dims[i], dims[i + 1], rng);
  }
}

Matrix Mlp::forward(const Matrix& x, std::vector<Matrix>* pre_activations) const {
  Matrix h = x;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    Matrix pre = layers[i].forward(h);
    if (pre_activations) pre_activations->push_back(pre);
    if (i + 1 < layers.size()) {
      h = pre.cwiseMax(0.0);
    } else {
      h = std::move(pre);
    }
  }
  return h;
}

Matrix Mlp::backward(const Matrix& x, const std::vector<Matrix>& pre_activations,
                     const Matrix& grad_out) {
  Matrix grad = grad_out;
  for (std::size_t i = layers.size(); i-- > 0;) {
    if (i + 1 < layers.size()) {
      // Backprop through the ReLU that followed this layer.
      grad = grad.cwiseProduct(
          (pre_activations[i].array() > 0.0).cast<double>().matrix());
    }
    Matrix input;
    if (i == 0) {
      input = x;
    } else {
      input = pre_activations[i - 1].cwiseMax(0.0);
    }
    grad = layers[i].backward(input, grad);
  }
  return grad;
}

void Mlp::zero_grad() {
  for (auto& layer : layers) layer.zero_grad();
}

void Mlp::adam_step(const AdamConfig& cfg, std::int64_t t) {
  for (auto& layer : layers) layer.adam_step(cfg, t);
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers) n += layer.parameter_count();
  return n;
}

void Mlp::flatten_into(std::vector<double>& out) const {
  for (const auto& layer : layers) {
    out.insert(out.end(), layer.w.data(), layer.w.data() + layer.w.size());
    out.insert(out.end(), layer.b.data(), layer.b.data() + layer.b.size());
  }
}

void Mlp::flatten_gradients_into(std::vector<double>& out) const {
  for (const auto& layer : layers) {
    out.insert(out.end(), layer.gw.data(), layer.gw.data() + layer.gw.size());
    out.insert(out.end(), layer.gb.data(), layer.gb.data() + layer.gb.size());
  }
}

std::size_t Mlp::unflatten_from(const std::vector<double>& in, std::size_t offset) {
  for (auto& layer : layers) {
    std::memcpy(layer.w.data(), in.data() + offset, sizeof(double) * layer.w.size());
    offset += layer.w.size();
    std::memcpy(layer.b.data(), in.data() + offset, sizeof(double) * layer.b.size());
    offset += layer.b.size();
  }
  return offset;
}

Matrix dueling_combine(const Matrix& value, const Matrix& advantage) {
  const Vector mean_adv = advantage.rowwise().mean();
  Matrix q = advantage;
  q.colwise() -= mean_adv;
  q.colwise() += value.col(0);
  return q;
}

DuelingQNetwork::DuelingQNetwork(int input_dim, int hidden_width, int num_actions, Rng& rng)
    : input_dim_(input_dim), num_actions_(num_actions) {
  encoder_.init(input_dim, hidden_width, rng);
  value_.init({hidden_width, hidden_width, hidden_width, 1}, rng);
  advantage_.init({hidden_width, hidden_width, hidden_width, num_actions}, rng);
}

Matrix DuelingQNetwork::q_values(const Matrix& inputs) const {
  const Matrix encoded = encoder_.forward(inputs).cwiseMax(0.0);
  const Matrix value = value_.forward(encoded);
  const Matrix advantage = advantage_.forward(encoded);
  return dueling_combine(value, advantage);
}

Vector DuelingQNetwork::q_values_single(const Vector& input) const {
  return q_values(input.transpose()).row(0).transpose();
}

double DuelingQNetwork::loss(const Matrix& inputs, const std::vector<int>& actions,
                             const Vector& targets) const {
  const Matrix q = q_values(inputs);
  double total = 0.0;
  for (int i = 0; i < q.rows(); ++i) {
    const double diff = q(i, actions[static_cast<std::size_t>(i)]) - targets(i);
    total += diff * diff;
  }
  return total / static_cast<double>(q.rows());
}

double DuelingQNetwork::loss_and_grad(const Matrix& inputs, const std::vector<int>& actions,
                                      const Vector& targets) {
  encoder_.zero_grad();
  value_.zero_grad();
  advantage_.zero_grad();

  const Matrix encoder_pre = encoder_.forward(inputs);
  const Matrix encoded = encoder_pre.cwiseMax(0.0);
  std::vector<Matrix> value_pre, advantage_pre;
  const Matrix value = value_.forward(encoded, &value_pre);
  const Matrix advantage = advantage_.forward(encoded, &advantage_pre);
  const Matrix q = dueling_combine(value, advantage);

  const auto batch = q.rows();
  double total = 0.0;
  Matrix grad_q = Matrix::Zero(batch, num_actions_);
  for (int i = 0; i < batch; ++i) {
    const int a = actions[static_cast<std::size_t>(i)];
    const double diff = q(i, a) - targets(i);
    total += diff * diff;
    grad_q(i, a) = 2.0 * diff / static_cast<double>(batch);
  }

  // Q = V + A - mean(A): dV = rowsum(dQ); dA = dQ - rowmean(dQ).
  Matrix grad_value = grad_q.rowwise().sum();
  Matrix grad_advantage = grad_q;
  const Vector row_mean = grad_q.rowwise().mean();
  grad_advantage.colwise() -= row_mean;

  Matrix grad_encoded = value_.backward(encoded, value_pre, grad_value);
  grad_encoded += advantage_.backward(encoded, advantage_pre, grad_advantage);
  Matrix grad_pre =
      grad_encoded.cwiseProduct((encoder_pre.array() > 0.0).cast<double>().matrix());
  encoder_.backward(inputs, grad_pre);

  return total / static_cast<double>(batch);
}

void DuelingQNetwork::adam_step(const AdamConfig& cfg) {
  adam_t_ += 1;
  encoder_.adam_step(cfg, adam_t_);
  value_.adam_step(cfg, adam_t_);
  advantage_.adam_step(cfg, adam_t_);
}

std::vector<double> DuelingQNetwork::flatten() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  out.insert(out.end(), encoder_.w.data(), encoder_.w.data() + encoder_.w.size());
  out.insert(out.end(), encoder_.b.data(), encoder_.b.data() + encoder_.b.size());
  value_.flatten_into(out);
  advantage_.flatten_into(out);
  return out;
}

void DuelingQNetwork::unflatten(const std::vector<double>& params) {
  if (params.size() != parameter_count()) {
    throw std::invalid_argument("parameter vector size mismatch");
  }
  std::size_t offset = 0;
  std::memcpy(encoder_.w.data(), params.data(), sizeof(double) * encoder_.w.size());
  offset += encoder_.w.size();
  std::memcpy(encoder_.b.data(), params.data() + offset, sizeof(double) * encoder_.b.size());
  offset += encoder_.b.size();
  offset = value_.unflatten_from(params, offset);
  advantage_.unflatten_from(params, offset);
}

std::vector<double> DuelingQNetwork::flatten_gradients() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  out.insert(out.end(), encoder_.gw.data(), encoder_.gw.data() + encoder_.gw.size());
  out.insert(out.end(), encoder_.gb.data(), encoder_.gb.data() + encoder_.gb.size());
  value_.flatten_gradients_into(out);
  advantage_.flatten_gradients_into(out);
  return out;
}

std::size_t DuelingQNetwork::parameter_count() const {
  return encoder_.parameter_count() + value_.parameter_count() + advantage_.parameter_count();
}

std::uint64_t DuelingQNetwork::parameter_hash() const {
  const std::vector<double> params = flatten();
  return fnv1a64(std::string_view(reinterpret_cast<const char*>(params.data()),
                                  params.size() * sizeof(double)));
}

}  // namespace ellm::nn
