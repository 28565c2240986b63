#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ellm/nn.hpp"

using namespace ellm;
using namespace ellm::nn;

TEST_CASE("dueling combination subtracts the mean advantage") {
  Matrix value(1, 1);
  value << 1.0;
  Matrix advantage(1, 3);
  advantage << 1.0, 2.0, 3.0;
  const Matrix q = dueling_combine(value, advantage);
  CHECK(q(0, 0) == doctest::Approx(0.0));
  CHECK(q(0, 1) == doctest::Approx(1.0));
  CHECK(q(0, 2) == doctest::Approx(2.0));

  // Adding a constant to every advantage leaves Q unchanged.
  Matrix shifted = advantage.array() + 11.5;
  const Matrix q2 = dueling_combine(value, shifted);
  CHECK((q - q2).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("zero parameters give a zero Q vector") {
  Rng rng(1);
  DuelingQNetwork net(3, 4, 5, rng);
  std::vector<double> zeros(net.parameter_count(), 0.0);
  net.unflatten(zeros);
  const Vector q = net.q_values_single(Vector::Ones(3));
  CHECK(q.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("flatten and unflatten round-trip the parameters") {
  Rng rng(2);
  DuelingQNetwork net(4, 6, 3, rng);
  const std::vector<double> params = net.flatten();
  Rng rng2(99);
  DuelingQNetwork other(4, 6, 3, rng2);
  other.unflatten(params);
  CHECK(other.flatten() == params);
  CHECK(other.parameter_hash() == net.parameter_hash());

  std::vector<double> wrong(params.size() + 1, 0.0);
  CHECK_THROWS_AS(net.unflatten(wrong), std::invalid_argument);
}

TEST_CASE("analytic gradients match central finite differences") {
  // A tiny network so every parameter is probed.
  Rng rng(5);
  DuelingQNetwork net(2, 2, 2, rng);

  Matrix inputs(3, 2);
  inputs << 0.3, -0.7, 1.1, 0.4, -0.2, 0.9;
  const std::vector<int> actions = {0, 1, 0};
  Vector targets(3);
  targets << 0.5, -0.25, 1.5;

  DuelingQNetwork grad_net = net;
  grad_net.loss_and_grad(inputs, actions, targets);
  const std::vector<double> analytic = grad_net.flatten_gradients();
  const std::vector<double> params = net.flatten();
  REQUIRE(analytic.size() == params.size());

  const double h = 1e-5;
  double max_rel_error = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    std::vector<double> plus = params, minus = params;
    plus[i] += h;
    minus[i] -= h;
    DuelingQNetwork net_plus = net, net_minus = net;
    net_plus.unflatten(plus);
    net_minus.unflatten(minus);
    const double numeric =
        (net_plus.loss(inputs, actions, targets) - net_minus.loss(inputs, actions, targets)) /
        (2.0 * h);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-6});
    max_rel_error = std::max(max_rel_error, std::abs(analytic[i] - numeric) / denom);
  }
  CHECK(max_rel_error < 1e-3);
}

TEST_CASE("zero learning rate leaves parameters unchanged") {
  Rng rng(7);
  DuelingQNetwork net(3, 4, 3, rng);
  const std::vector<double> before = net.flatten();
  Matrix inputs(2, 3);
  inputs << 1.0, 0.0, -1.0, 0.5, 0.25, 0.75;
  Vector targets(2);
  targets << 1.0, -1.0;
  net.loss_and_grad(inputs, {0, 2}, targets);
  AdamConfig adam;
  adam.lr = 0.0;
  net.adam_step(adam);
  CHECK(net.flatten() == before);
}

TEST_CASE("repeated updates on a fixed batch drive the loss down") {
  Rng rng(11);
  DuelingQNetwork net(3, 16, 4, rng);
  Matrix inputs(8, 3);
  Rng data_rng(13);
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 3; ++c) inputs(r, c) = data_rng.next_unit() * 2.0 - 1.0;
  }
  std::vector<int> actions;
  Vector targets(8);
  for (int r = 0; r < 8; ++r) {
    actions.push_back(static_cast<int>(data_rng.next_below(4)));
    targets(r) = data_rng.next_unit();
  }
  AdamConfig adam;
  adam.lr = 3e-3;
  double previous = net.loss(inputs, actions, targets);
  const double initial = previous;
  int regressions = 0;
  double final_loss = previous;
  for (int step = 0; step < 100; ++step) {
    net.loss_and_grad(inputs, actions, targets);
    net.adam_step(adam);
    final_loss = net.loss(inputs, actions, targets);
    if (final_loss > previous + 1e-12) ++regressions;
    previous = final_loss;
  }
  // Adaptive-moment transients allow a few upticks; the trend must be down.
  CHECK(regressions <= 5);
  CHECK(final_loss < initial * 0.5);
}
