#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "techroute/network.hpp"
#include "techroute/policy_model.hpp"
#include "techroute/trainer.hpp"

namespace test {

inline double relative_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / scale;
}

/// Worst relative error between an analytic gradient and central differences
/// of f over `coordinates` random parameter indices.
inline double finite_difference_error(std::span<double> params,
                                      const std::vector<double>& analytic,
                                      const std::function<double()>& f, int coordinates,
                                      std::mt19937_64& rng, double h = 1e-6) {
  std::uniform_int_distribution<std::size_t> pick(0, params.size() - 1);
  double worst = 0.0;
  for (int k = 0; k < coordinates; ++k) {
    const std::size_t j = pick(rng);
    const double saved = params[j];
    params[j] = saved + h;
    const double up = f();
    params[j] = saved - h;
    const double down = f();
    params[j] = saved;
    worst = std::max(worst, relative_error(analytic[j], (up - down) / (2 * h)));
  }
  return worst;
}

inline std::vector<double> random_input(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> x(n);
  for (double& v : x) v = z(rng);
  return x;
}

/// Output gradient of the network at random inputs.
inline double network_gradient_error(techroute::NeuralNet net, int inputs, int coordinates,
                                     std::mt19937_64& rng) {
  double worst = 0.0;
  for (int t = 0; t < inputs; ++t) {
    const auto x = random_input(rng, net.input_size());
    techroute::NeuralNet::Tape tape;
    net.forward(x, tape);
    std::vector<double> grad(net.parameter_count(), 0.0);
    net.backward(tape, 1.0, grad);
    worst = std::max(worst, finite_difference_error(
                                net.parameters(), grad, [&] { return net.forward(x); },
                                coordinates, rng));
  }
  return worst;
}

/// Random minibatch whose ratios spread around the clip range.
inline std::vector<techroute::Sample> random_batch(const techroute::PolicyModel& model,
                                                   std::mt19937_64& rng, int size) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<techroute::Sample> batch;
  for (int k = 0; k < size; ++k) {
    techroute::Sample s;
    s.observation = random_input(rng, model.policy_net.input_size());
    const double mu = model.mean_alpha(s.observation);
    s.raw_alpha = mu + model.sigma * z(rng);
    s.log_prob = techroute::gaussian_log_density(s.raw_alpha, mu, model.sigma) + 0.3 * z(rng);
    s.value = model.value(s.observation) + 0.1 * z(rng);
    s.target = s.value + z(rng);
    s.advantage = z(rng);
    batch.push_back(std::move(s));
  }
  return batch;
}

struct LossGradientErrors {
  double policy = 0.0;
  double log_sigma = 0.0;
  double value = 0.0;
  double clipped_value = 0.0;
};

inline LossGradientErrors loss_gradient_errors(int batches, int coordinates,
                                               std::mt19937_64& rng) {
  using namespace techroute;
  LossGradientErrors out;
  for (int b = 0; b < batches; ++b) {
    PolicyModel model = PolicyModel::random(rng, {16, 16});
    // Larger output weights so mu moves visibly with the parameters.
    for (double& p : model.policy_net.parameters()) p *= 3.0;
    const auto batch = random_batch(model, rng, 16);
    const double eps = 0.2;

    const auto pg = policy_loss(model, batch, eps);
    out.policy = std::max(out.policy, finite_difference_error(
        model.policy_net.parameters(), pg.gradient,
        [&] { return policy_loss(model, batch, eps).loss; }, coordinates, rng));

    const double log_sigma = std::log(model.sigma);
    const double h = 1e-6;
    model.sigma = std::exp(log_sigma + h);
    const double up = policy_loss(model, batch, eps).loss;
    model.sigma = std::exp(log_sigma - h);
    const double down = policy_loss(model, batch, eps).loss;
    model.sigma = std::exp(log_sigma);
    out.log_sigma = std::max(out.log_sigma,
                             relative_error(pg.log_sigma_gradient, (up - down) / (2 * h)));

    for (bool clipped : {false, true}) {
      const auto vg = value_network_loss(model, batch, eps, clipped);
      const double err = finite_difference_error(
          model.value_net.parameters(), vg.gradient,
          [&] { return value_network_loss(model, batch, eps, clipped).loss; }, coordinates,
          rng);
      (clipped ? out.clipped_value : out.value) =
          std::max(clipped ? out.clipped_value : out.value, err);
    }
  }
  return out;
}

}  // namespace test
