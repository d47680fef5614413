#include "techroute/network.hpp"

#include <cmath>

#include "techroute/errors.hpp"

namespace techroute {

std::size_t NeuralNet::parameter_count(const std::vector<std::size_t>& dims) {
  std::size_t n = 0;
  for (std::size_t l = 1; l < dims.size(); ++l)
    n += dims[l] * dims[l - 1] + dims[l];
  return n;
}

NeuralNet::NeuralNet(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  if (dims_.size() < 2 || dims_.back() != 1)
    throw ShapeError("network needs at least two layers and a scalar output");
  for (std::size_t d : dims_)
    if (d == 0) throw ShapeError("network layer of width zero");
  params_.assign(parameter_count(dims_), 0.0);
}

void NeuralNet::initialize(std::mt19937_64& rng, double output_gain) {
  std::size_t offset = 0;
  for (std::size_t l = 1; l < dims_.size(); ++l) {
    const std::size_t in = dims_[l - 1], out = dims_[l];
    double bound = std::sqrt(6.0 / static_cast<double>(in + out));
    if (l + 1 == dims_.size()) bound *= output_gain;
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (std::size_t k = 0; k < in * out; ++k) params_[offset + k] = dist(rng);
    offset += in * out;
    for (std::size_t k = 0; k < out; ++k) params_[offset + k] = 0.0;
    offset += out;
  }
}

double NeuralNet::forward(std::span<const double> input) const {
  Tape tape;
  return forward(input, tape);
}

double NeuralNet::forward(std::span<const double> input, Tape& tape) const {
  if (input.size() != input_size())
    throw ShapeError("network input has " + std::to_string(input.size()) +
                     " features, expected " + std::to_string(input_size()));
  tape.activations.resize(dims_.size());
  tape.activations[0].assign(input.begin(), input.end());
  std::size_t offset = 0;
  for (std::size_t l = 1; l < dims_.size(); ++l) {
    const std::size_t in = dims_[l - 1], out = dims_[l];
    const double* w = params_.data() + offset;
    const double* b = w + in * out;
    const auto& x = tape.activations[l - 1];
    auto& y = tape.activations[l];
    y.resize(out);
    const bool hidden = l + 1 < dims_.size();
    for (std::size_t o = 0; o < out; ++o) {
      double z = b[o];
      const double* row = w + o * in;
      for (std::size_t i = 0; i < in; ++i) z += row[i] * x[i];
      y[o] = hidden ? std::tanh(z) : z;
    }
    offset += in * out + out;
  }
  return tape.activations.back()[0];
}

void NeuralNet::backward(const Tape& tape, double grad_output,
                         std::span<double> grad) const {
  if (grad.size() != params_.size())
    throw ShapeError("gradient buffer size mismatch");
  // delta holds dOutput/dz for the current layer's pre-activations.
  std::vector<double> delta{grad_output};
  std::vector<double> prev;
  std::size_t offset = params_.size();
  for (std::size_t l = dims_.size() - 1; l >= 1; --l) {
    const std::size_t in = dims_[l - 1], out = dims_[l];
    offset -= in * out + out;
    const double* w = params_.data() + offset;
    double* gw = grad.data() + offset;
    double* gb = gw + in * out;
    const auto& x = tape.activations[l - 1];
    for (std::size_t o = 0; o < out; ++o) {
      const double d = delta[o];
      gb[o] += d;
      double* grow = gw + o * in;
      for (std::size_t i = 0; i < in; ++i) grow[i] += d * x[i];
    }
    if (l == 1) break;
    prev.assign(in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      const double* row = w + o * in;
      for (std::size_t i = 0; i < in; ++i) prev[i] += row[i] * delta[o];
    }
    // x is tanh(z) for hidden layers: dtanh = 1 - tanh^2
    for (std::size_t i = 0; i < in; ++i) prev[i] *= 1.0 - x[i] * x[i];
    delta.swap(prev);
  }
}

bool NeuralNet::finite() const {
  for (double p : params_)
    if (!std::isfinite(p)) return false;
  return true;
}

Adam::Adam(std::size_t size, double learning_rate, double beta1, double beta2,
           double epsilon)
    : lr_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      eps_(epsilon),
      m_(size, 0.0),
      v_(size, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size())
    throw ShapeError("optimizer buffer size mismatch");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    m_[k] = beta1_ * m_[k] + (1.0 - beta1_) * grad[k];
    v_[k] = beta2_ * v_[k] + (1.0 - beta2_) * grad[k] * grad[k];
    params[k] -= lr_ * (m_[k] / c1) / (std::sqrt(v_[k] / c2) + eps_);
  }
}

}  // namespace techroute
