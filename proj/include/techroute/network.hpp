#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace techroute {

/// Fully connected network with tanh hidden layers and one linear output.
/// Parameters live in a single flat buffer, layer by layer: the weight matrix
/// (out x in, row-major) followed by the bias vector.
class NeuralNet {
 public:
  NeuralNet() = default;
  explicit NeuralNet(std::vector<std::size_t> dims);

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t input_size() const { return dims_.empty() ? 0 : dims_.front(); }
  std::size_t parameter_count() const { return params_.size(); }
  static std::size_t parameter_count(const std::vector<std::size_t>& dims);

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  /// Scaled uniform (Glorot) init; the output layer is shrunk by
  /// `output_gain` so initial predictions start near the bias.
  void initialize(std::mt19937_64& rng, double output_gain = 0.01);

  /// Activations of every layer for one input, kept for backprop.
  struct Tape {
    std::vector<std::vector<double>> activations;
  };

  double forward(std::span<const double> input) const;
  double forward(std::span<const double> input, Tape& tape) const;

  /// Adds d(output)/d(params) * grad_output into `grad`.
  void backward(const Tape& tape, double grad_output,
                std::span<double> grad) const;

  bool finite() const;
  friend bool operator==(const NeuralNet&, const NeuralNet&) = default;

 private:
  std::vector<std::size_t> dims_;
  std::vector<double> params_;
};

/// Adam with bias correction over a flat parameter buffer.
class Adam {
 public:
  Adam() = default;
  Adam(std::size_t size, double learning_rate, double beta1 = 0.9,
       double beta2 = 0.999, double epsilon = 1e-8);

  void step(std::span<double> params, std::span<const double> grad);
  double learning_rate() const { return lr_; }

 private:
  double lr_ = 1e-3, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  long long t_ = 0;
  std::vector<double> m_, v_;
};

}  // namespace techroute
