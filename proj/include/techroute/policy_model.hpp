#pragma once

#include <filesystem>
#include <random>
#include <span>
#include <vector>

#include "techroute/domain.hpp"
#include "techroute/features.hpp"
#include "techroute/network.hpp"

namespace techroute {

/// Streaming per-feature mean and variance (Chan et al. batch merge).
class Normalizer {
 public:
  explicit Normalizer(std::size_t dims = kFeatureCount, double clip = 5.0);

  void update(std::span<const double> sample);
  void update_batch(std::span<const FeatureVector> samples);

  /// (x - mean) / sqrt(var + 1e-8), clipped to [-clip, clip]. Identity
  /// (still clipped) before any sample has been seen.
  std::vector<double> normalize(std::span<const double> x) const;

  std::size_t dims() const { return mean_.size(); }
  double count() const { return count_; }
  double clip() const { return clip_; }
  const std::vector<double>& mean() const { return mean_; }
  std::vector<double> variance() const;
  const std::vector<double>& m2() const { return m2_; }

  static Normalizer restore(double count, std::vector<double> mean,
                            std::vector<double> m2, double clip);
  friend bool operator==(const Normalizer&, const Normalizer&) = default;

 private:
  double count_ = 0.0;
  double clip_ = 5.0;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

/// Gaussian parametrization lambda_theta(alpha | S): mean from the policy
/// network through a logistic squash, spread sigma.
struct PolicyModel {
  NeuralNet policy_net;
  NeuralNet value_net;
  Normalizer normalizer;
  double sigma = 0.2;
  double cost_scale = 1.0;
  bool scale_observations = true;
  SpreadMode spread = SpreadMode::WithinGroup;

  /// 14 -> hidden... -> 1 networks with zero weights (alpha = 0.5 everywhere).
  static PolicyModel zeros(const std::vector<std::size_t>& hidden = {64, 64});
  static PolicyModel random(std::mt19937_64& rng,
                            const std::vector<std::size_t>& hidden = {64, 64});

  std::vector<double> observe(const FeatureVector& features) const;
  /// Squashed mean mu in (0, 1) for a prepared observation.
  double mean_alpha(std::span<const double> observation) const;
  double value(std::span<const double> observation) const;
};

double logistic(double z);

/// log N(x; mu, sigma^2).
double gaussian_log_density(double x, double mu, double sigma);

/// Lambda(S): the mode of the parametrization, used at evaluation time.
/// Throws ModelError when the network output is not finite.
double lambda_deterministic(const PolicyModel& model, const DecisionState& state);

struct AlphaSample {
  double alpha = 0.0;     // clamped into [0, 1]; what the policy uses
  double raw = 0.0;       // unclamped Gaussian draw
  double mu = 0.0;
  double log_prob = 0.0;  // log-density of the unclamped draw
};

AlphaSample sample_alpha_from(double mu, double sigma, std::mt19937_64& rng);
AlphaSample sample_alpha(const PolicyModel& model, const DecisionState& state,
                         std::mt19937_64& rng);

/// Versioned JSON model file. Throws VersionError / ShapeError on mismatch.
void save_model(const PolicyModel& model, const std::filesystem::path& path);
PolicyModel load_model(const std::filesystem::path& path);

}  // namespace techroute
