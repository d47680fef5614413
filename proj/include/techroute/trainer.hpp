#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <random>
#include <string>
#include <vector>

#include "techroute/features.hpp"
#include "techroute/instances.hpp"
#include "techroute/policy_model.hpp"

namespace techroute {

/// How the exploration spread evolves: a decayed hyperparameter or a learned
/// log-sigma parameter trained with the policy.
enum class SigmaMode { Decayed, Learned };

struct TrainConfig {
  int iterations = 15000;
  int episodes_per_iteration = 10;
  int epochs = 4;
  int minibatch_size = 256;
  double policy_learning_rate = 3e-4;
  double value_learning_rate = 1e-3;
  double clip_epsilon = 0.2;

  SigmaMode sigma_mode = SigmaMode::Decayed;
  double sigma_initial = 0.2;
  double sigma_decay = 0.9997;
  double sigma_min = 0.02;

  bool cost_scaling = true;
  bool observation_scaling = true;
  bool value_clipping = false;
  bool standardize_advantages = true;

  int warmup_episodes = 50;
  double warmup_alpha = 0.33;
  double cost_scale_quantile = 0.99;

  int eval_interval = 100;  // iterations between deterministic evaluations
  int eval_episodes = 10;

  std::vector<std::size_t> hidden{64, 64};
  SpreadMode spread = SpreadMode::WithinGroup;
  InstanceConfig instance;
  std::uint64_t seed = 1;

  /// Throws ConfigError.
  void validate() const;
  double sigma_at(int iteration) const;
};

/// Augmentation presets 1-5. Preset 1 turns everything on; 2 drops cost
/// scaling; 3 drops observation scaling; 4 drops value clipping and is the
/// default; 5 is preset 1 with a learned sigma.
TrainConfig augmentation_preset(int row);

TrainConfig load_train_config(const std::filesystem::path& path);
TrainConfig train_config_from_json(const std::string& text);
std::string train_config_to_json(const TrainConfig& config);

/// One recorded decision state of a rollout.
struct Sample {
  std::vector<double> observation;  // as seen by the networks at collection
  double raw_alpha = 0.0;           // unclamped draw
  double log_prob = 0.0;
  double value = 0.0;               // V_hat at collection
  double target = 0.0;              // (scaled) cost-to-go
  double advantage = 0.0;
};

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> gradient;  // w.r.t. the network's flat parameters
  double log_sigma_gradient = 0.0;
};

/// Negated mean clipped surrogate over `batch` and its gradient with respect
/// to the policy network (and log sigma).
LossAndGradient policy_loss(const PolicyModel& model,
                            std::span<const Sample> batch, double epsilon);

/// Mean value loss over `batch` and its gradient with respect to the value
/// network.
LossAndGradient value_network_loss(const PolicyModel& model,
                                   std::span<const Sample> batch,
                                   double epsilon, bool clipped);

struct CurvePoint {
  int iteration = 0;
  double train_inconvenience = 0.0;  // mean per customer over the interval
  double eval_inconvenience = 0.0;   // deterministic policy, fixed eval set
  double sigma = 0.0;
  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

struct TrainResult {
  PolicyModel model;
  std::vector<CurvePoint> curve;
  int guarded_iterations = 0;  // iterations rolled back by the finite guard
};

using TrainProgress = std::function<void(const CurvePoint&)>;

/// Seeds of training instances; disjoint from small evaluation seeds.
std::uint64_t training_instance_seed(std::uint64_t seed, int iteration,
                                     int episode);
std::uint64_t training_eval_seed(std::uint64_t seed, int episode);

TrainResult train(const TrainConfig& config, const TrainProgress& progress = {});

/// Delimited table: iteration,train_inconvenience,eval_inconvenience,sigma.
void write_learning_curve(const std::vector<CurvePoint>& curve,
                          const std::filesystem::path& path);

}  // namespace techroute
