#include "techroute/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>

#include "json_util.hpp"
#include "techroute/errors.hpp"
#include "techroute/network.hpp"
#include "techroute/policies.hpp"
#include "techroute/ppo.hpp"
#include "techroute/simulation.hpp"

namespace techroute {

using detail::json;

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("train config: ") + what);
  };
  require(iterations >= 0, "iterations must be non-negative");
  require(episodes_per_iteration >= 1, "episodes_per_iteration must be >= 1");
  require(epochs >= 1, "epochs must be >= 1");
  require(minibatch_size >= 1, "minibatch_size must be >= 1");
  require(policy_learning_rate > 0.0 && value_learning_rate > 0.0,
          "learning rates must be positive");
  require(clip_epsilon > 0.0 && clip_epsilon < 1.0,
          "clip_epsilon must lie in (0, 1)");
  require(sigma_initial > 0.0 && sigma_min > 0.0, "sigma must be positive");
  require(sigma_decay > 0.0 && sigma_decay <= 1.0,
          "sigma_decay must lie in (0, 1]");
  require(warmup_episodes >= 1, "warmup_episodes must be >= 1");
  require(warmup_alpha >= 0.0 && warmup_alpha <= 1.0,
          "warmup_alpha must lie in [0, 1]");
  require(cost_scale_quantile > 0.0 && cost_scale_quantile <= 1.0,
          "cost_scale_quantile must lie in (0, 1]");
  require(eval_interval >= 1, "eval_interval must be >= 1");
  require(eval_episodes >= 1, "eval_episodes must be >= 1");
  require(!hidden.empty(), "at least one hidden layer is required");
  instance.validate();
}

double TrainConfig::sigma_at(int iteration) const {
  return std::max(sigma_min,
                  sigma_initial * std::pow(sigma_decay, static_cast<double>(iteration)));
}

TrainConfig augmentation_preset(int row) {
  TrainConfig c;
  c.cost_scaling = true;
  c.observation_scaling = true;
  c.value_clipping = true;
  c.sigma_mode = SigmaMode::Decayed;
  switch (row) {
    case 1:
      break;
    case 2:
      c.cost_scaling = false;
      break;
    case 3:
      c.observation_scaling = false;
      break;
    case 4:
      c.value_clipping = false;
      break;
    case 5:
      c.sigma_mode = SigmaMode::Learned;
      break;
    default:
      throw ConfigError("augmentation configuration must be 1..5, got " +
                        std::to_string(row));
  }
  return c;
}

// ---------------------------------------------------------------------------
// Config persistence

namespace {

json train_json(const TrainConfig& c) {
  return json{
      {"iterations", c.iterations},
      {"episodes_per_iteration", c.episodes_per_iteration},
      {"epochs", c.epochs},
      {"minibatch_size", c.minibatch_size},
      {"policy_learning_rate", c.policy_learning_rate},
      {"value_learning_rate", c.value_learning_rate},
      {"clip_epsilon", c.clip_epsilon},
      {"sigma_mode", c.sigma_mode == SigmaMode::Decayed ? "decayed" : "learned"},
      {"sigma_initial", c.sigma_initial},
      {"sigma_decay", c.sigma_decay},
      {"sigma_min", c.sigma_min},
      {"cost_scaling", c.cost_scaling},
      {"observation_scaling", c.observation_scaling},
      {"value_clipping", c.value_clipping},
      {"standardize_advantages", c.standardize_advantages},
      {"warmup_episodes", c.warmup_episodes},
      {"warmup_alpha", c.warmup_alpha},
      {"cost_scale_quantile", c.cost_scale_quantile},
      {"eval_interval", c.eval_interval},
      {"eval_episodes", c.eval_episodes},
      {"hidden", c.hidden},
      {"spread", c.spread == SpreadMode::WithinGroup ? "within-group"
                                                     : "cross-group"},
      {"seed", c.seed},
      {"instance", json::parse(config_to_json(c.instance))},
  };
}

template <typename T>
void maybe_read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = detail::get_as<T>(j.at(key), std::string("train.") + key);
}

}  // namespace

TrainConfig train_config_from_json(const std::string& text) {
  const json j = detail::parse_document(text, "<train config>");
  if (!j.is_object()) throw ParseError("train config must be a JSON object");
  TrainConfig c;
  if (j.contains("configuration"))
    c = augmentation_preset(detail::get_as<int>(j.at("configuration"),
                                                 "train.configuration"));
  maybe_read(j, "iterations", c.iterations);
  maybe_read(j, "episodes_per_iteration", c.episodes_per_iteration);
  maybe_read(j, "epochs", c.epochs);
  maybe_read(j, "minibatch_size", c.minibatch_size);
  maybe_read(j, "policy_learning_rate", c.policy_learning_rate);
  maybe_read(j, "value_learning_rate", c.value_learning_rate);
  maybe_read(j, "clip_epsilon", c.clip_epsilon);
  if (j.contains("sigma_mode")) {
    const auto mode = detail::get_as<std::string>(j.at("sigma_mode"), "train.sigma_mode");
    if (mode == "decayed")
      c.sigma_mode = SigmaMode::Decayed;
    else if (mode == "learned")
      c.sigma_mode = SigmaMode::Learned;
    else
      throw ParseError("field 'train.sigma_mode': expected decayed|learned");
  }
  maybe_read(j, "sigma_initial", c.sigma_initial);
  maybe_read(j, "sigma_decay", c.sigma_decay);
  maybe_read(j, "sigma_min", c.sigma_min);
  maybe_read(j, "cost_scaling", c.cost_scaling);
  maybe_read(j, "observation_scaling", c.observation_scaling);
  maybe_read(j, "value_clipping", c.value_clipping);
  maybe_read(j, "standardize_advantages", c.standardize_advantages);
  maybe_read(j, "warmup_episodes", c.warmup_episodes);
  maybe_read(j, "warmup_alpha", c.warmup_alpha);
  maybe_read(j, "cost_scale_quantile", c.cost_scale_quantile);
  maybe_read(j, "eval_interval", c.eval_interval);
  maybe_read(j, "eval_episodes", c.eval_episodes);
  maybe_read(j, "hidden", c.hidden);
  maybe_read(j, "seed", c.seed);
  if (j.contains("spread")) {
    const auto s = detail::get_as<std::string>(j.at("spread"), "train.spread");
    if (s == "within-group")
      c.spread = SpreadMode::WithinGroup;
    else if (s == "cross-group")
      c.spread = SpreadMode::CrossGroup;
    else
      throw ParseError("field 'train.spread': expected within-group|cross-group");
  }
  if (j.contains("instance")) c.instance = config_from_json(j.at("instance").dump());

  static const std::set<std::string> known = {
      "configuration", "iterations", "episodes_per_iteration", "epochs",
      "minibatch_size", "policy_learning_rate", "value_learning_rate",
      "clip_epsilon", "sigma_mode", "sigma_initial", "sigma_decay",
      "sigma_min", "cost_scaling", "observation_scaling", "value_clipping",
      "standardize_advantages", "warmup_episodes", "warmup_alpha",
      "cost_scale_quantile", "eval_interval", "eval_episodes", "hidden",
      "spread", "seed", "instance"};
  std::vector<std::string> warnings;
  detail::note_unknown_keys(j, known, "train", &warnings);
  for (const auto& w : warnings) std::clog << "warning: " << w << '\n';
  c.validate();
  return c;
}

TrainConfig load_train_config(const std::filesystem::path& path) {
  return train_config_from_json(detail::read_text_file(path));
}

std::string train_config_to_json(const TrainConfig& config) {
  return train_json(config).dump(2);
}

// ---------------------------------------------------------------------------
// Losses

LossAndGradient policy_loss(const PolicyModel& model,
                            std::span<const Sample> batch, double epsilon) {
  LossAndGradient out;
  out.gradient.assign(model.policy_net.parameter_count(), 0.0);
  if (batch.empty()) return out;
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  const double sigma = model.sigma;
  NeuralNet::Tape tape;
  for (const Sample& s : batch) {
    const double z = model.policy_net.forward(s.observation, tape);
    const double mu = logistic(z);
    const double log_prob = gaussian_log_density(s.raw_alpha, mu, sigma);
    const double ratio = std::exp(log_prob - s.log_prob);
    out.loss -= inv_n * ppo_objective(ratio, s.advantage, epsilon);
    const double g = ppo_objective_gradient(ratio, s.advantage, epsilon);
    if (g == 0.0) continue;
    const double diff = s.raw_alpha - mu;
    // d log N / d mu and d mu / d z for the logistic squash.
    const double dlogp_dmu = diff / (sigma * sigma);
    const double dz = -inv_n * g * ratio * dlogp_dmu * mu * (1.0 - mu);
    model.policy_net.backward(tape, dz, out.gradient);
    out.log_sigma_gradient +=
        -inv_n * g * ratio * (diff * diff / (sigma * sigma) - 1.0);
  }
  return out;
}

LossAndGradient value_network_loss(const PolicyModel& model,
                                   std::span<const Sample> batch,
                                   double epsilon, bool clipped) {
  LossAndGradient out;
  out.gradient.assign(model.value_net.parameter_count(), 0.0);
  if (batch.empty()) return out;
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  NeuralNet::Tape tape;
  for (const Sample& s : batch) {
    const double v = model.value_net.forward(s.observation, tape);
    out.loss += inv_n * value_loss(v, s.value, s.target, epsilon, clipped);
    const double g = value_loss_gradient(v, s.value, s.target, epsilon, clipped);
    if (g != 0.0) model.value_net.backward(tape, inv_n * g, out.gradient);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Training loop

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 keyed_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                          std::uint32_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a),
                    static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), tag};
  return std::mt19937_64(seq);
}

constexpr std::uint32_t kRolloutTag = 0x5201u;
constexpr std::uint32_t kShuffleTag = 0x5202u;
constexpr std::uint32_t kInitTag = 0x5203u;

InstanceRealization training_instance(const TrainConfig& config,
                                      std::uint64_t seed) {
  InstanceConfig ic = config.instance;
  ic.seed = seed;
  return generate_instance(ic);
}

struct Rollout {
  std::vector<Sample> samples;
  std::vector<FeatureVector> features;
  std::vector<double> raw_cost_to_go;
  double mean_inconvenience = 0.0;
};

Rollout collect(const PolicyModel& model, const InstanceRealization& inst,
                std::mt19937_64& rng) {
  Rollout r;
  EpisodeResult ep = run_episode(inst, [&](const DecisionState& state) {
    const FeatureVector f = extract_features(state, model.spread);
    Sample s;
    s.observation = model.observe(f);
    const double z = model.policy_net.forward(s.observation);
    if (!std::isfinite(z))
      throw ModelError("policy network produced a non-finite output");
    const AlphaSample a = sample_alpha_from(logistic(z), model.sigma, rng);
    s.raw_alpha = a.raw;
    s.log_prob = a.log_prob;
    s.value = model.value_net.forward(s.observation);
    r.samples.push_back(std::move(s));
    r.features.push_back(f);
    return decide_score_based(state, a.alpha, EligibilityMask::AllPairs);
  });
  std::vector<double> costs;
  costs.reserve(ep.periods.size());
  for (const PeriodTrace& p : ep.periods) costs.push_back(p.realized_cost);
  r.raw_cost_to_go = cost_to_go(costs);
  r.mean_inconvenience = ep.mean_inconvenience();
  return r;
}

template <typename Body>
void parallel_for(int count, Body body) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < count; ++k) {
    try {
      body(k);
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double evaluate_deterministic(const PolicyModel& model,
                              const std::vector<InstanceRealization>& set) {
  std::vector<double> means(set.size(), 0.0);
  parallel_for(static_cast<int>(set.size()), [&](int k) {
    const auto& inst = set[static_cast<std::size_t>(k)];
    EpisodeResult ep = run_episode(inst, [&](const DecisionState& state) {
      return decide_score_based(state, lambda_deterministic(model, state),
                                EligibilityMask::AllPairs);
    });
    means[static_cast<std::size_t>(k)] = ep.mean_inconvenience();
  });
  return std::accumulate(means.begin(), means.end(), 0.0) /
         static_cast<double>(means.size());
}

bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return std::isfinite(v); });
}

}  // namespace

std::uint64_t training_instance_seed(std::uint64_t seed, int iteration,
                                     int episode) {
  const std::uint64_t key =
      mix(mix(seed) ^ (static_cast<std::uint64_t>(iteration + 1) << 20) ^
          static_cast<std::uint64_t>(episode));
  return key | (1ULL << 62);
}

std::uint64_t training_eval_seed(std::uint64_t seed, int episode) {
  return (mix(seed ^ 0xe7a1ULL) + static_cast<std::uint64_t>(episode)) |
         (1ULL << 61);
}

TrainResult train(const TrainConfig& config, const TrainProgress& progress) {
  config.validate();
  TrainResult result;
  {
    auto init = keyed_rng(config.seed, 0, 0, kInitTag);
    result.model = PolicyModel::random(init, config.hidden);
  }
  PolicyModel& model = result.model;
  model.spread = config.spread;
  model.scale_observations = config.observation_scaling;
  model.sigma = config.sigma_initial;

  // Warmup under the static balance: observation statistics and cost scale.
  {
    std::vector<std::vector<FeatureVector>> feats(
        static_cast<std::size_t>(config.warmup_episodes));
    std::vector<std::vector<double>> ctg(feats.size());
    parallel_for(config.warmup_episodes, [&](int e) {
      const auto inst =
          training_instance(config, training_instance_seed(config.seed, -1, e));
      auto& f = feats[static_cast<std::size_t>(e)];
      EpisodeResult ep = run_episode(inst, [&](const DecisionState& s) {
        f.push_back(extract_features(s, config.spread));
        return decide_score_based(s, config.warmup_alpha,
                                  EligibilityMask::AllPairs);
      });
      std::vector<double> costs;
      for (const PeriodTrace& p : ep.periods) costs.push_back(p.realized_cost);
      ctg[static_cast<std::size_t>(e)] = cost_to_go(costs);
    });
    std::vector<double> all_ctg;
    for (std::size_t e = 0; e < feats.size(); ++e) {
      if (config.observation_scaling) model.normalizer.update_batch(feats[e]);
      all_ctg.insert(all_ctg.end(), ctg[e].begin(), ctg[e].end());
    }
    model.cost_scale =
        std::max(1e-9, quantile(std::move(all_ctg), config.cost_scale_quantile));
  }

  std::vector<InstanceRealization> eval_set;
  for (int e = 0; e < config.eval_episodes; ++e)
    eval_set.push_back(
        training_instance(config, training_eval_seed(config.seed, e)));

  Adam policy_opt(model.policy_net.parameter_count(), config.policy_learning_rate);
  Adam value_opt(model.value_net.parameter_count(), config.value_learning_rate);
  Adam sigma_opt(1, config.policy_learning_rate);
  double log_sigma = std::log(config.sigma_initial);
  const double log_sigma_lo = std::log(config.sigma_min);
  const double log_sigma_hi = std::log(1.0);

  double interval_train = 0.0;
  double interval_sigma = 0.0;
  int interval_count = 0;

  for (int k = 0; k < config.iterations; ++k) {
    model.sigma = config.sigma_mode == SigmaMode::Decayed ? config.sigma_at(k)
                                                           : std::exp(log_sigma);

    std::vector<Rollout> rollouts(
        static_cast<std::size_t>(config.episodes_per_iteration));
    parallel_for(config.episodes_per_iteration, [&](int e) {
      const auto inst =
          training_instance(config, training_instance_seed(config.seed, k, e));
      auto rng = keyed_rng(config.seed, static_cast<std::uint64_t>(k),
                           static_cast<std::uint64_t>(e), kRolloutTag);
      rollouts[static_cast<std::size_t>(e)] = collect(model, inst, rng);
    });

    std::vector<Sample> batch;
    double train_mean = 0.0;
    for (Rollout& r : rollouts) {
      for (std::size_t t = 0; t < r.samples.size(); ++t) {
        Sample& s = r.samples[t];
        s.target = config.cost_scaling
                       ? scale_cost(r.raw_cost_to_go[t], model.cost_scale)
                       : r.raw_cost_to_go[t];
        s.advantage = advantage(s.value, s.target);
        batch.push_back(std::move(s));
      }
      train_mean += r.mean_inconvenience;
    }
    train_mean /= static_cast<double>(rollouts.size());

    if (config.standardize_advantages) {
      std::vector<double> adv(batch.size());
      for (std::size_t i = 0; i < batch.size(); ++i) adv[i] = batch[i].advantage;
      standardize_advantages(adv);
      for (std::size_t i = 0; i < batch.size(); ++i) batch[i].advantage = adv[i];
    }

    const NeuralNet policy_backup = model.policy_net;
    const NeuralNet value_backup = model.value_net;
    const Adam policy_opt_backup = policy_opt, value_opt_backup = value_opt,
               sigma_opt_backup = sigma_opt;
    const double log_sigma_backup = log_sigma;
    bool diverged = false;

    auto shuffle_rng = keyed_rng(config.seed, static_cast<std::uint64_t>(k), 0,
                                 kShuffleTag);
    std::vector<std::size_t> order(batch.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<Sample> mb;
    for (int epoch = 0; epoch < config.epochs && !diverged; ++epoch) {
      std::shuffle(order.begin(), order.end(), shuffle_rng);
      for (std::size_t start = 0; start < order.size() && !diverged;
           start += static_cast<std::size_t>(config.minibatch_size)) {
        const std::size_t stop = std::min(
            order.size(), start + static_cast<std::size_t>(config.minibatch_size));
        mb.clear();
        for (std::size_t i = start; i < stop; ++i) mb.push_back(batch[order[i]]);

        const auto pl = policy_loss(model, mb, config.clip_epsilon);
        const auto vl = value_network_loss(model, mb, config.clip_epsilon,
                                           config.value_clipping);
        if (!std::isfinite(pl.loss) || !std::isfinite(vl.loss) ||
            !all_finite(pl.gradient) || !all_finite(vl.gradient) ||
            !std::isfinite(pl.log_sigma_gradient)) {
          diverged = true;
          break;
        }
        policy_opt.step(model.policy_net.parameters(), pl.gradient);
        value_opt.step(model.value_net.parameters(), vl.gradient);
        if (config.sigma_mode == SigmaMode::Learned) {
          double ls[1] = {log_sigma};
          const double g[1] = {pl.log_sigma_gradient};
          sigma_opt.step(ls, g);
          log_sigma = std::clamp(ls[0], log_sigma_lo, log_sigma_hi);
          model.sigma = std::exp(log_sigma);
        }
        if (!model.policy_net.finite() || !model.value_net.finite())
          diverged = true;
      }
    }
    if (diverged) {
      std::clog << "warning: iteration " << k
                << " produced non-finite losses or parameters; restored the "
                   "previous parameters\n";
      model.policy_net = policy_backup;
      model.value_net = value_backup;
      policy_opt = policy_opt_backup;
      value_opt = value_opt_backup;
      sigma_opt = sigma_opt_backup;
      log_sigma = log_sigma_backup;
      ++result.guarded_iterations;
    }

    if (config.observation_scaling) {
      for (const Rollout& r : rollouts) model.normalizer.update_batch(r.features);
    }

    interval_train += train_mean;
    interval_sigma += model.sigma;
    ++interval_count;
    const bool last = k + 1 == config.iterations;
    if ((k + 1) % config.eval_interval == 0 || last) {
      CurvePoint point;
      point.iteration = k + 1;
      point.train_inconvenience = interval_train / interval_count;
      point.sigma = interval_sigma / interval_count;
      point.eval_inconvenience = evaluate_deterministic(model, eval_set);
      result.curve.push_back(point);
      if (progress) progress(point);
      interval_train = interval_sigma = 0.0;
      interval_count = 0;
    }
  }
  model.sigma = config.sigma_mode == SigmaMode::Decayed
                    ? config.sigma_at(config.iterations)
                    : std::exp(log_sigma);
  return result;
}

void write_learning_curve(const std::vector<CurvePoint>& curve,
                          const std::filesystem::path& path) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "iteration,train_inconvenience,eval_inconvenience,sigma\n";
  for (const CurvePoint& p : curve)
    out << p.iteration << ',' << p.train_inconvenience << ','
        << p.eval_inconvenience << ',' << p.sigma << '\n';
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  detail::write_text_file(path, out.str());
}

}  // namespace techroute
