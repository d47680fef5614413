#include <doctest.h>

#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <random>

#include "gradient_check.hpp"
#include "helpers.hpp"
#include "techroute/errors.hpp"
#include "techroute/features.hpp"
#include "techroute/policies.hpp"
#include "techroute/policy_model.hpp"
#include "techroute/ppo.hpp"
#include "techroute/trainer.hpp"

using namespace techroute;

TEST_CASE("features on constructed states") {
  DecisionState s;
  s.period = 4;
  s.available = {{0, Skill::Regular}, {1, Skill::Expert}, {2, Skill::Expert}};
  FeatureVector f = extract_features(s);
  CHECK(f[static_cast<std::size_t>(Feature::AvailableRegular)] == 1);
  CHECK(f[static_cast<std::size_t>(Feature::AvailableExpert)] == 2);
  CHECK(f[static_cast<std::size_t>(Feature::CountEasy)] == 0);
  CHECK(f[static_cast<std::size_t>(Feature::DepotDistanceEasy)] == 0);
  CHECK(f[static_cast<std::size_t>(Feature::MeanPeriodsOverdue)] == 0);

  s.customers = {test::customer(1, 100, 100, Task::Easy, 6)};
  f = extract_features(s);
  CHECK(f[static_cast<std::size_t>(Feature::DepotDistanceEasy)] == 0);
  CHECK(f[static_cast<std::size_t>(Feature::NonUrgentEasy)] == 1);
  CHECK(f[static_cast<std::size_t>(Feature::OverdueEasy)] == 0);
  CHECK(f[static_cast<std::size_t>(Feature::OverdueAdvanced)] == 0);

  s.customers = {test::customer(1, 50, 100), test::customer(2, 150, 100)};
  f = extract_features(s);
  CHECK(f[static_cast<std::size_t>(Feature::PairwiseDistanceEasy)] == doctest::Approx(100));
}

TEST_CASE("network backprop matches central differences") {
  std::mt19937_64 rng(1);
  NeuralNet net({kFeatureCount, 64, 64, 1});
  net.initialize(rng, 1.0);
  CHECK(test::network_gradient_error(net, 10, 10, rng) <= 1e-4);
  NeuralNet tiny({3, 5, 1});
  tiny.initialize(rng, 1.0);
  CHECK(test::network_gradient_error(tiny, 10, 10, rng) <= 1e-4);
}

TEST_CASE("loss gradients match central differences") {
  std::mt19937_64 rng(2);
  const auto e = test::loss_gradient_errors(5, 10, rng);
  CHECK(e.policy <= 1e-4);
  CHECK(e.log_sigma <= 1e-4);
  CHECK(e.value <= 1e-4);
  CHECK(e.clipped_value <= 1e-4);
}

TEST_CASE("adam descends a quadratic") {
  std::vector<double> x{3.0, -2.0};
  Adam opt(2, 0.05);
  for (int k = 0; k < 2000; ++k) {
    const std::vector<double> g{2 * x[0], 2 * x[1]};
    opt.step(x, g);
  }
  CHECK(std::abs(x[0]) < 1e-2);
  CHECK(std::abs(x[1]) < 1e-2);
}

TEST_CASE("normalizer batch merges match two-pass moments") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z(5.0, 3.0);
  std::vector<FeatureVector> all(777);
  for (auto& v : all)
    for (double& x : v) x = z(rng);
  Normalizer batched, streamed;
  std::size_t pos = 0;
  for (std::size_t chunk : {1u, 50u, 300u, 426u}) {
    batched.update_batch(std::span<const FeatureVector>(all.data() + pos, chunk));
    pos += chunk;
  }
  for (const auto& v : all) streamed.update(v);
  for (std::size_t k = 0; k < kFeatureCount; ++k) {
    double mean = 0;
    for (const auto& v : all) mean += v[k];
    mean /= static_cast<double>(all.size());
    double var = 0;
    for (const auto& v : all) var += (v[k] - mean) * (v[k] - mean);
    var /= static_cast<double>(all.size());
    CHECK(batched.mean()[k] == doctest::Approx(mean).epsilon(1e-12));
    CHECK(batched.variance()[k] == doctest::Approx(var).epsilon(1e-10));
    CHECK(streamed.variance()[k] == doctest::Approx(var).epsilon(1e-10));
  }
  Normalizer fresh;
  std::vector<double> big(kFeatureCount, 40.0);
  CHECK(fresh.normalize(big)[0] == 5.0);
}

TEST_CASE("untrained model is constant and deterministic") {
  const PolicyModel zero = PolicyModel::zeros({8});
  std::mt19937_64 rng(4);
  for (int k = 0; k < 20; ++k) {
    const DecisionState s = test::random_state(rng, 10, 4);
    CHECK(lambda_deterministic(zero, s) == 0.5);
  }
  const PolicyModel model = PolicyModel::random(rng, {8});
  const DecisionState s = test::random_state(rng, 10, 4);
  CHECK(lambda_deterministic(model, s) == lambda_deterministic(model, s));
}

TEST_CASE("alpha sampling") {
  std::mt19937_64 rng(5);
  CHECK(sample_alpha_from(0.37, 1e-12, rng).alpha == doctest::Approx(0.37));
  double sum = 0;
  const int draws = 100000;
  for (int k = 0; k < draws; ++k) sum += sample_alpha_from(0.5, 0.2, rng).raw;
  CHECK(std::abs(sum / draws - 0.5) < 0.01);
  for (int k = 0; k < 1000; ++k) {
    const AlphaSample a = sample_alpha_from(1.2, 0.2, rng);
    CHECK(a.alpha <= 1.0);
    CHECK(a.log_prob == doctest::Approx(gaussian_log_density(a.raw, 1.2, 0.2)));
  }
}

TEST_CASE("advantage, surrogate and value loss examples") {
  CHECK(advantage(2.0, 1.5) == 0.5);
  CHECK(advantage(1.5, 1.5) == 0.0);
  std::vector<double> a{1, 2, 3, 10};
  standardize_advantages(a);
  CHECK(std::abs(std::accumulate(a.begin(), a.end(), 0.0) / 4) < 1e-12);

  CHECK(ppo_objective(1.5, 1.0, 0.2) == doctest::Approx(1.2));
  CHECK(ppo_objective(0.5, -1.0, 0.2) == doctest::Approx(-0.8));
  CHECK(ppo_objective(1.1, 2.0, 0.2) == 1.1 * 2.0);

  CHECK(value_loss(1.0, 0.3, 1.0, 0.2, false) == 0.0);
  CHECK(value_loss(0.7, 0.7, 1.5, 0.2, true) == doctest::Approx(0.64));
  CHECK(value_loss(1.4, 1.0, 1.0, 0.2, true) == doctest::Approx(0.04));

  CHECK(scale_cost(0, 10) == 0);
  CHECK(scale_cost(10, 10) == 1);
  CHECK(scale_cost(20, 10) == 1);
  CHECK_THROWS_AS(scale_cost(1, 0), DomainError);
  const std::vector<double> costs{1, 2, 3};
  CHECK(cost_to_go(costs) == std::vector<double>{6, 5, 3});
}

TEST_CASE("augmentation configurations") {
  const TrainConfig def;
  CHECK(def.cost_scaling);
  CHECK(def.observation_scaling);
  CHECK_FALSE(def.value_clipping);
  CHECK(def.sigma_mode == SigmaMode::Decayed);
  CHECK(augmentation_preset(4).value_clipping == def.value_clipping);
  CHECK_FALSE(augmentation_preset(2).cost_scaling);
  CHECK_FALSE(augmentation_preset(3).observation_scaling);
  CHECK(augmentation_preset(1).value_clipping);
  CHECK(augmentation_preset(5).sigma_mode == SigmaMode::Learned);
  CHECK_THROWS_AS(augmentation_preset(6), ConfigError);
  CHECK(def.sigma_at(0) == doctest::Approx(0.2));
  CHECK(def.sigma_at(100000) == doctest::Approx(0.02));
  const TrainConfig back = train_config_from_json(train_config_to_json(augmentation_preset(2)));
  CHECK_FALSE(back.cost_scaling);
}

TEST_CASE("model files round-trip and reject mismatched shapes") {
  const auto dir = test::scratch("models");
  std::mt19937_64 rng(6);
  PolicyModel model = PolicyModel::random(rng, {16, 8});
  std::vector<FeatureVector> obs;
  for (int k = 0; k < 50; ++k) obs.push_back(extract_features(test::random_state(rng, 10, 4)));
  model.normalizer.update_batch(obs);
  save_model(model, dir / "m.json");
  const PolicyModel back = load_model(dir / "m.json");
  for (int k = 0; k < 100; ++k) {
    const DecisionState s = test::random_state(rng, 10, 4);
    REQUIRE(lambda_deterministic(back, s) == lambda_deterministic(model, s));
  }

  const std::string text = [&] {
    std::ifstream in(dir / "m.json");
    return std::string(std::istreambuf_iterator<char>(in), {});
  }();
  std::string bad_count = text;
  bad_count.replace(bad_count.find("\"feature_count\": 14"), 19, "\"feature_count\": 12");
  std::ofstream(dir / "features.json") << bad_count;
  CHECK_THROWS_AS(load_model(dir / "features.json"), ShapeError);

  std::string bad_weights = text;
  const auto w = bad_weights.find("\"weights\": [") + 12;
  bad_weights.erase(w, bad_weights.find(',', w) - w + 1);
  std::ofstream(dir / "weights.json") << bad_weights;
  CHECK_THROWS_AS(load_model(dir / "weights.json"), ShapeError);
}

TEST_CASE("short training runs are reproducible and finite") {
  TrainConfig c;
  c.iterations = 3;
  c.episodes_per_iteration = 2;
  c.warmup_episodes = 2;
  c.eval_interval = 1;
  c.eval_episodes = 1;
  c.hidden = {8, 8};
  c.instance.weekly_demand_mean = 60;
  const TrainResult a = train(c);
  const TrainResult b = train(c);
  CHECK(a.curve == b.curve);
  CHECK(a.model.policy_net == b.model.policy_net);
  CHECK(a.model.policy_net.finite());
  CHECK(a.curve.size() == 3);
  CHECK(a.model.cost_scale > 0);
}
