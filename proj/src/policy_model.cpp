#include "techroute/policy_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json_util.hpp"
#include "techroute/errors.hpp"

namespace techroute {

using detail::json;

Normalizer::Normalizer(std::size_t dims, double clip)
    : clip_(clip), mean_(dims, 0.0), m2_(dims, 0.0) {}

void Normalizer::update(std::span<const double> sample) {
  if (sample.size() != mean_.size())
    throw ShapeError("normalizer sample has wrong dimension");
  count_ += 1.0;
  for (std::size_t k = 0; k < mean_.size(); ++k) {
    const double delta = sample[k] - mean_[k];
    mean_[k] += delta / count_;
    m2_[k] += delta * (sample[k] - mean_[k]);
  }
}

void Normalizer::update_batch(std::span<const FeatureVector> samples) {
  if (samples.empty()) return;
  if (mean_.size() != kFeatureCount)
    throw ShapeError("normalizer dimension differs from the feature count");
  // Two-pass moments of the batch, then a parallel-variance merge.
  const double nb = static_cast<double>(samples.size());
  std::vector<double> bmean(kFeatureCount, 0.0), bm2(kFeatureCount, 0.0);
  for (const auto& s : samples)
    for (std::size_t k = 0; k < kFeatureCount; ++k) bmean[k] += s[k];
  for (double& m : bmean) m /= nb;
  for (const auto& s : samples)
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
      const double d = s[k] - bmean[k];
      bm2[k] += d * d;
    }
  const double na = count_;
  const double n = na + nb;
  for (std::size_t k = 0; k < kFeatureCount; ++k) {
    const double delta = bmean[k] - mean_[k];
    mean_[k] += delta * nb / n;
    m2_[k] += bm2[k] + delta * delta * na * nb / n;
  }
  count_ = n;
}

std::vector<double> Normalizer::variance() const {
  std::vector<double> var(m2_.size(), 0.0);
  if (count_ > 0.0)
    for (std::size_t k = 0; k < var.size(); ++k)
      var[k] = std::max(0.0, m2_[k] / count_);
  return var;
}

std::vector<double> Normalizer::normalize(std::span<const double> x) const {
  if (x.size() != mean_.size())
    throw ShapeError("normalizer input has wrong dimension");
  std::vector<double> out(x.size());
  const bool fitted = count_ > 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    double z = x[k];
    if (fitted) {
      const double var = std::max(0.0, m2_[k] / count_);
      z = (x[k] - mean_[k]) / std::sqrt(var + 1e-8);
    }
    out[k] = std::clamp(z, -clip_, clip_);
  }
  return out;
}

Normalizer Normalizer::restore(double count, std::vector<double> mean,
                               std::vector<double> m2, double clip) {
  if (mean.size() != m2.size())
    throw ShapeError("normalizer mean and m2 sizes differ");
  Normalizer n(mean.size(), clip);
  n.count_ = count;
  n.mean_ = std::move(mean);
  n.m2_ = std::move(m2);
  return n;
}

namespace {
std::vector<std::size_t> layer_dims(const std::vector<std::size_t>& hidden) {
  std::vector<std::size_t> dims{kFeatureCount};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(1);
  return dims;
}
}  // namespace

PolicyModel PolicyModel::zeros(const std::vector<std::size_t>& hidden) {
  PolicyModel m;
  m.policy_net = NeuralNet(layer_dims(hidden));
  m.value_net = NeuralNet(layer_dims(hidden));
  return m;
}

PolicyModel PolicyModel::random(std::mt19937_64& rng,
                                const std::vector<std::size_t>& hidden) {
  PolicyModel m = zeros(hidden);
  m.policy_net.initialize(rng, 0.01);
  m.value_net.initialize(rng, 1.0);
  return m;
}

std::vector<double> PolicyModel::observe(const FeatureVector& features) const {
  if (scale_observations) return normalizer.normalize(features);
  return {features.begin(), features.end()};
}

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double PolicyModel::mean_alpha(std::span<const double> observation) const {
  return logistic(policy_net.forward(observation));
}

double PolicyModel::value(std::span<const double> observation) const {
  return value_net.forward(observation);
}

double gaussian_log_density(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return -0.5 * z * z - std::log(sigma) -
         0.5 * std::log(2.0 * std::numbers::pi);
}

double lambda_deterministic(const PolicyModel& model,
                            const DecisionState& state) {
  const auto obs = model.observe(extract_features(state, model.spread));
  const double z = model.policy_net.forward(obs);
  if (!std::isfinite(z))
    throw ModelError("policy network produced a non-finite output");
  return logistic(z);
}

AlphaSample sample_alpha_from(double mu, double sigma, std::mt19937_64& rng) {
  AlphaSample s;
  s.mu = mu;
  if (sigma > 0.0) {
    std::normal_distribution<double> normal(mu, sigma);
    s.raw = normal(rng);
    s.log_prob = gaussian_log_density(s.raw, mu, sigma);
  } else {
    s.raw = mu;
  }
  s.alpha = std::clamp(s.raw, 0.0, 1.0);
  return s;
}

AlphaSample sample_alpha(const PolicyModel& model, const DecisionState& state,
                         std::mt19937_64& rng) {
  const auto obs = model.observe(extract_features(state, model.spread));
  const double z = model.policy_net.forward(obs);
  if (!std::isfinite(z))
    throw ModelError("policy network produced a non-finite output");
  return sample_alpha_from(logistic(z), model.sigma, rng);
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

constexpr int kModelVersion = 1;
constexpr const char* kModelFormat = "techroute-model";

json net_json(const NeuralNet& net) {
  const auto p = net.parameters();
  return json{{"dims", net.dims()},
              {"weights", std::vector<double>(p.begin(), p.end())}};
}

NeuralNet net_from(const json& j, const std::string& path) {
  const auto dims = detail::read_field<std::vector<std::size_t>>(j, "dims", path);
  const auto weights =
      detail::read_field<std::vector<double>>(j, "weights", path);
  if (dims.empty() || dims.front() != kFeatureCount)
    throw ShapeError(path + ": network expects " +
                     std::to_string(dims.empty() ? 0 : dims.front()) +
                     " input features, this build uses " +
                     std::to_string(kFeatureCount));
  NeuralNet net(dims);
  if (weights.size() != net.parameter_count())
    throw ShapeError(path + ": expected " +
                     std::to_string(net.parameter_count()) +
                     " weights for dims, found " +
                     std::to_string(weights.size()));
  std::copy(weights.begin(), weights.end(), net.parameters().begin());
  return net;
}

}  // namespace

void save_model(const PolicyModel& model, const std::filesystem::path& path) {
  json doc;
  doc["format"] = kModelFormat;
  doc["version"] = kModelVersion;
  doc["feature_count"] = kFeatureCount;
  doc["policy_net"] = net_json(model.policy_net);
  doc["value_net"] = net_json(model.value_net);
  doc["normalizer"] = json{{"count", model.normalizer.count()},
                           {"mean", model.normalizer.mean()},
                           {"m2", model.normalizer.m2()},
                           {"clip", model.normalizer.clip()}};
  doc["sigma"] = model.sigma;
  doc["cost_scale"] = model.cost_scale;
  doc["scale_observations"] = model.scale_observations;
  doc["spread"] =
      model.spread == SpreadMode::WithinGroup ? "within-group" : "cross-group";
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  detail::write_text_file(path, doc.dump(1) + "\n");
}

PolicyModel load_model(const std::filesystem::path& path) {
  const json doc = detail::parse_document(detail::read_text_file(path),
                                          path.string());
  const std::string root = "model";
  const auto format = detail::read_field<std::string>(doc, "format", root);
  if (format != kModelFormat)
    throw ParseError("field 'model.format': expected '" +
                     std::string(kModelFormat) + "'");
  const int version = detail::read_field<int>(doc, "version", root);
  if (version != kModelVersion)
    throw VersionError("model format version " + std::to_string(version) +
                       " is not supported (expected " +
                       std::to_string(kModelVersion) + ")");
  const auto features =
      detail::read_field<std::size_t>(doc, "feature_count", root);
  if (features != kFeatureCount)
    throw ShapeError("model trained with " + std::to_string(features) +
                     " features, expected " + std::to_string(kFeatureCount));

  PolicyModel m;
  m.policy_net = net_from(detail::field(doc, "policy_net", root),
                          root + ".policy_net");
  m.value_net = net_from(detail::field(doc, "value_net", root),
                         root + ".value_net");
  const json& nj = detail::field(doc, "normalizer", root);
  const std::string npath = root + ".normalizer";
  auto mean = detail::read_field<std::vector<double>>(nj, "mean", npath);
  auto m2 = detail::read_field<std::vector<double>>(nj, "m2", npath);
  if (mean.size() != kFeatureCount || m2.size() != kFeatureCount)
    throw ShapeError("normalizer has " + std::to_string(mean.size()) +
                     " dims, expected " + std::to_string(kFeatureCount));
  m.normalizer = Normalizer::restore(
      detail::read_field<double>(nj, "count", npath), std::move(mean),
      std::move(m2), detail::read_field<double>(nj, "clip", npath));
  m.sigma = detail::read_field<double>(doc, "sigma", root);
  m.cost_scale = detail::read_field<double>(doc, "cost_scale", root);
  m.scale_observations =
      detail::read_field<bool>(doc, "scale_observations", root);
  const auto spread = detail::read_field<std::string>(doc, "spread", root);
  if (spread == "within-group")
    m.spread = SpreadMode::WithinGroup;
  else if (spread == "cross-group")
    m.spread = SpreadMode::CrossGroup;
  else
    throw ParseError("field 'model.spread': unknown mode '" + spread + "'");
  if (!m.policy_net.finite() || !m.value_net.finite())
    throw ModelError("model file contains non-finite weights");
  return m;
}

}  // namespace techroute
