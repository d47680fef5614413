#include "techroute/ppo.hpp"

#include <algorithm>
#include <cmath>

#include "techroute/errors.hpp"

namespace techroute {

double advantage(double v_hat, double cost_to_go) { return v_hat - cost_to_go; }

void standardize_advantages(std::span<double> advantages) {
  if (advantages.empty()) return;
  const double n = static_cast<double>(advantages.size());
  double mean = 0.0;
  for (double a : advantages) mean += a;
  mean /= n;
  double var = 0.0;
  for (double a : advantages) var += (a - mean) * (a - mean);
  var /= n;
  const double sd = std::sqrt(var);
  for (double& a : advantages) {
    a -= mean;
    if (sd > 1e-12) a /= sd;
  }
}

double ppo_objective(double ratio, double advantage, double epsilon) {
  const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
  return std::min(ratio * advantage, clipped * advantage);
}

double ppo_objective_gradient(double ratio, double advantage, double epsilon) {
  const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
  return ratio * advantage <= clipped * advantage ? advantage : 0.0;
}

double value_loss(double v_now, double v_old, double target, double epsilon,
                  bool clipped) {
  const double plain = (v_now - target) * (v_now - target);
  if (!clipped) return plain;
  const double vc = std::clamp(v_now, v_old - epsilon, v_old + epsilon);
  return std::min(plain, (vc - target) * (vc - target));
}

double value_loss_gradient(double v_now, double v_old, double target,
                           double epsilon, bool clipped) {
  const double plain = (v_now - target) * (v_now - target);
  if (!clipped) return 2.0 * (v_now - target);
  const double lo = v_old - epsilon, hi = v_old + epsilon;
  const double vc = std::clamp(v_now, lo, hi);
  const double clip_loss = (vc - target) * (vc - target);
  if (plain <= clip_loss) return 2.0 * (v_now - target);
  // Clipped branch: flat in v_now outside the trust band.
  return (v_now > lo && v_now < hi) ? 2.0 * (vc - target) : 0.0;
}

double scale_cost(double raw_cost_to_go, double cost_scale) {
  if (!(cost_scale > 0.0)) throw DomainError("cost scale must be positive");
  return std::min(raw_cost_to_go / cost_scale, 1.0);
}

std::vector<double> cost_to_go(std::span<const double> costs) {
  std::vector<double> out(costs.size(), 0.0);
  double running = 0.0;
  for (std::size_t k = costs.size(); k-- > 0;) {
    running += costs[k];
    out[k] = running;
  }
  return out;
}

}  // namespace techroute
