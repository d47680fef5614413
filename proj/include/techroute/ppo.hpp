#pragma once

#include <span>
#include <vector>

namespace techroute {

/// A = V_hat - c_bar: positive when the realized cost undercuts the estimate.
double advantage(double v_hat, double cost_to_go);

/// Centers and scales a batch to unit variance (in place). Batches with zero
/// spread are only centered.
void standardize_advantages(std::span<double> advantages);

/// min(r A, clip(r, 1 - eps, 1 + eps) A).
double ppo_objective(double ratio, double advantage, double epsilon);

/// d ppo_objective / d ratio: A where the unclipped branch is selected, else 0.
double ppo_objective_gradient(double ratio, double advantage, double epsilon);

/// Squared error, or the min of the plain and clipped squared errors.
double value_loss(double v_now, double v_old, double target, double epsilon,
                  bool clipped);

/// d value_loss / d v_now.
double value_loss_gradient(double v_now, double v_old, double target,
                           double epsilon, bool clipped);

/// min(raw / cost_scale, 1). Throws DomainError for cost_scale <= 0.
double scale_cost(double raw_cost_to_go, double cost_scale);

/// Undiscounted suffix sums: out[t] = sum_{k >= t} costs[k].
std::vector<double> cost_to_go(std::span<const double> costs);

}  // namespace techroute
