#include "techroute/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "techroute/errors.hpp"

namespace techroute {

namespace {
constexpr int kMaxExponent = 64;
}

ScoreContext ScoreContext::make(double alpha, double eta, double rework_prob,
                                double time_unit_minutes) {
  if (!(time_unit_minutes > 0.0))
    throw DomainError("score time unit must be positive");
  return ScoreContext{std::clamp(alpha, 0.0, 1.0), eta, rework_prob,
                      time_unit_minutes};
}

double service_urgency(double rho, int deadline, int t, double eta) {
  const int exponent = t - deadline + 1;
  if (std::abs(exponent) > kMaxExponent)
    throw DomainError("urgency exponent " + std::to_string(exponent) +
                      " out of range");
  return (1.0 - rho) * std::pow(eta, static_cast<double>(exponent));
}

double routing_efficiency(double delta_tau, double rho) {
  if (!(rho < 1.0))
    throw DomainError("rework probability must be below 1 for efficiency");
  if (delta_tau < -1e-9)
    throw DomainError("negative insertion time " + std::to_string(delta_tau));
  return std::max(delta_tau, 0.0) / (1.0 - rho);
}

double score(const ScoreContext& ctx, double rho, int deadline, int t,
             double delta_tau) {
  return (1.0 - ctx.alpha) * service_urgency(rho, deadline, t, ctx.eta) -
         ctx.alpha *
             routing_efficiency(delta_tau / ctx.time_unit_minutes, rho);
}

}  // namespace techroute
