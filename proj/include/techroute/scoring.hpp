#pragma once

namespace techroute {

/// Insertion times enter the score in hours so that both terms live on
/// comparable scales; pass 1.0 to score raw minutes.
inline constexpr double kScoreTimeUnitMinutes = 60.0;

struct ScoreContext {
  double alpha = 0.33;  // clamped into [0, 1] on construction via make()
  double eta = 1.1;
  double rework_prob = 0.5;
  double time_unit_minutes = kScoreTimeUnitMinutes;

  static ScoreContext make(double alpha, double eta, double rework_prob,
                           double time_unit_minutes = kScoreTimeUnitMinutes);
};

/// Expected inconvenience saved by the assignment, (1 - rho) eta^(t - d + 1).
/// Unlike the cost function it stays positive for deadlines in the future.
double service_urgency(double rho, int deadline, int t, double eta);

/// Expected current plus future insertion time, delta_tau / (1 - rho).
/// Throws DomainError for rho >= 1 or negative delta.
double routing_efficiency(double delta_tau, double rho);

/// (1 - alpha) * urgency - alpha * efficiency, with delta_tau given in
/// minutes and converted to the context's time unit. Higher is better.
double score(const ScoreContext& ctx, double rho, int deadline, int t,
             double delta_tau);

}  // namespace techroute
