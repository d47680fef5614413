#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "techroute/domain.hpp"
#include "techroute/instances.hpp"
#include "techroute/policies.hpp"

namespace techroute {

struct Visit {
  int period = 0;
  int customer = 0;
  int technician = 0;
  Skill skill = Skill::Regular;
  bool risky = false;
  bool failed = false;
  friend bool operator==(const Visit&, const Visit&) = default;
};

struct CustomerRecord {
  int id = 0;
  Task task = Task::Easy;
  Point location;
  int arrival = 0;
  int deadline = 0;
  int completion = 0;  // 0 while open
  int visits = 0;
  double inconvenience = 0.0;
  friend bool operator==(const CustomerRecord&, const CustomerRecord&) = default;
};

struct PeriodTrace {
  int period = 0;
  int open_customers = 0;
  double realized_cost = 0.0;
  int technicians_available = 0;
  std::vector<double> minutes_worked;  // indexed by roster technician id
  std::optional<double> alpha;         // balance policies only
  friend bool operator==(const PeriodTrace&, const PeriodTrace&) = default;
};

struct EpisodeResult {
  std::vector<CustomerRecord> customers;  // by id
  std::vector<PeriodTrace> periods;
  std::vector<Visit> visits;
  std::vector<Decision> decisions;  // only when EpisodeOptions::keep_decisions
  int final_period = 0;             // first post-arrival period with no customers
  bool divergent = false;

  double total_inconvenience() const;
  /// Total inconvenience over the number of customers (0 without customers).
  double mean_inconvenience() const;
  friend bool operator==(const EpisodeResult&, const EpisodeResult&) = default;
};

inline constexpr int kSafetyCapPeriods = 400;

struct EpisodeOptions {
  bool keep_decisions = false;
  int safety_cap = kSafetyCapPeriods;
};

/// S_1: first arrivals and first availability row.
DecisionState initial_state(const InstanceRealization& realization);

struct StepOutcome {
  double realized_cost = 0.0;
  DecisionState next;
  PostDecisionState post;
  StochasticInfo info;
  std::vector<Visit> visits;
  std::vector<double> minutes_worked;  // by roster id
};

/// Transition: resolves risky visits with the customers' rework coins,
/// realizes the cost and forms S_{t+1}. Throws FeasibilityError for
/// infeasible decisions; the simulator never repairs them.
StepOutcome step(const DecisionState& state, const Decision& decision,
                 const InstanceRealization& realization);

/// True when the process is over: nothing open and no arrivals to come.
bool terminated(const DecisionState& state,
                const InstanceRealization& realization);

using DecisionRule = std::function<Decision(const DecisionState&)>;

/// Runs decision -> transition until termination or the safety cap.
EpisodeResult run_episode(const InstanceRealization& realization,
                          const DecisionRule& rule,
                          const EpisodeOptions& options = {});
EpisodeResult run_episode(const InstanceRealization& realization,
                          const Policy& policy,
                          const EpisodeOptions& options = {});

/// Inconvenience a customer accumulates when completed in `completion`,
/// computed in closed form from its deadline.
double closed_form_inconvenience(int deadline, int completion, double eta);

}  // namespace techroute
