#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "techroute/domain.hpp"

namespace techroute {

/// A tiny decision problem with a scripted future: arrivals[k] and
/// available[k] are revealed in period state.period + k + 1. Only rework
/// outcomes are random.
struct OracleScenario {
  DecisionState state;
  std::vector<std::vector<Customer>> arrivals;
  std::vector<std::vector<Technician>> available;
  int horizon = 1;  // decision periods, the current one included
};

struct OracleLimits {
  std::size_t max_customers = 5;
  std::size_t max_technicians = 2;
  int max_horizon = 3;
};

/// Exact minimal expected cost by backward induction over every assignment
/// of customers to technicians (routes checked over all permutations) and
/// every rework outcome. Customers still open after the last decision pay
/// one more period of inconvenience. Throws OracleLimitError when a state
/// exceeds the limits.
double brute_force_value(const OracleScenario& scenario,
                         const OracleLimits& limits = {});

/// Same expectation with the first decision fixed. Throws FeasibilityError if
/// the decision is infeasible.
double brute_force_q_value(const OracleScenario& scenario,
                           const Decision& first,
                           const OracleLimits& limits = {});

/// E[C(S, x)] by enumerating all 2^r rework outcomes and weighting realized
/// costs. Throws OracleLimitError above `max_risky` risky assignments.
double exhaustive_expected_cost(const DecisionState& state,
                                const Decision& decision,
                                std::size_t max_risky = 20);

/// Random scenario within the default limits. Up to four customers are open
/// now and at most one more arrives in each later period.
OracleScenario random_tiny_scenario(std::mt19937_64& rng);

struct OracleCheck {
  int trials = 0;
  int violations = 0;
  double worst_gap = 0.0;  // largest amount by which the property was broken
};

/// Delaying one customer's deadline by a period never raises V.
OracleCheck check_deadline_monotonicity(int trials, std::uint64_t seed);

/// Two co-located customers with the same task, room for only one of them:
/// serving the earlier deadline is never worse than serving the later one.
OracleCheck check_earlier_deadline_preference(int trials, std::uint64_t seed);

}  // namespace techroute
