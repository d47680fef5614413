#pragma once

#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "techroute/domain.hpp"

namespace techroute {

/// Travel time of one arc in minutes: Euclidean distance at constant speed,
/// plus the service time when the head of the arc is a customer.
double leg_minutes(const TravelParams& params, Point from, Point to,
                   bool to_customer);

/// tau over node ids: 0 is the depot, customers use their ids.
class TravelModel {
 public:
  TravelModel(TravelParams params, std::span<const Customer> customers);
  explicit TravelModel(const DecisionState& state);

  /// Throws LookupError for unknown ids. i == j is not a valid query.
  double travel_time(int from, int to) const;
  Point location(int node) const;
  bool knows(int node) const;
  const TravelParams& params() const { return params_; }

 private:
  TravelParams params_;
  std::unordered_map<int, Point> locations_;
};

/// Duration of depot -> route... -> depot. Throws StructuralError on repeated
/// customers.
double route_duration(std::span<const int> route, const TravelModel& model);

enum class Constraint {
  RepeatedCustomer,       // visited at most once
  WorkLimit,              // working capacity
  UnavailableTechnician,  // route for a technician outside W_t
  UnknownCustomer,        // routed customer not in K_t
};

std::string_view to_string(Constraint constraint);

struct RouteEvaluation {
  double duration_minutes = 0.0;
  bool feasible = true;
  std::optional<Constraint> violated;
};

/// Per-technician check of the decision-space constraints. Depot start/end,
/// flow conservation and subtour elimination hold by construction of the
/// sequence encoding. Never throws on infeasible input.
std::map<int, RouteEvaluation> validate_decision(const DecisionState& state,
                                                 const Decision& decision);

/// First violated constraint across all routes, if any.
std::optional<Constraint> first_violation(const DecisionState& state,
                                          const Decision& decision);

// Slack for floating-point route durations compared against the work limit.
inline constexpr double kDurationTolerance = 1e-9;

struct Insertion {
  Decision routes;
  double delta_minutes = 0.0;
  std::size_t position = 0;  // index in w's route where the customer lands
};

/// Cheapest insertion psi: places the customer at the position of w's route
/// with the smallest duration increase (earliest position on ties). Does not
/// check the work limit.
Insertion cheapest_insertion(const DecisionState& state, const Decision& routes,
                             int technician, int customer);

/// Index-based insertion machinery for the policy hot path. Node 0 is the
/// depot, node k >= 1 is state.customers[k - 1].
class RouteGeometry {
 public:
  explicit RouteGeometry(const DecisionState& state);

  std::size_t node_count() const { return n_; }
  double leg(std::size_t from, std::size_t to) const {
    return legs_[from * n_ + to];
  }

  struct Slot {
    double delta = 0.0;
    std::size_t position = 0;
  };

  /// Best slot for node in route (local node indices, depot excluded).
  Slot best_insertion(std::span<const std::size_t> route,
                      std::size_t node) const;
  double duration(std::span<const std::size_t> route) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> legs_;
};

}  // namespace techroute
