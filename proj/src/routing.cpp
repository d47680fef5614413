#include "techroute/routing.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "techroute/errors.hpp"

namespace techroute {

double leg_minutes(const TravelParams& params, Point from, Point to,
                   bool to_customer) {
  const double drive = distance_km(from, to) / params.speed_kmh * 60.0;
  return to_customer ? drive + params.service_minutes : drive;
}

TravelModel::TravelModel(TravelParams params,
                         std::span<const Customer> customers)
    : params_(params) {
  locations_.reserve(customers.size() + 1);
  locations_.emplace(0, params_.depot);
  for (const Customer& c : customers) locations_.emplace(c.id, c.location);
}

TravelModel::TravelModel(const DecisionState& state)
    : TravelModel(state.travel, state.customers) {}

bool TravelModel::knows(int node) const { return locations_.contains(node); }

Point TravelModel::location(int node) const {
  auto it = locations_.find(node);
  if (it == locations_.end())
    throw LookupError("unknown node " + std::to_string(node));
  return it->second;
}

double TravelModel::travel_time(int from, int to) const {
  return leg_minutes(params_, location(from), location(to), to != 0);
}

double route_duration(std::span<const int> route, const TravelModel& model) {
  std::set<int> seen;
  for (int id : route) {
    if (!seen.insert(id).second)
      throw StructuralError("customer " + std::to_string(id) +
                            " appears twice in a route");
  }
  if (route.empty()) return 0.0;
  double total = model.travel_time(0, route.front());
  for (std::size_t k = 1; k < route.size(); ++k)
    total += model.travel_time(route[k - 1], route[k]);
  total += model.travel_time(route.back(), 0);
  return total;
}

std::string_view to_string(Constraint constraint) {
  switch (constraint) {
    case Constraint::RepeatedCustomer: return "repeated-customer";
    case Constraint::WorkLimit: return "work-limit";
    case Constraint::UnavailableTechnician: return "unavailable-technician";
    case Constraint::UnknownCustomer: return "unknown-customer";
  }
  return "unknown";
}

std::map<int, RouteEvaluation> validate_decision(const DecisionState& state,
                                                 const Decision& decision) {
  std::map<int, RouteEvaluation> out;
  const TravelModel model(state);
  std::set<int> routed;
  for (const auto& [tech_id, route] : decision.routes) {
    RouteEvaluation eval;
    auto fail = [&eval](Constraint c) {
      if (eval.feasible) {
        eval.feasible = false;
        eval.violated = c;
      }
    };
    if (!route.empty() && state.find_technician(tech_id) == nullptr)
      fail(Constraint::UnavailableTechnician);
    bool structural_ok = true;
    for (int id : route) {
      if (!model.knows(id) || id == 0) {
        fail(Constraint::UnknownCustomer);
        structural_ok = false;
      } else if (!routed.insert(id).second) {
        fail(Constraint::RepeatedCustomer);
        structural_ok = false;
      }
    }
    if (structural_ok) {
      eval.duration_minutes = route_duration(route, model);
      if (eval.duration_minutes >
          state.travel.work_limit_minutes + kDurationTolerance)
        fail(Constraint::WorkLimit);
    }
    out.emplace(tech_id, eval);
  }
  return out;
}

std::optional<Constraint> first_violation(const DecisionState& state,
                                          const Decision& decision) {
  for (const auto& [tech, eval] : validate_decision(state, decision))
    if (!eval.feasible) return eval.violated;
  return std::nullopt;
}

Insertion cheapest_insertion(const DecisionState& state, const Decision& routes,
                             int technician, int customer) {
  if (routes.technician_of(customer))
    throw StructuralError("customer " + std::to_string(customer) +
                          " is already routed");
  const TravelModel model(state);
  const Point target = model.location(customer);
  Insertion best;
  best.routes = routes;
  std::vector<int>& route = best.routes.routes[technician];

  auto node_point = [&](std::size_t k) {
    // positions 0 and route.size()+1 are the depot
    if (k == 0 || k == route.size() + 1) return state.travel.depot;
    return model.location(route[k - 1]);
  };
  bool found = false;
  for (std::size_t pos = 0; pos <= route.size(); ++pos) {
    const Point a = node_point(pos);
    const Point b = node_point(pos + 1);
    const bool b_customer = pos < route.size();
    const double delta = leg_minutes(state.travel, a, target, true) +
                         leg_minutes(state.travel, target, b, b_customer) -
                         leg_minutes(state.travel, a, b, b_customer);
    if (!found || delta < best.delta_minutes - kDurationTolerance) {
      found = true;
      best.delta_minutes = delta;
      best.position = pos;
    }
  }
  route.insert(route.begin() + static_cast<std::ptrdiff_t>(best.position),
               customer);
  return best;
}

RouteGeometry::RouteGeometry(const DecisionState& state)
    : n_(state.customers.size() + 1), legs_(n_ * n_, 0.0) {
  std::vector<Point> points;
  points.reserve(n_);
  points.push_back(state.travel.depot);
  for (const Customer& c : state.customers) points.push_back(c.location);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (i != j) legs_[i * n_ + j] = leg_minutes(state.travel, points[i],
                                                  points[j], j != 0);
}

RouteGeometry::Slot RouteGeometry::best_insertion(
    std::span<const std::size_t> route, std::size_t node) const {
  Slot best;
  std::size_t prev = 0;
  for (std::size_t pos = 0; pos <= route.size(); ++pos) {
    const std::size_t next = pos < route.size() ? route[pos] : 0;
    const double delta = leg(prev, node) + leg(node, next) - leg(prev, next);
    if (pos == 0 || delta < best.delta - kDurationTolerance) {
      best.delta = delta;
      best.position = pos;
    }
    prev = next;
  }
  return best;
}

double RouteGeometry::duration(std::span<const std::size_t> route) const {
  if (route.empty()) return 0.0;
  double total = leg(0, route.front());
  for (std::size_t k = 1; k < route.size(); ++k)
    total += leg(route[k - 1], route[k]);
  return total + leg(route.back(), 0);
}

}  // namespace techroute
