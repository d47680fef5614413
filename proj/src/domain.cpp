#include "techroute/domain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "techroute/errors.hpp"
#include "techroute/routing.hpp"

namespace techroute {

std::string_view to_string(Task task) {
  return task == Task::Easy ? "easy" : "advanced";
}

std::string_view to_string(Skill skill) {
  return skill == Skill::Regular ? "regular" : "expert";
}

double distance_km(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

const Customer* DecisionState::find_customer(int id) const {
  auto it = std::lower_bound(
      customers.begin(), customers.end(), id,
      [](const Customer& c, int key) { return c.id < key; });
  if (it != customers.end() && it->id == id) return &*it;
  // Fall back to a scan for hand-built states that are not sorted.
  auto lin = std::find_if(customers.begin(), customers.end(),
                          [id](const Customer& c) { return c.id == id; });
  return lin == customers.end() ? nullptr : &*lin;
}

const Technician* DecisionState::find_technician(int id) const {
  auto it = std::find_if(available.begin(), available.end(),
                         [id](const Technician& t) { return t.id == id; });
  return it == available.end() ? nullptr : &*it;
}

double risk(Skill skill, Task task, double rework_prob) {
  return (task == Task::Advanced && skill == Skill::Regular) ? rework_prob : 0.0;
}

double risk(const DecisionState& state, const Technician& tech,
            const Customer& customer) {
  return risk(tech.skill, customer.task, state.rework_prob);
}

std::size_t Decision::routed_count() const {
  std::size_t n = 0;
  for (const auto& [tech, route] : routes) n += route.size();
  return n;
}

std::optional<int> Decision::technician_of(int customer_id) const {
  for (const auto& [tech, route] : routes) {
    if (std::find(route.begin(), route.end(), customer_id) != route.end())
      return tech;
  }
  return std::nullopt;
}

double inconvenience_increase(int deadline, int t, double eta) {
  if (!(eta > 1.0))
    throw ConfigError("penalty base eta must exceed 1, got " +
                      std::to_string(eta));
  if (deadline > t) return 0.0;
  return std::pow(eta, static_cast<double>(t - deadline + 1));
}

PostDecisionState post_decision(const DecisionState& state,
                                const Decision& decision) {
  PostDecisionState post;
  post.period = state.period;
  for (const Customer& c : state.customers) {
    auto tech_id = decision.technician_of(c.id);
    if (!tech_id) {
      post.unassigned.push_back(c);
      continue;
    }
    const Technician* tech = state.find_technician(*tech_id);
    if (tech && risk(state, *tech, c) > 0.0)
      post.risky_assigned.push_back(c);
    else
      post.safe_assigned.push_back(c.id);
  }
  return post;
}

double expected_immediate_cost(const DecisionState& state,
                               const Decision& decision) {
  if (auto violated = first_violation(state, decision)) {
    throw FeasibilityError(std::string(to_string(*violated)),
                           "infeasible decision: " +
                               std::string(to_string(*violated)));
  }
  const PostDecisionState post = post_decision(state, decision);
  double unassigned = 0.0;
  for (const Customer& c : post.unassigned)
    unassigned += inconvenience_increase(c.deadline, state.period,
                                         state.penalty_base);
  double risky = 0.0;
  for (const Customer& c : post.risky_assigned)
    risky += inconvenience_increase(c.deadline, state.period,
                                    state.penalty_base);
  return unassigned + state.rework_prob * risky;
}

double realized_cost(const PostDecisionState& post, const StochasticInfo& info,
                     double eta) {
  double total = 0.0;
  for (const Customer& c : post.unassigned)
    total += inconvenience_increase(c.deadline, post.period, eta);
  for (int id : info.failed_risky) {
    auto it = std::find_if(post.risky_assigned.begin(),
                           post.risky_assigned.end(),
                           [id](const Customer& c) { return c.id == id; });
    if (it == post.risky_assigned.end())
      throw ProtocolError("failed customer " + std::to_string(id) +
                          " was not a risky assignment");
    total += inconvenience_increase(it->deadline, post.period, eta);
  }
  return total;
}

}  // namespace techroute
