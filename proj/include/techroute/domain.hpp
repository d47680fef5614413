#pragma once

#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace techroute {

enum class Task { Easy, Advanced };
enum class Skill { Regular, Expert };

std::string_view to_string(Task task);
std::string_view to_string(Skill skill);

/// b_w: 1 for experts, 0 for regular technicians.
constexpr int expertise(Skill skill) { return skill == Skill::Expert ? 1 : 0; }

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

double distance_km(Point a, Point b);

struct Customer {
  int id = 0;
  Point location;
  Task task = Task::Easy;
  int arrival_period = 1;
  int deadline = 3;
  // Completed-or-failed visits so far. Every visit before the final one was a
  // failed risky visit, so this doubles as the index of the next rework coin.
  int visits_so_far = 0;

  friend bool operator==(const Customer&, const Customer&) = default;
};

struct Technician {
  int id = 0;
  Skill skill = Skill::Regular;
  friend bool operator==(const Technician&, const Technician&) = default;
};

/// Static travel geometry shared by all periods. Node 0 is the depot.
struct TravelParams {
  Point depot{100.0, 100.0};
  double speed_kmh = 60.0;
  double service_minutes = 30.0;
  double work_limit_minutes = 420.0;
};

/// Pre-decision state S_t. The risk matrix is derived from (task, skill).
struct DecisionState {
  int period = 1;
  std::vector<Technician> available;
  std::vector<Customer> customers;  // sorted by id
  double rework_prob = 0.5;
  int cutoff_period = 16;
  double penalty_base = 1.1;
  TravelParams travel;

  const Customer* find_customer(int id) const;
  const Technician* find_technician(int id) const;
};

/// rho_wi: p for an Advanced task served by a Regular technician, else 0.
double risk(Skill skill, Task task, double rework_prob);
double risk(const DecisionState& state, const Technician& tech,
            const Customer& customer);

/// Per-technician ordered customer routes; each implicitly starts and ends at
/// the depot. Technicians without an entry (or with an empty entry) stay home.
struct Decision {
  std::map<int, std::vector<int>> routes;

  std::size_t routed_count() const;
  std::optional<int> technician_of(int customer_id) const;
  friend bool operator==(const Decision&, const Decision&) = default;
};

/// S^x_t: the three sets partition K_t.
struct PostDecisionState {
  int period = 1;
  std::vector<Customer> unassigned;
  std::vector<Customer> risky_assigned;
  std::vector<int> safe_assigned;
};

/// omega_{t+1}.
struct StochasticInfo {
  std::vector<Technician> available_next;
  std::vector<Customer> new_customers;
  std::vector<int> failed_risky;
};

/// Cost-side inconvenience f_i(t) = eta^(t - deadline + 1) once the deadline
/// is due, zero before. Throws ConfigError for eta <= 1.
double inconvenience_increase(int deadline, int t, double eta);

/// Splits K_t according to the decision. Does not check feasibility.
PostDecisionState post_decision(const DecisionState& state,
                                const Decision& decision);

/// E[C(S_t, x_t)]. Throws FeasibilityError for infeasible decisions.
double expected_immediate_cost(const DecisionState& state,
                               const Decision& decision);

/// c(S_t, x_t, omega): inconvenience over unassigned and failed risky
/// customers. Throws ProtocolError if a failed id is not a risky assignment.
double realized_cost(const PostDecisionState& post, const StochasticInfo& info,
                     double eta);

}  // namespace techroute
