#include "techroute/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <string>

#include "techroute/errors.hpp"
#include "techroute/routing.hpp"

namespace techroute {

namespace {

struct Solver {
  const OracleScenario& scenario;
  const OracleLimits& limits;
  int last_period = 0;
  std::map<std::string, double> memo;

  Solver(const OracleScenario& s, const OracleLimits& l)
      : scenario(s), limits(l), last_period(s.state.period + s.horizon - 1) {}

  static std::string key(const DecisionState& s) {
    std::string k = std::to_string(s.period) + "|";
    for (const Customer& c : s.customers)
      k += std::to_string(c.id) + ":" + std::to_string(c.deadline) + ",";
    k += "|";
    for (const Technician& w : s.available) k += std::to_string(w.id) + ",";
    return k;
  }

  void check(const DecisionState& s) const {
    if (s.customers.size() > limits.max_customers ||
        s.available.size() > limits.max_technicians)
      throw OracleLimitError(
          "oracle state too large: " + std::to_string(s.customers.size()) +
          " customers (max " + std::to_string(limits.max_customers) + "), " +
          std::to_string(s.available.size()) + " technicians (max " +
          std::to_string(limits.max_technicians) + ")");
  }

  double terminal(const std::vector<Customer>& open, int period) const {
    double cost = 0.0;
    for (const Customer& c : open)
      cost += inconvenience_increase(c.deadline, period, scenario.state.penalty_base);
    return cost;
  }

  DecisionState successor(const DecisionState& s, std::vector<Customer> open) const {
    DecisionState next = s;
    next.period = s.period + 1;
    const auto k = static_cast<std::size_t>(s.period - scenario.state.period);
    if (k < scenario.arrivals.size())
      open.insert(open.end(), scenario.arrivals[k].begin(), scenario.arrivals[k].end());
    std::sort(open.begin(), open.end(),
              [](const Customer& a, const Customer& b) { return a.id < b.id; });
    next.customers = std::move(open);
    next.available =
        k < scenario.available.size() ? scenario.available[k] : s.available;
    return next;
  }

  // Expected cost-to-go given the customers of s split into unassigned and
  // risky (by index), resolving every rework outcome.
  double expectation(const DecisionState& s, const std::vector<std::size_t>& unassigned,
                     const std::vector<std::size_t>& risky) {
    const double eta = s.penalty_base;
    const double p = s.rework_prob;
    double base = 0.0;
    for (std::size_t i : unassigned)
      base += inconvenience_increase(s.customers[i].deadline, s.period, eta);
    const std::size_t r = risky.size();
    double total = 0.0;
    for (std::size_t outcome = 0; outcome < (std::size_t{1} << r); ++outcome) {
      double prob = 1.0;
      double cost = base;
      std::vector<Customer> open;
      for (std::size_t i : unassigned) open.push_back(s.customers[i]);
      for (std::size_t b = 0; b < r; ++b) {
        const Customer& c = s.customers[risky[b]];
        if (outcome & (std::size_t{1} << b)) {
          prob *= p;
          cost += inconvenience_increase(c.deadline, s.period, eta);
          Customer again = c;
          again.visits_so_far += 1;
          open.push_back(again);
        } else {
          prob *= 1.0 - p;
        }
      }
      if (prob == 0.0) continue;
      double future;
      if (s.period >= last_period)
        future = terminal(open, s.period + 1);
      else
        future = value(successor(s, std::move(open)));
      total += prob * (cost + future);
    }
    return total;
  }

  // feasible[w][mask]: some ordering of the mask's customers fits the limit.
  std::vector<std::vector<char>> feasibility(const DecisionState& s) const {
    const TravelModel model(s);
    const std::size_t n = s.customers.size();
    std::vector<std::vector<char>> out(s.available.size(),
                                       std::vector<char>(std::size_t{1} << n, 0));
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      std::vector<int> ids;
      for (std::size_t i = 0; i < n; ++i)
        if (mask & (std::size_t{1} << i)) ids.push_back(s.customers[i].id);
      std::sort(ids.begin(), ids.end());
      bool ok = false;
      do {
        if (route_duration(ids, model) <= s.travel.work_limit_minutes + kDurationTolerance) {
          ok = true;
          break;
        }
      } while (std::next_permutation(ids.begin(), ids.end()));
      for (auto& row : out) row[mask] = ok;
    }
    return out;
  }

  double value(const DecisionState& s) {
    check(s);
    const std::string k = key(s);
    if (auto it = memo.find(k); it != memo.end()) return it->second;

    const std::size_t n = s.customers.size();
    const std::size_t m = s.available.size();
    const auto feasible = feasibility(s);
    std::size_t combos = 1;
    for (std::size_t i = 0; i < n; ++i) combos *= m + 1;

    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> assign(n);
    for (std::size_t code = 0; code < combos; ++code) {
      std::size_t c = code;
      std::vector<std::size_t> masks(m, 0);
      for (std::size_t i = 0; i < n; ++i) {
        assign[i] = c % (m + 1);
        c /= m + 1;
        if (assign[i] > 0) masks[assign[i] - 1] |= std::size_t{1} << i;
      }
      bool ok = true;
      for (std::size_t w = 0; w < m && ok; ++w) ok = feasible[w][masks[w]];
      if (!ok) continue;
      std::vector<std::size_t> unassigned, risky;
      for (std::size_t i = 0; i < n; ++i) {
        if (assign[i] == 0)
          unassigned.push_back(i);
        else if (risk(s.available[assign[i] - 1].skill, s.customers[i].task,
                      s.rework_prob) > 0.0)
          risky.push_back(i);
      }
      best = std::min(best, expectation(s, unassigned, risky));
    }
    memo.emplace(k, best);
    return best;
  }
};

void check_scenario(const OracleScenario& sc, const OracleLimits& limits) {
  if (sc.horizon < 1 || sc.horizon > limits.max_horizon)
    throw OracleLimitError("oracle horizon " + std::to_string(sc.horizon) +
                           " outside 1.." + std::to_string(limits.max_horizon));
}

}  // namespace

double brute_force_value(const OracleScenario& scenario, const OracleLimits& limits) {
  check_scenario(scenario, limits);
  Solver solver(scenario, limits);
  return solver.value(scenario.state);
}

double brute_force_q_value(const OracleScenario& scenario, const Decision& first,
                           const OracleLimits& limits) {
  check_scenario(scenario, limits);
  const DecisionState& s = scenario.state;
  if (const auto violation = first_violation(s, first))
    throw FeasibilityError(std::string(to_string(*violation)),
                           "oracle first decision is infeasible");
  Solver solver(scenario, limits);
  solver.check(s);
  std::vector<std::size_t> unassigned, risky;
  for (std::size_t i = 0; i < s.customers.size(); ++i) {
    const auto tech = first.technician_of(s.customers[i].id);
    if (!tech) {
      unassigned.push_back(i);
      continue;
    }
    const Technician* w = s.find_technician(*tech);
    if (risk(w->skill, s.customers[i].task, s.rework_prob) > 0.0) risky.push_back(i);
  }
  return solver.expectation(s, unassigned, risky);
}

double exhaustive_expected_cost(const DecisionState& state, const Decision& decision,
                                std::size_t max_risky) {
  const PostDecisionState post = post_decision(state, decision);
  const std::size_t r = post.risky_assigned.size();
  if (r > max_risky)
    throw OracleLimitError(std::to_string(r) + " risky assignments exceed the limit of " +
                           std::to_string(max_risky));
  const double p = state.rework_prob;
  double total = 0.0;
  for (std::size_t outcome = 0; outcome < (std::size_t{1} << r); ++outcome) {
    StochasticInfo info;
    double prob = 1.0;
    for (std::size_t b = 0; b < r; ++b) {
      if (outcome & (std::size_t{1} << b)) {
        prob *= p;
        info.failed_risky.push_back(post.risky_assigned[b].id);
      } else {
        prob *= 1.0 - p;
      }
    }
    total += prob * realized_cost(post, info, state.penalty_base);
  }
  return total;
}

}  // namespace techroute

namespace techroute {

namespace {

constexpr double kOracleSlack = 1e-12;

Customer random_customer(std::mt19937_64& rng, int id, int period) {
  std::uniform_real_distribution<double> coord(20.0, 180.0);
  std::uniform_int_distribution<int> offset(-2, 2);
  Customer c;
  c.id = id;
  c.location = {coord(rng), coord(rng)};
  c.task = std::bernoulli_distribution(0.5)(rng) ? Task::Advanced : Task::Easy;
  c.arrival_period = period;
  c.deadline = period + offset(rng);
  return c;
}

std::vector<Technician> random_crew(std::mt19937_64& rng) {
  std::vector<Technician> crew;
  const int size = std::uniform_int_distribution<int>(1, 2)(rng);
  for (int w = 0; w < size; ++w)
    crew.push_back({w, std::bernoulli_distribution(0.5)(rng) ? Skill::Expert
                                                              : Skill::Regular});
  return crew;
}

}  // namespace

OracleScenario random_tiny_scenario(std::mt19937_64& rng) {
  OracleScenario sc;
  DecisionState& s = sc.state;
  s.period = std::uniform_int_distribution<int>(3, 6)(rng);
  s.rework_prob = 0.5;
  s.penalty_base = 1.1;
  s.travel.work_limit_minutes = std::uniform_real_distribution<double>(150.0, 420.0)(rng);
  s.available = random_crew(rng);
  const int now = std::uniform_int_distribution<int>(1, 4)(rng);
  int id = 1;
  for (int k = 0; k < now; ++k) s.customers.push_back(random_customer(rng, id++, s.period));
  sc.horizon = std::uniform_int_distribution<int>(1, 3)(rng);
  for (int k = 1; k < sc.horizon; ++k) {
    std::vector<Customer> batch;
    if (id <= 5 && std::bernoulli_distribution(0.5)(rng))
      batch.push_back(random_customer(rng, id++, s.period + k));
    sc.arrivals.push_back(std::move(batch));
    sc.available.push_back(random_crew(rng));
  }
  return sc;
}

OracleCheck check_deadline_monotonicity(int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  OracleCheck out;
  while (out.trials < trials) {
    OracleScenario sc = random_tiny_scenario(rng);
    const double v = brute_force_value(sc);
    const auto pick = std::uniform_int_distribution<std::size_t>(
        0, sc.state.customers.size() - 1)(rng);
    sc.state.customers[pick].deadline += 1;
    const double relaxed = brute_force_value(sc);
    ++out.trials;
    if (relaxed > v + kOracleSlack) {
      ++out.violations;
      out.worst_gap = std::max(out.worst_gap, relaxed - v);
    }
  }
  return out;
}

OracleCheck check_earlier_deadline_preference(int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  OracleCheck out;
  while (out.trials < trials) {
    OracleScenario sc = random_tiny_scenario(rng);
    DecisionState& s = sc.state;
    s.available.resize(1);
    s.customers.resize(std::min<std::size_t>(s.customers.size(), 2));
    Customer early = random_customer(rng, 0, s.period);
    // Drop ids so the twins come first and later arrivals keep unique ids.
    for (Customer& c : s.customers) c.id += 2;
    for (auto& batch : sc.arrivals)
      for (Customer& c : batch) c.id += 2;
    early.id = 1;
    Customer late = early;
    late.id = 2;
    early.deadline = s.period + std::uniform_int_distribution<int>(-2, 1)(rng);
    late.deadline = early.deadline + std::uniform_int_distribution<int>(1, 2)(rng);
    const TravelModel geometry(s.travel, std::span<const Customer>(&early, 1));
    const double solo = route_duration(std::vector<int>{early.id}, geometry);
    // Room for one twin but never both.
    s.travel.work_limit_minutes = solo + 0.5 * s.travel.service_minutes;
    s.customers.insert(s.customers.begin(), {early, late});
    if (s.customers.size() + [&] {
          std::size_t n = 0;
          for (const auto& b : sc.arrivals) n += b.size();
          return n;
        }() > OracleLimits{}.max_customers)
      continue;
    Decision serve_early, serve_late;
    serve_early.routes[s.available[0].id] = {early.id};
    serve_late.routes[s.available[0].id] = {late.id};
    const double q_early = brute_force_q_value(sc, serve_early);
    const double q_late = brute_force_q_value(sc, serve_late);
    ++out.trials;
    if (q_early > q_late + kOracleSlack) {
      ++out.violations;
      out.worst_gap = std::max(out.worst_gap, q_early - q_late);
    }
  }
  return out;
}

}  // namespace techroute
