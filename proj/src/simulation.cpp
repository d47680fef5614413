#include "techroute/simulation.hpp"

#include <algorithm>
#include <iostream>
#include <string>

#include "techroute/errors.hpp"
#include "techroute/routing.hpp"

namespace techroute {

double EpisodeResult::total_inconvenience() const {
  double total = 0.0;
  for (const PeriodTrace& p : periods) total += p.realized_cost;
  return total;
}

double EpisodeResult::mean_inconvenience() const {
  if (customers.empty()) return 0.0;
  return total_inconvenience() / static_cast<double>(customers.size());
}

namespace {

std::vector<Technician> available_in(const InstanceRealization& r, int period) {
  std::vector<Technician> out;
  for (const Technician& tech : r.roster())
    if (!r.absent(tech.id, period)) out.push_back(tech);
  return out;
}

DecisionState blank_state(const InstanceRealization& r, int period) {
  DecisionState s;
  s.period = period;
  s.available = available_in(r, period);
  s.rework_prob = r.config.rework_prob;
  s.cutoff_period = r.config.cutoff_period();
  s.penalty_base = r.config.eta;
  s.travel = r.config.travel();
  return s;
}

}  // namespace

DecisionState initial_state(const InstanceRealization& realization) {
  DecisionState s = blank_state(realization, 1);
  const auto first = realization.arrivals_on(1);
  s.customers.assign(first.begin(), first.end());
  return s;
}

bool terminated(const DecisionState& state,
                const InstanceRealization& realization) {
  return state.customers.empty() &&
         state.period > realization.config.arrival_days;
}

StepOutcome step(const DecisionState& state, const Decision& decision,
                 const InstanceRealization& realization) {
  const auto evaluations = validate_decision(state, decision);
  for (const auto& [tech, eval] : evaluations) {
    if (!eval.feasible) {
      const std::string tag(to_string(*eval.violated));
      throw FeasibilityError(tag, "infeasible route for technician " +
                                      std::to_string(tech) + ": " + tag);
    }
  }

  StepOutcome out;
  out.post = post_decision(state, decision);
  out.minutes_worked.assign(
      static_cast<std::size_t>(realization.config.technician_count()), 0.0);
  for (const auto& [tech, eval] : evaluations)
    if (tech >= 0 && tech < static_cast<int>(out.minutes_worked.size()))
      out.minutes_worked[static_cast<std::size_t>(tech)] = eval.duration_minutes;

  const double p = state.rework_prob;
  std::vector<Customer> failed;
  for (const auto& [tech_id, route] : decision.routes) {
    const Technician* tech = state.find_technician(tech_id);
    for (int id : route) {
      const Customer& c = *state.find_customer(id);
      Visit v;
      v.period = state.period;
      v.customer = id;
      v.technician = tech_id;
      v.skill = tech->skill;
      v.risky = risk(state, *tech, c) > 0.0;
      if (v.risky) {
        // The k-th risky visit fails iff the customer's k-th coin is below p.
        v.failed = realization.rework_uniform(id, c.visits_so_far) < p;
      }
      if (v.failed) {
        Customer again = c;
        again.visits_so_far += 1;
        failed.push_back(again);
        out.info.failed_risky.push_back(id);
      }
      out.visits.push_back(v);
    }
  }
  std::sort(out.info.failed_risky.begin(), out.info.failed_risky.end());

  out.realized_cost = realized_cost(out.post, out.info, state.penalty_base);

  const int next_period = state.period + 1;
  out.next = blank_state(realization, next_period);
  out.info.available_next = out.next.available;
  const auto arrivals = realization.arrivals_on(next_period);
  out.info.new_customers.assign(arrivals.begin(), arrivals.end());

  auto& next = out.next.customers;
  next.reserve(out.post.unassigned.size() + failed.size() + arrivals.size());
  next.insert(next.end(), out.post.unassigned.begin(), out.post.unassigned.end());
  next.insert(next.end(), failed.begin(), failed.end());
  next.insert(next.end(), arrivals.begin(), arrivals.end());
  std::sort(next.begin(), next.end(),
            [](const Customer& a, const Customer& b) { return a.id < b.id; });
  return out;
}

double closed_form_inconvenience(int deadline, int completion, double eta) {
  double total = 0.0;
  for (int t = deadline; t < completion; ++t)
    total += inconvenience_increase(deadline, t, eta);
  return total;
}

EpisodeResult run_episode(const InstanceRealization& realization,
                          const DecisionRule& rule,
                          const EpisodeOptions& options) {
  EpisodeResult result;
  result.customers.resize(realization.customer_count());
  for (const auto& day : realization.arrivals) {
    for (const Customer& c : day) {
      CustomerRecord& rec = result.customers[static_cast<std::size_t>(c.id - 1)];
      rec.id = c.id;
      rec.task = c.task;
      rec.location = c.location;
      rec.arrival = c.arrival_period;
      rec.deadline = c.deadline;
    }
  }

  DecisionState state = initial_state(realization);
  const double eta = realization.config.eta;
  while (!terminated(state, realization)) {
    if (state.period > options.safety_cap) {
      result.divergent = true;
      std::clog << "warning: episode (seed " << realization.config.seed
                << ") hit the safety cap of " << options.safety_cap
                << " periods with " << state.customers.size()
                << " open customers\n";
      break;
    }
    const Decision decision = rule(state);
    StepOutcome outcome = step(state, decision, realization);

    PeriodTrace trace;
    trace.period = state.period;
    trace.open_customers = static_cast<int>(state.customers.size());
    trace.realized_cost = outcome.realized_cost;
    trace.technicians_available = static_cast<int>(state.available.size());
    trace.minutes_worked = std::move(outcome.minutes_worked);

    for (const Customer& c : outcome.post.unassigned)
      result.customers[static_cast<std::size_t>(c.id - 1)].inconvenience +=
          inconvenience_increase(c.deadline, state.period, eta);
    for (const Visit& v : outcome.visits) {
      CustomerRecord& rec = result.customers[static_cast<std::size_t>(v.customer - 1)];
      rec.visits += 1;
      if (v.failed)
        rec.inconvenience += inconvenience_increase(rec.deadline, state.period, eta);
      else
        rec.completion = state.period;
    }
    result.visits.insert(result.visits.end(), outcome.visits.begin(),
                         outcome.visits.end());
    result.periods.push_back(std::move(trace));
    if (options.keep_decisions) result.decisions.push_back(decision);
    state = std::move(outcome.next);
  }
  result.final_period = state.period;
  return result;
}

EpisodeResult run_episode(const InstanceRealization& realization,
                          const Policy& policy, const EpisodeOptions& options) {
  std::vector<std::optional<double>> alphas;
  EpisodeResult result = run_episode(
      realization,
      [&](const DecisionState& s) {
        const auto alpha = policy_alpha(policy, s);
        alphas.push_back(alpha);
        if (alpha)
          return decide_score_based(s, *alpha, EligibilityMask::AllPairs);
        return dispatch(policy, s);
      },
      options);
  for (std::size_t k = 0; k < result.periods.size() && k < alphas.size(); ++k)
    result.periods[k].alpha = alphas[k];
  return result;
}

}  // namespace techroute
