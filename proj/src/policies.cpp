#include "techroute/policies.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <string>
#include <utility>

#include "techroute/errors.hpp"
#include "techroute/policy_model.hpp"
#include "techroute/routing.hpp"
#include "techroute/scoring.hpp"

namespace techroute {

bool allows(EligibilityMask mask, Skill skill, Task task) {
  switch (mask) {
    case EligibilityMask::AllPairs: return true;
    case EligibilityMask::SafeOnly:
      return !(skill == Skill::Regular && task == Task::Advanced);
    case EligibilityMask::Exclusive:
      return (skill == Skill::Regular) == (task == Task::Easy);
  }
  return false;
}

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::MYSF: return "mysf";
    case PolicyKind::MYEX: return "myex";
    case PolicyKind::MYEF: return "myef";
    case PolicyKind::SF: return "sf";
    case PolicyKind::EX: return "ex";
    case PolicyKind::EF: return "ef";
    case PolicyKind::SB: return "sb";
    case PolicyKind::DB: return "db";
  }
  return "?";
}

Policy Policy::static_balance(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw ConfigError("SB alpha must lie in [0, 1]");
  Policy p;
  p.kind = PolicyKind::SB;
  p.alpha = alpha;
  return p;
}

Policy Policy::dynamic_balance(std::shared_ptr<const PolicyModel> model) {
  Policy p;
  p.kind = PolicyKind::DB;
  p.model = std::move(model);
  return p;
}

Policy Policy::benchmark(PolicyKind kind) {
  if (kind == PolicyKind::SB || kind == PolicyKind::DB)
    throw ConfigError("SB and DB are not benchmark policies");
  Policy p;
  p.kind = kind;
  return p;
}

Policy Policy::parse(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view head = spec.substr(0, colon);
  const std::string_view arg =
      colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  for (PolicyKind kind : {PolicyKind::MYSF, PolicyKind::MYEX, PolicyKind::MYEF,
                          PolicyKind::SF, PolicyKind::EX, PolicyKind::EF}) {
    if (head == to_string(kind)) {
      if (colon != std::string_view::npos)
        throw ConfigError("policy '" + std::string(head) +
                          "' takes no argument");
      return benchmark(kind);
    }
  }
  if (head == "sb") {
    double alpha = 0.0;
    auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), alpha);
    if (arg.empty() || ec != std::errc{} || ptr != arg.data() + arg.size())
      throw ConfigError("malformed SB policy spec '" + std::string(spec) +
                        "', expected sb:<alpha>");
    return static_balance(alpha);
  }
  if (head == "db") {
    if (arg.empty())
      throw ConfigError("malformed DB policy spec, expected db:<model-path>");
    Policy p = dynamic_balance(
        std::make_shared<const PolicyModel>(load_model(std::string(arg))));
    p.model_path = std::string(arg);
    return p;
  }
  throw ConfigError("unknown policy spec '" + std::string(spec) + "'");
}

std::string Policy::spec() const {
  if (kind == PolicyKind::SB) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), alpha);
    return "sb:" + std::string(buf, ptr);
  }
  if (kind == PolicyKind::DB)
    return "db:" + (model_path.empty() ? std::string("<memory>") : model_path);
  return std::string(to_string(kind));
}

namespace {

// Incremental routes over the local node indices of a RouteGeometry.
class RouteBuilder {
 public:
  explicit RouteBuilder(const DecisionState& state)
      : state_(state), geometry_(state) {
    tech_order_.resize(state.available.size());
    std::iota(tech_order_.begin(), tech_order_.end(), std::size_t{0});
    std::sort(tech_order_.begin(), tech_order_.end(),
              [&](std::size_t a, std::size_t b) {
                return state.available[a].id < state.available[b].id;
              });
    routes_.resize(state.available.size());
    durations_.assign(state.available.size(), 0.0);
  }

  const RouteGeometry& geometry() const { return geometry_; }
  const std::vector<std::size_t>& tech_order() const { return tech_order_; }

  RouteGeometry::Slot slot(std::size_t tech, std::size_t customer) const {
    return geometry_.best_insertion(routes_[tech], customer + 1);
  }

  bool fits(std::size_t tech, double delta) const {
    return durations_[tech] + delta <=
           state_.travel.work_limit_minutes + 0.5 * kDurationTolerance;
  }

  void insert(std::size_t tech, std::size_t customer, std::size_t position) {
    auto& route = routes_[tech];
    route.insert(route.begin() + static_cast<std::ptrdiff_t>(position),
                 customer + 1);
    durations_[tech] = geometry_.duration(route);
  }

  Decision decision() const {
    Decision out;
    for (std::size_t w = 0; w < routes_.size(); ++w) {
      auto& route = out.routes[state_.available[w].id];
      route.reserve(routes_[w].size());
      for (std::size_t node : routes_[w])
        route.push_back(state_.customers[node - 1].id);
    }
    return out;
  }

 private:
  const DecisionState& state_;
  RouteGeometry geometry_;
  std::vector<std::size_t> tech_order_;
  std::vector<std::vector<std::size_t>> routes_;
  std::vector<double> durations_;
};

std::vector<std::size_t> customers_by_id(const DecisionState& state) {
  std::vector<std::size_t> order(state.customers.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return state.customers[a].id < state.customers[b].id;
  });
  return order;
}

// Shared iterative greedy: value(tech, customer, delta) ranks candidates,
// higher first (any totally ordered type). Only the route that received the last customer changes, so
// only its insertion slots are recomputed.
template <typename Value>
Decision greedy_assignment(const DecisionState& state, EligibilityMask mask,
                           Value value) {
  RouteBuilder builder(state);
  const std::size_t n = state.customers.size();
  const std::size_t m = state.available.size();
  const auto order = customers_by_id(state);

  std::vector<RouteGeometry::Slot> cache(n * m);
  std::vector<char> allowed(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t w = 0; w < m; ++w) {
      allowed[i * m + w] =
          allows(mask, state.available[w].skill, state.customers[i].task);
      if (allowed[i * m + w]) cache[i * m + w] = builder.slot(w, i);
    }

  std::vector<char> open(n, 1);
  std::size_t remaining = n;
  while (remaining > 0) {
    bool found = false;
    std::size_t best_i = 0, best_w = 0;
    decltype(value(std::size_t{0}, std::size_t{0}, 0.0)) best_value{};
    for (std::size_t i : order) {
      if (!open[i]) continue;
      for (std::size_t w : builder.tech_order()) {
        if (!allowed[i * m + w]) continue;
        const auto& slot = cache[i * m + w];
        if (!builder.fits(w, slot.delta)) continue;
        const auto v = value(w, i, slot.delta);
        if (!found || v > best_value) {
          found = true;
          best_value = v;
          best_i = i;
          best_w = w;
        }
      }
    }
    if (!found) break;
    builder.insert(best_w, best_i, cache[best_i * m + best_w].position);
    open[best_i] = 0;
    --remaining;
    for (std::size_t i = 0; i < n; ++i)
      if (open[i] && allowed[i * m + best_w])
        cache[i * m + best_w] = builder.slot(best_w, i);
  }
  return builder.decision();
}

}  // namespace

Decision decide_score_based(const DecisionState& state, double alpha,
                            EligibilityMask mask) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw ConfigError("alpha must lie in [0, 1]");
  const ScoreContext ctx =
      ScoreContext::make(alpha, state.penalty_base, state.rework_prob);
  return greedy_assignment(
      state, mask, [&](std::size_t w, std::size_t i, double delta) {
        const Customer& c = state.customers[i];
        const double rho =
            risk(state.available[w].skill, c.task, state.rework_prob);
        return score(ctx, rho, c.deadline, state.period, delta);
      });
}

Decision decide_efficiency_only(const DecisionState& state,
                                EligibilityMask mask) {
  return greedy_assignment(state, mask,
                           [](std::size_t, std::size_t, double delta) {
                             return -delta;
                           });
}

Decision decide_myopic_deadline_first(const DecisionState& state,
                                      EligibilityMask mask) {
  // Oldest deadline first; within a deadline the cheapest insertion wins.
  return greedy_assignment(
      state, mask, [&](std::size_t, std::size_t i, double delta) {
        return std::pair<int, double>{-state.customers[i].deadline, -delta};
      });
}

std::optional<double> policy_alpha(const Policy& policy,
                                   const DecisionState& state) {
  if (policy.kind == PolicyKind::SB) return policy.alpha;
  if (policy.kind == PolicyKind::DB) {
    if (!policy.model) throw ConfigError("DB policy has no model loaded");
    return lambda_deterministic(*policy.model, state);
  }
  return std::nullopt;
}

Decision dispatch(const Policy& policy, const DecisionState& state) {
  switch (policy.kind) {
    case PolicyKind::MYSF:
      return decide_myopic_deadline_first(state, EligibilityMask::SafeOnly);
    case PolicyKind::MYEX:
      return decide_myopic_deadline_first(state, EligibilityMask::Exclusive);
    case PolicyKind::MYEF:
      return decide_myopic_deadline_first(state, EligibilityMask::AllPairs);
    case PolicyKind::SF:
      return decide_efficiency_only(state, EligibilityMask::SafeOnly);
    case PolicyKind::EX:
      return decide_efficiency_only(state, EligibilityMask::Exclusive);
    case PolicyKind::EF:
      return decide_efficiency_only(state, EligibilityMask::AllPairs);
    case PolicyKind::SB:
    case PolicyKind::DB:
      return decide_score_based(state, *policy_alpha(policy, state),
                                EligibilityMask::AllPairs);
  }
  throw ConfigError("unknown policy kind");
}

}  // namespace techroute
