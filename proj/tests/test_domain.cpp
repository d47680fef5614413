#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "techroute/errors.hpp"
#include "techroute/oracle.hpp"
#include "techroute/policies.hpp"
#include "techroute/routing.hpp"

using namespace techroute;

TEST_CASE("inconvenience increase compounds once the deadline is due") {
  CHECK(inconvenience_increase(4, 4, 1.1) == doctest::Approx(1.1).epsilon(1e-12));
  CHECK(inconvenience_increase(5, 4, 1.1) == 0.0);
  CHECK(inconvenience_increase(3, 4, 1.1) == doctest::Approx(1.21).epsilon(1e-12));
  CHECK_THROWS_AS(inconvenience_increase(3, 4, 1.0), ConfigError);
}

TEST_CASE("risk only for regular technicians on advanced tasks") {
  CHECK(risk(Skill::Regular, Task::Advanced, 0.5) == 0.5);
  CHECK(risk(Skill::Regular, Task::Easy, 0.5) == 0.0);
  CHECK(risk(Skill::Expert, Task::Advanced, 0.5) == 0.0);
  CHECK(risk(Skill::Expert, Task::Easy, 0.5) == 0.0);
}

TEST_CASE("expected immediate cost hand examples") {
  DecisionState s;
  s.period = 4;
  s.available = {{0, Skill::Regular}};
  s.customers = {test::customer(1, 100, 110, Task::Easy, 3),
                 test::customer(2, 100, 120, Task::Advanced, 4)};
  Decision x;
  x.routes[0] = {2};
  CHECK(expected_immediate_cost(s, x) == doctest::Approx(1.76).epsilon(1e-12));

  s.available = {{0, Skill::Expert}};
  x.routes[0] = {1, 2};
  CHECK(expected_immediate_cost(s, x) == 0.0);

  for (auto& c : s.customers) c.deadline = 9;
  CHECK(expected_immediate_cost(s, Decision{}) == 0.0);
}

TEST_CASE("realized cost hand examples") {
  PostDecisionState post;
  post.period = 4;
  post.unassigned = {test::customer(1, 0, 0, Task::Easy, 4)};
  CHECK(realized_cost(post, {}, 1.1) == doctest::Approx(1.1).epsilon(1e-12));

  post.unassigned.clear();
  post.risky_assigned = {test::customer(2, 0, 0, Task::Advanced, 3)};
  CHECK(realized_cost(post, {}, 1.1) == 0.0);
  StochasticInfo info;
  info.failed_risky = {2};
  CHECK(realized_cost(post, info, 1.1) == doctest::Approx(1.21).epsilon(1e-12));
  info.failed_risky = {7};
  CHECK_THROWS_AS(realized_cost(post, info, 1.1), ProtocolError);
}

TEST_CASE("post-decision sets partition the open customers") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const DecisionState s = test::random_state(rng, 12, 4);
    const Decision x = dispatch(Policy::benchmark(PolicyKind::EF), s);
    const PostDecisionState post = post_decision(s, x);
    CHECK(post.unassigned.size() + post.risky_assigned.size() + post.safe_assigned.size() ==
          s.customers.size());
    CHECK(post.unassigned.size() == s.customers.size() - x.routed_count());
  }
}

TEST_CASE("expected immediate cost matches exhaustive enumeration of rework outcomes") {
  std::mt19937_64 rng(3);
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    DecisionState s = test::random_state(rng, 16, 6, 1e6);
    for (auto& w : s.available) w.skill = Skill::Regular;
    const Decision x = dispatch(Policy::benchmark(PolicyKind::EF), s);
    const PostDecisionState post = post_decision(s, x);
    if (post.risky_assigned.size() > 10) continue;
    const double exact = exhaustive_expected_cost(s, x);
    CHECK(std::abs(expected_immediate_cost(s, x) - exact) <= 1e-12 * std::max(1.0, exact));
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("infeasible decisions are rejected by the cost function") {
  DecisionState s;
  s.available = {{0, Skill::Expert}};
  s.customers = {test::customer(1, 100, 110)};
  Decision x;
  x.routes[3] = {1};
  CHECK_THROWS_AS(expected_immediate_cost(s, x), FeasibilityError);
}
