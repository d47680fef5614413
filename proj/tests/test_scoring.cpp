#include <doctest.h>

#include "techroute/errors.hpp"
#include "techroute/scoring.hpp"

using namespace techroute;

TEST_CASE("service urgency") {
  CHECK(service_urgency(0.0, 4, 4, 1.1) == doctest::Approx(1.1).epsilon(1e-12));
  CHECK(service_urgency(0.5, 4, 4, 1.1) == doctest::Approx(0.55).epsilon(1e-12));
  CHECK(service_urgency(0.0, 6, 4, 1.1) == doctest::Approx(1 / 1.1).epsilon(1e-12));
}

TEST_CASE("routing efficiency") {
  CHECK(routing_efficiency(30, 0.0) == 30.0);
  CHECK(routing_efficiency(40, 0.5) == doctest::Approx(80.0));
  CHECK(routing_efficiency(0, 0.5) == 0.0);
  CHECK_THROWS_AS(routing_efficiency(10, 1.0), DomainError);
  CHECK_THROWS_AS(routing_efficiency(-1, 0.0), DomainError);
}

TEST_CASE("score in minutes reproduces the hand example") {
  const ScoreContext ctx = ScoreContext::make(0.33, 1.1, 0.5, 1.0);
  CHECK(score(ctx, 0.0, 4, 4, 30) == doctest::Approx(-9.163).epsilon(1e-12));
}

TEST_CASE("score boundaries and units") {
  const ScoreContext urgency = ScoreContext::make(0.0, 1.1, 0.5);
  CHECK(score(urgency, 0.5, 3, 4, 50) == service_urgency(0.5, 3, 4, 1.1));
  const ScoreContext efficiency = ScoreContext::make(1.0, 1.1, 0.5, 1.0);
  CHECK(score(efficiency, 0.5, 3, 4, 50) == -routing_efficiency(50, 0.5));
  const ScoreContext hours = ScoreContext::make(0.5, 1.1, 0.5);
  CHECK(score(hours, 0.0, 4, 4, 60) == doctest::Approx(0.5 * 1.1 - 0.5 * 1.0));
  CHECK(ScoreContext::make(1.7, 1.1, 0.5).alpha == 1.0);
  CHECK(ScoreContext::make(-0.2, 1.1, 0.5).alpha == 0.0);
  CHECK_THROWS_AS(ScoreContext::make(0.3, 1.1, 0.5, 0.0), DomainError);
}
