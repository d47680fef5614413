#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "techroute/errors.hpp"
#include "techroute/routing.hpp"

using namespace techroute;

namespace {

DecisionState origin_state() {
  DecisionState s;
  s.travel.depot = {0, 0};
  s.travel.speed_kmh = 60;
  s.travel.service_minutes = 30;
  return s;
}

}  // namespace

TEST_CASE("travel times") {
  DecisionState s = origin_state();
  s.customers = {test::customer(1, 60, 0), test::customer(2, 60, 0), test::customer(3, 0, 0)};
  const TravelModel m(s);
  CHECK(m.travel_time(0, 1) == doctest::Approx(90.0));
  CHECK(m.travel_time(3, 0) == 0.0);
  CHECK(m.travel_time(1, 2) == doctest::Approx(30.0));
  CHECK_THROWS_AS(m.travel_time(0, 9), LookupError);
}

TEST_CASE("route durations") {
  DecisionState s = origin_state();
  s.customers = {test::customer(1, 0, 30), test::customer(2, 0, 50), test::customer(3, 45, 0)};
  const TravelModel m(s);
  const std::vector<int> two{1, 2};
  CHECK(route_duration(two, m) == doctest::Approx(160.0));
  CHECK(route_duration(std::vector<int>{}, m) == 0.0);
  CHECK(route_duration(std::vector<int>{3}, m) == doctest::Approx(2 * 45.0 + 30.0));
  CHECK_THROWS_AS(route_duration(std::vector<int>{1, 1}, m), StructuralError);
}

TEST_CASE("decision constraints") {
  DecisionState s = origin_state();
  s.travel.work_limit_minutes = 210;
  s.available = {{0, Skill::Regular}};
  s.customers = {test::customer(1, 90, 0), test::customer(2, 91, 0)};
  Decision x;
  x.routes[0] = {1};
  CHECK_FALSE(first_violation(s, x).has_value());

  x.routes[0] = {2};
  REQUIRE(first_violation(s, x).has_value());
  CHECK(to_string(*first_violation(s, x)) == "work-limit");

  x.routes.clear();
  x.routes[4] = {1};
  CHECK(to_string(*first_violation(s, x)) == "unavailable-technician");

  x.routes.clear();
  x.routes[0] = {5};
  CHECK(to_string(*first_violation(s, x)) == "unknown-customer");

  x.routes[0] = {1, 1};
  CHECK(to_string(*first_violation(s, x)) == "repeated-customer");
}

TEST_CASE("cheapest insertion special cases") {
  DecisionState s = origin_state();
  s.available = {{0, Skill::Expert}};
  s.customers = {test::customer(1, 0, 40), test::customer(2, 0, 20), test::customer(3, 0, 80)};
  const Insertion empty = cheapest_insertion(s, Decision{}, 0, 2);
  CHECK(empty.delta_minutes == doctest::Approx(2 * 20.0 + 30.0));
  CHECK(empty.routes.routes.at(0) == std::vector<int>{2});

  Decision d;
  d.routes[0] = {1, 3};
  const Insertion onto = cheapest_insertion(s, d, 0, 2);
  CHECK(onto.delta_minutes == doctest::Approx(30.0));
  CHECK(onto.routes.routes.at(0) == std::vector<int>{2, 1, 3});
}

TEST_CASE("cheapest insertion equals the brute-force position argmin on 10000 routes") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coord(0.0, 200.0);
  for (int trial = 0; trial < 10000; ++trial) {
    DecisionState s;
    s.available = {{0, Skill::Expert}};
    const int n = std::uniform_int_distribution<int>(1, 9)(rng);
    for (int i = 1; i <= n; ++i) s.customers.push_back(test::customer(i, coord(rng), coord(rng)));
    std::vector<int> route;
    for (int i = 1; i < n; ++i) route.push_back(i);
    std::shuffle(route.begin(), route.end(), rng);
    Decision d;
    d.routes[0] = route;
    const TravelModel m(s);
    const double base = route_duration(route, m);
    double best = 1e300;
    std::size_t best_pos = 0;
    for (std::size_t pos = 0; pos <= route.size(); ++pos) {
      std::vector<int> r = route;
      r.insert(r.begin() + static_cast<long>(pos), n);
      const double delta = route_duration(r, m) - base;
      if (delta < best - 1e-9) {
        best = delta;
        best_pos = pos;
      }
    }
    const Insertion ins = cheapest_insertion(s, d, 0, n);
    REQUIRE(ins.delta_minutes == doctest::Approx(best).epsilon(1e-9));
    REQUIRE(ins.position == best_pos);
  }
}

TEST_CASE("route geometry agrees with the travel model") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const DecisionState s = test::random_state(rng, 10, 1);
    const RouteGeometry g(s);
    const TravelModel m(s);
    std::vector<std::size_t> local;
    std::vector<int> ids;
    for (std::size_t k = 0; k < s.customers.size(); ++k) {
      local.push_back(k + 1);
      ids.push_back(s.customers[k].id);
    }
    CHECK(g.duration(local) == doctest::Approx(route_duration(ids, m)).epsilon(1e-12));
  }
}
