#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "techroute/domain.hpp"

namespace test {

inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::path(TECHROUTE_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline techroute::Customer customer(int id, double x, double y,
                                    techroute::Task task = techroute::Task::Easy,
                                    int deadline = 3) {
  techroute::Customer c;
  c.id = id;
  c.location = {x, y};
  c.task = task;
  c.deadline = deadline;
  c.arrival_period = deadline - 2;
  return c;
}

/// Random state around the default depot, ids 1..n.
inline techroute::DecisionState random_state(std::mt19937_64& rng, int max_customers,
                                             int max_technicians,
                                             double work_limit = 420.0) {
  using namespace techroute;
  DecisionState s;
  s.period = std::uniform_int_distribution<int>(1, 20)(rng);
  s.travel.work_limit_minutes = work_limit;
  std::uniform_real_distribution<double> coord(0.0, 200.0);
  const int n = std::uniform_int_distribution<int>(0, max_customers)(rng);
  for (int i = 1; i <= n; ++i) {
    Customer c = customer(i, coord(rng), coord(rng),
                          std::bernoulli_distribution(0.5)(rng) ? Task::Advanced : Task::Easy,
                          s.period + std::uniform_int_distribution<int>(-4, 2)(rng));
    s.customers.push_back(c);
  }
  const int m = std::uniform_int_distribution<int>(0, max_technicians)(rng);
  for (int w = 0; w < m; ++w)
    s.available.push_back(
        {w * 2, std::bernoulli_distribution(0.5)(rng) ? Skill::Expert : Skill::Regular});
  return s;
}

}  // namespace test
