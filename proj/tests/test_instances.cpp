#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "techroute/errors.hpp"
#include "techroute/instances.hpp"

using namespace techroute;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("weekday structure") {
  CHECK(is_monday(1));
  CHECK(is_monday(6));
  CHECK(is_monday(11));
  CHECK_FALSE(is_monday(2));
  CHECK_FALSE(is_monday(5));
}

TEST_CASE("daily arrival counts follow the configured moments") {
  InstanceConfig c;
  CHECK(c.daily_mean() == doctest::Approx(25.714).epsilon(1e-4));
  std::mt19937_64 rng(1);
  double sum = 0, sq = 0, monday = 0;
  const int draws = 20000;
  for (int k = 0; k < draws; ++k) {
    const double x = daily_arrival_count(2, c, rng);
    sum += x;
    sq += x * x;
    monday += daily_arrival_count(1, c, rng);
  }
  const double mean = sum / draws;
  CHECK(mean == doctest::Approx(25.71).epsilon(0.01));
  CHECK(std::sqrt(sq / draws - mean * mean) == doctest::Approx(4.29).epsilon(0.05));
  CHECK(monday / draws == doctest::Approx(77.1).epsilon(0.01));

  c.cv = 0;
  for (int k = 0; k < 20; ++k) CHECK(daily_arrival_count(3, c, rng) == 26);
}

TEST_CASE("generation is deterministic and respects degenerate settings") {
  InstanceConfig c;
  c.seed = 77;
  CHECK(generate_instance(c) == generate_instance(c));
  c.absence_prob = 0;
  const InstanceRealization r = generate_instance(c);
  for (const auto& row : r.absences)
    for (bool a : row) CHECK_FALSE(a);
  int id = 0;
  for (const auto& day : r.arrivals)
    for (const Customer& cu : day) {
      CHECK(cu.id == ++id);
      CHECK(cu.deadline == cu.arrival_period + c.deadline_offset_days);
      CHECK(cu.location.x >= 0);
      CHECK(cu.location.x <= c.area_side_km);
    }
  CHECK(static_cast<std::size_t>(id) == r.customer_count());
}

TEST_CASE("expected total arrivals over the arrival window") {
  InstanceConfig c;
  double total = 0;
  const int seeds = 1000;
  for (int k = 0; k < seeds; ++k) {
    c.seed = 5000 + static_cast<std::uint64_t>(k);
    total += static_cast<double>(generate_instance(c).customer_count());
  }
  CHECK(total / seeds == doctest::Approx(540.0).epsilon(0.02));
}

TEST_CASE("instance files round-trip bit-exactly") {
  const auto dir = test::scratch("instances_roundtrip");
  InstanceConfig c;
  c.seed = 9;
  const InstanceRealization r = generate_instance(c);
  save_instance(r, dir / "a.json");
  CHECK(load_instance(dir / "a.json") == r);
  save_instance(load_instance(dir / "a.json"), dir / "b.json");
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
}

TEST_CASE("instance file error paths") {
  const auto dir = test::scratch("instances_errors");
  InstanceConfig c;
  save_instance(generate_instance(c), dir / "ok.json");
  const std::string text = slurp(dir / "ok.json");
  std::ofstream(dir / "cut.json") << text.substr(0, text.size() / 2);
  CHECK_THROWS_AS(load_instance(dir / "cut.json"), ParseError);

  std::string extra = text;
  extra.insert(extra.find('{') + 1, "\"future_field\": 1,");
  std::ofstream(dir / "extra.json") << extra;
  std::vector<std::string> warnings;
  CHECK(load_instance(dir / "extra.json", &warnings) == generate_instance(c));
  CHECK_FALSE(warnings.empty());

  InstanceRealization twins = generate_instance(c);
  twins.arrivals[0][1].location = twins.arrivals[0][0].location;
  save_instance(twins, dir / "twins.json");
  warnings.clear();
  CHECK(load_instance(dir / "twins.json", &warnings) == twins);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0] == "customers 1 and 2 share a location");
}

TEST_CASE("config validation and hashing") {
  InstanceConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(config_from_json(config_to_json(c)) == c);
  InstanceConfig d = c;
  d.absence_prob = 0.2;
  CHECK(config_hash(c) != config_hash(d));
  d.absence_prob = 1.5;
  CHECK_THROWS_AS(d.validate(), ConfigError);
  d = c;
  d.eta = 1.0;
  CHECK_THROWS_AS(d.validate(), ConfigError);
}

TEST_CASE("instance sets are byte-identical across runs") {
  const auto a = test::scratch("set_a");
  const auto b = test::scratch("set_b");
  const auto fa = generate_instance_set(InstanceConfig{}, 3, 100, a);
  const auto fb = generate_instance_set(InstanceConfig{}, 3, 100, b);
  REQUIRE(fa.size() == 3);
  for (std::size_t k = 0; k < fa.size(); ++k) CHECK(slurp(fa[k]) == slurp(fb[k]));
  CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
  CHECK(list_instance_files(a).size() == 3);
}
