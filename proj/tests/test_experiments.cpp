#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "techroute/errors.hpp"
#include "techroute/evaluation.hpp"
#include "techroute/oracle.hpp"
#include "techroute/report.hpp"
#include <json.hpp>

using namespace techroute;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::vector<NamedInstance>& small_set() {
  static const auto set = [] {
    InstanceConfig c;
    c.weekly_demand_mean = 120;
    return generate_named_instances(c, 6, 40);
  }();
  return set;
}

}  // namespace

TEST_CASE("per-instance metrics are consistent") {
  for (auto kind : {PolicyKind::EF, PolicyKind::MYSF, PolicyKind::SB}) {
    const Policy policy = kind == PolicyKind::SB ? Policy::static_balance(0.33)
                                                 : Policy::benchmark(kind);
    for (const auto& inst : small_set()) {
      EpisodeOptions eo;
      eo.keep_decisions = true;
      const EpisodeResult ep = run_episode(inst.realization, policy, eo);
      const InstanceMetrics m = measure_episode(ep, inst.realization, GridSpec{}, inst.name);
      CHECK(m.advanced_revisits[0] + m.advanced_revisits[1] + m.advanced_revisits[2] ==
            m.advanced_customers);
      CHECK(m.mean_delay <= m.mean_inconvenience + 1e-12);
      CHECK((m.mean_delay == 0) == (m.mean_inconvenience == 0));
      CHECK(technician_days_from_routes(ep, inst.realization) ==
            doctest::Approx(m.technician_days).epsilon(1e-12));
      int counted = 0;
      for (const auto& [delta, n] : m.completion_delta) counted += n;
      CHECK(counted == m.customers);
      CHECK(m.leftover_days == m.final_period - 1 - inst.realization.config.arrival_days);
    }
  }
}

TEST_CASE("aggregates are permutation invariant and shares sum to one") {
  const Evaluation ev = evaluate(Policy::static_balance(0.33), small_set());
  std::vector<InstanceMetrics> rows = ev.report.per_instance;
  std::mt19937_64 rng(1);
  std::shuffle(rows.begin(), rows.end(), rng);
  CHECK(aggregate(ev.report.policy, rows, ev.report.grid) == ev.report);
  const auto& r = ev.report;
  CHECK(r.revisit_share[0] + r.revisit_share[1] + r.revisit_share[2] ==
        doctest::Approx(1.0).epsilon(1e-12));
  double deltas = 0;
  for (const auto& [d, share] : r.completion_delta_share) deltas += share;
  CHECK(deltas == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.instances == small_set().size());
}

TEST_CASE("parallel evaluation equals the serial reference") {
  EvaluateOptions options;
  options.route_dump_periods = {1, 6};
  const auto set = small_set();
  std::vector<NamedInstance> reversed(set.rbegin(), set.rend());
  for (auto kind : {PolicyKind::EF, PolicyKind::MYEX}) {
    const Evaluation par = evaluate(Policy::benchmark(kind), reversed, options);
    const Evaluation ser = evaluate_serial(Policy::benchmark(kind), set, options);
    CHECK(par.report == ser.report);
    CHECK(summary_json(par) == summary_json(ser));
    CHECK(par.routes.size() == ser.routes.size());
  }
}

TEST_CASE("zero-rework policies never return") {
  for (auto kind : {PolicyKind::MYSF, PolicyKind::MYEX, PolicyKind::SF, PolicyKind::EX}) {
    const Evaluation ev = evaluate(Policy::benchmark(kind), small_set());
    CHECK(ev.report.revisit_share[0] == 1.0);
    for (const auto& m : ev.report.per_instance) CHECK(m.returning_visits == 0);
  }
}

TEST_CASE("evaluation error paths") {
  CHECK_THROWS_AS(evaluate(Policy::benchmark(PolicyKind::EF), {}), ConfigError);
  const auto empty = test::scratch("empty_set");
  CHECK_THROWS_AS(evaluate_directory(Policy::benchmark(PolicyKind::EF), empty), ConfigError);

  const auto dir = test::scratch("partly_broken");
  generate_instance_set(InstanceConfig{}, 2, 5, dir);
  std::ofstream(dir / "instance_0002.json") << "{ not json";
  const Evaluation ev = evaluate_directory(Policy::benchmark(PolicyKind::EF), dir);
  CHECK(ev.report.instances == 2);
  REQUIRE(ev.failures.size() == 1);
  CHECK(ev.failures[0].instance == "instance_0002.json");
}

TEST_CASE("reports are byte-identical and faithful") {
  const auto dir = test::scratch("report_src");
  generate_instance_set(InstanceConfig{}, 3, 11, dir);
  EvaluateOptions options;
  options.route_dump_periods = {1, 6, 16};
  const Policy policy = Policy::static_balance(0.33);
  const Evaluation a = evaluate_directory(policy, dir, options);
  const Evaluation b = evaluate_directory(policy, dir, options);
  const auto out_a = test::scratch("report_a");
  const auto out_b = test::scratch("report_b");
  emit_report(a, out_a);
  emit_report(b, out_b);
  for (const char* f : {kInstanceRowsFile, kSummaryFile, kGridFile, kCumulativeFile, kRoutesFile})
    CHECK(slurp(out_a / f) == slurp(out_b / f));

  const auto summary = nlohmann::json::parse(slurp(out_a / kSummaryFile));
  CHECK(summary["mean_inconvenience"]["mean"].get<double>() == a.report.inconvenience.mean);
  CHECK(summary["mean_delay"]["mean"].get<double>() == a.report.delay.mean);

  std::istringstream rows(slurp(out_a / kInstanceRowsFile));
  std::string line;
  int lines = 0;
  while (std::getline(rows, line)) ++lines;
  CHECK(lines == 2 + 3);
  CHECK(slurp(out_a / kGridFile).rfind("# policy=sb:0.33 config_hash=", 0) == 0);

  std::ofstream(out_a / "blocker") << "file";
  CHECK_THROWS_AS(emit_report(a, out_a / "blocker" / "sub"), IoError);
}

TEST_CASE("grid search edge cases") {
  const std::vector<NamedInstance> one(small_set().begin(), small_set().begin() + 1);
  const GridSearchResult single = grid_search_alpha(one, {0.33});
  CHECK(single.best_alpha == 0.33);
  CHECK(single.rows.size() == 1);
  const GridSearchResult two = grid_search_alpha(one, {0.0, 1.0});
  CHECK(two.best_alpha == grid_search_alpha(one, {0.0, 1.0}).best_alpha);
  const double lower = two.rows[0].inconvenience.mean <= two.rows[1].inconvenience.mean ? 0.0 : 1.0;
  CHECK(two.best_alpha == lower);
  CHECK_THROWS_AS(grid_search_alpha(one, {}), ConfigError);
  CHECK(default_alpha_grid().front() == doctest::Approx(0.10));
  CHECK(default_alpha_grid().back() == doctest::Approx(0.60));
}

TEST_CASE("feature impact of a constant model is zero") {
  const FeatureImpactTable t = feature_impact_table(PolicyModel::zeros({4}), small_set());
  CHECK(t.mean_alpha == 0.5);
  CHECK(t.states >= kMinimumImpactStates);
  CHECK(t.rows.size() == kFeatureCount + 1);
  for (const auto& row : t.rows) {
    CHECK(row.below_percent == 0.0);
    CHECK(row.above_percent == 0.0);
  }
  const std::vector<NamedInstance> tiny = [] {
    InstanceConfig c;
    c.weekly_demand_mean = 7;
    c.arrival_days = 2;
    return generate_named_instances(c, 1, 1);
  }();
  CHECK_FALSE(feature_impact_table(PolicyModel::zeros({4}), tiny).warnings.empty());
}

TEST_CASE("oracle basics") {
  OracleScenario sc;
  sc.state.period = 3;
  sc.state.available = {{0, Skill::Expert}};
  sc.state.customers = {test::customer(1, 120, 100, Task::Advanced, 3)};
  CHECK(brute_force_value(sc) == 0.0);

  sc.state.available = {{0, Skill::Regular}};
  // One risky visit now; a failure pays this period and the terminal period.
  CHECK(brute_force_value(sc) == doctest::Approx(0.5 * 1.1 + 0.5 * 1.21));

  Decision nothing;
  CHECK(brute_force_q_value(sc, nothing) == doctest::Approx(1.1 + 1.21));
  Decision bad;
  bad.routes[5] = {1};
  CHECK_THROWS_AS(brute_force_q_value(sc, bad), FeasibilityError);

  sc.horizon = 4;
  CHECK_THROWS_AS(brute_force_value(sc), OracleLimitError);
  sc.horizon = 1;
  for (int i = 2; i <= 6; ++i) sc.state.customers.push_back(test::customer(i, 100, 120));
  CHECK_THROWS_AS(brute_force_value(sc), OracleLimitError);
}

TEST_CASE("oracle properties on a handful of random states") {
  const OracleCheck mono = check_deadline_monotonicity(20, 3);
  CHECK(mono.trials == 20);
  CHECK(mono.violations == 0);
  const OracleCheck twin = check_earlier_deadline_preference(10, 4);
  CHECK(twin.trials == 10);
  CHECK(twin.violations == 0);
}
