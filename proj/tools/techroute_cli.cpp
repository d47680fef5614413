#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "techroute/errors.hpp"
#include "techroute/evaluation.hpp"
#include "techroute/instances.hpp"
#include "techroute/oracle.hpp"
#include "techroute/policies.hpp"
#include "techroute/policy_model.hpp"
#include "techroute/report.hpp"
#include "techroute/trainer.hpp"

namespace fs = std::filesystem;
using namespace techroute;

namespace {

void print_estimate(const char* label, const Estimate& e) {
  std::printf("  %-22s %.4f (se %.4f)\n", label, e.mean, e.standard_error);
}

int cmd_generate(const fs::path& config_path, int count, std::optional<std::uint64_t> seed,
                 const fs::path& out) {
  InstanceConfig config = load_instance_config(config_path);
  const std::uint64_t base = seed.value_or(config.seed);
  const auto files = generate_instance_set(config, count, base, out);
  std::printf("wrote %zu instances to %s (seeds %llu..)\n", files.size(),
              out.string().c_str(), static_cast<unsigned long long>(base));
  return 0;
}

int cmd_run(const std::string& spec, const fs::path& instances, const fs::path& out,
            int grid_cells, const std::vector<int>& dump_periods, int dump_instances) {
  const Policy policy = Policy::parse(spec);
  EvaluateOptions options;
  options.grid.cells = grid_cells;
  options.route_dump_periods = dump_periods;
  options.route_dump_instances = dump_instances;
  const Evaluation ev = evaluate_directory(policy, instances, options);
  emit_report(ev, out);
  const MetricsReport& r = ev.report;
  std::printf("policy %s over %zu instances\n", r.policy.c_str(), r.instances);
  print_estimate("mean inconvenience", r.inconvenience);
  print_estimate("mean delay (days)", r.delay);
  print_estimate("returning visits", r.returning_visits);
  print_estimate("leftover days", r.leftover_days);
  print_estimate("technician-days", r.technician_days);
  std::printf("  advanced revisited 0/1/2+: %.3f / %.3f / %.3f\n", r.revisit_share[0],
              r.revisit_share[1], r.revisit_share[2]);
  for (const auto& f : ev.failures)
    std::fprintf(stderr, "failed: %s: %s\n", f.instance.c_str(), f.message.c_str());
  return ev.failures.empty() ? 0 : 1;
}

int cmd_train(const fs::path& config_path, const fs::path& out,
              std::optional<std::uint64_t> seed, std::optional<int> iterations,
              fs::path curve_path) {
  TrainConfig config = config_path.empty() ? TrainConfig{} : load_train_config(config_path);
  if (seed) config.seed = *seed;
  if (iterations) config.iterations = *iterations;
  config.validate();
  const TrainResult result = train(config, [](const CurvePoint& p) {
    std::printf("iteration %6d  train %.4f  eval %.4f  sigma %.4f\n", p.iteration,
                p.train_inconvenience, p.eval_inconvenience, p.sigma);
    std::fflush(stdout);
  });
  save_model(result.model, out);
  if (curve_path.empty()) curve_path = fs::path(out).replace_extension(".curve.csv");
  write_learning_curve(result.curve, curve_path);
  std::printf("model written to %s, learning curve to %s", out.string().c_str(),
              curve_path.string().c_str());
  if (result.guarded_iterations > 0)
    std::printf(" (%d iterations rolled back on non-finite values)",
                result.guarded_iterations);
  std::printf("\n");
  return 0;
}

int cmd_gridsearch(const fs::path& instances, std::vector<double> grid) {
  const InstanceSet set = load_instance_set(instances);
  for (const auto& f : set.failures)
    std::fprintf(stderr, "failed: %s: %s\n", f.instance.c_str(), f.message.c_str());
  if (grid.empty()) grid = default_alpha_grid();
  const GridSearchResult result = grid_search_alpha(set.instances, grid);
  std::printf("alpha,mean_inconvenience,standard_error\n");
  for (const GridRow& row : result.rows)
    std::printf("%.2f,%.6f,%.6f\n", row.alpha, row.inconvenience.mean,
                row.inconvenience.standard_error);
  std::printf("best alpha %.2f\n", result.best_alpha);
  return set.failures.empty() ? 0 : 1;
}

int cmd_analyze(const fs::path& model_path, const fs::path& instances) {
  const PolicyModel model = load_model(model_path);
  const InstanceSet set = load_instance_set(instances);
  for (const auto& f : set.failures)
    std::fprintf(stderr, "failed: %s: %s\n", f.instance.c_str(), f.message.c_str());
  const FeatureImpactTable table = feature_impact_table(model, set.instances);
  for (const auto& w : table.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("states %zu, mean alpha %.4f\n", table.states, table.mean_alpha);
  std::printf("%-28s %10s %10s %10s\n", "feature", "mean", "below %", "above %");
  for (const auto& row : table.rows)
    std::printf("%-28s %10.3f %+10.2f %+10.2f\n", row.feature.c_str(), row.mean_value,
                row.below_percent, row.above_percent);
  return set.failures.empty() ? 0 : 1;
}

int cmd_oracle(int trials, std::uint64_t seed) {
  const OracleCheck mono = check_deadline_monotonicity(2 * trials, seed);
  const OracleCheck twin = check_earlier_deadline_preference(trials, seed + 1);
  std::printf("deadline monotonicity: %d states, %d violations (worst gap %.3g)\n",
              mono.trials, mono.violations, mono.worst_gap);
  std::printf("earlier-deadline twin: %d states, %d violations (worst gap %.3g)\n",
              twin.trials, twin.violations, twin.worst_gap);
  const bool ok = mono.violations == 0 && twin.violations == 0;
  std::printf("%s\n", ok ? "selftest passed" : "selftest FAILED");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Technician routing with a learned urgency/efficiency balance"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "Generate instance files");
  fs::path gen_config, gen_out;
  int gen_count = 150;
  std::optional<std::uint64_t> gen_seed;
  gen->add_option("--config", gen_config, "Instance config (JSON)")->required()->check(CLI::ExistingFile);
  gen->add_option("--count", gen_count, "Number of instances")->check(CLI::NonNegativeNumber);
  gen->add_option("--seed", gen_seed, "Base seed (overrides the config)");
  gen->add_option("--out", gen_out, "Output directory")->required();

  auto* run = app.add_subcommand("run", "Evaluate a policy on an instance set");
  std::string run_policy;
  fs::path run_instances, run_out;
  int grid_cells = 20, dump_instances = 1;
  std::vector<int> dump_periods{1, 6, 16};
  run->add_option("--policy", run_policy, "mysf|myex|myef|sf|ex|ef|sb:<alpha>|db:<model>")->required();
  run->add_option("--instances", run_instances, "Instance directory")->required();
  run->add_option("--out", run_out, "Report directory")->required();
  run->add_option("--grid-cells", grid_cells, "Spatial grid resolution")->check(CLI::PositiveNumber);
  run->add_option("--dump-periods", dump_periods, "Periods whose routes are dumped")->delimiter(',');
  run->add_option("--dump-instances", dump_instances, "Instances with route dumps");

  auto* tr = app.add_subcommand("train", "Train the balance parametrization");
  fs::path tr_config, tr_out, tr_curve;
  std::optional<std::uint64_t> tr_seed;
  std::optional<int> tr_iterations;
  tr->add_option("--config", tr_config, "Training config (JSON)")->check(CLI::ExistingFile);
  tr->add_option("--out", tr_out, "Model file")->required();
  tr->add_option("--seed", tr_seed, "Training seed (overrides the config)");
  tr->add_option("--iterations", tr_iterations, "Iterations (overrides the config)");
  tr->add_option("--curve", tr_curve, "Learning-curve CSV (default: next to the model)");

  auto* gs = app.add_subcommand("gridsearch", "Tune alpha of the static balance policy");
  fs::path gs_instances;
  std::vector<double> gs_grid;
  gs->add_option("--instances", gs_instances, "Instance directory")->required();
  gs->add_option("--grid", gs_grid, "Alpha values (default 0.10..0.60 step 0.05)")->delimiter(',');

  auto* an = app.add_subcommand("analyze", "Feature impact of a trained model");
  fs::path an_model, an_instances;
  an->add_option("--model", an_model, "Model file")->required();
  an->add_option("--instances", an_instances, "Instance directory")->required();

  auto* orc = app.add_subcommand("oracle", "Exact small-scale checks");
  bool selftest = false;
  int orc_trials = 100;
  std::uint64_t orc_seed = 7;
  orc->add_flag("--selftest", selftest, "Run the randomized oracle checks")->required();
  orc->add_option("--trials", orc_trials, "Twin states (monotonicity uses twice as many)");
  orc->add_option("--seed", orc_seed, "Seed of the random states");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_generate(gen_config, gen_count, gen_seed, gen_out);
    if (*run)
      return cmd_run(run_policy, run_instances, run_out, grid_cells, dump_periods,
                     dump_instances);
    if (*tr) return cmd_train(tr_config, tr_out, tr_seed, tr_iterations, tr_curve);
    if (*gs) return cmd_gridsearch(gs_instances, gs_grid);
    if (*an) return cmd_analyze(an_model, an_instances);
    if (*orc) return cmd_oracle(orc_trials, orc_seed);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
