#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "techroute/metrics.hpp"
#include "techroute/policies.hpp"
#include "techroute/policy_model.hpp"

namespace techroute {

struct NamedInstance {
  std::string name;
  InstanceRealization realization;
};

struct InstanceFailure {
  std::string instance;
  std::string message;
};

struct InstanceSet {
  std::vector<NamedInstance> instances;
  std::vector<InstanceFailure> failures;  // files that could not be loaded
};

/// Loads every instance_*.json of a directory; unreadable files are listed
/// as failures and skipped. Throws ConfigError when no instance file exists.
InstanceSet load_instance_set(const std::filesystem::path& dir);

/// In-memory set generated with seeds base_seed, base_seed + 1, ...
std::vector<NamedInstance> generate_named_instances(const InstanceConfig& config,
                                                    int count,
                                                    std::uint64_t base_seed);

struct RouteDump {
  std::string instance;
  int period = 0;
  int technician = 0;
  Skill skill = Skill::Regular;
  std::vector<int> customers;
};

struct EvaluateOptions {
  GridSpec grid;
  std::vector<int> route_dump_periods;  // periods whose routes are dumped
  int route_dump_instances = 1;         // from the start of the sorted set
};

struct Evaluation {
  MetricsReport report;
  std::vector<InstanceFailure> failures;
  std::vector<RouteDump> routes;
};

/// Runs the policy on every instance (in parallel) and aggregates. Per-instance
/// errors are recorded and the run continues. Throws ConfigError for an empty
/// set.
Evaluation evaluate(const Policy& policy, const std::vector<NamedInstance>& set,
                    const EvaluateOptions& options = {});

/// Single-threaded reference of evaluate with identical results.
Evaluation evaluate_serial(const Policy& policy,
                           const std::vector<NamedInstance>& set,
                           const EvaluateOptions& options = {});

/// Loads the directory and evaluates; load failures are merged in.
Evaluation evaluate_directory(const Policy& policy,
                              const std::filesystem::path& dir,
                              const EvaluateOptions& options = {});

struct GridRow {
  double alpha = 0.0;
  Estimate inconvenience;
};

struct GridSearchResult {
  double best_alpha = 0.0;
  std::vector<GridRow> rows;
};

/// 0.10, 0.15, ..., 0.60.
std::vector<double> default_alpha_grid();

/// Evaluates SB(alpha) for every grid value; the lowest mean wins (ties:
/// the smaller alpha). Throws ConfigError for an empty grid or set.
GridSearchResult grid_search_alpha(const std::vector<NamedInstance>& set,
                                   const std::vector<double>& grid);

struct FeatureImpactRow {
  std::string feature;
  double mean_value = 0.0;
  double below_percent = 0.0;  // % change of mean alpha for states below mean
  double above_percent = 0.0;
  std::size_t below_states = 0;
  std::size_t above_states = 0;
};

struct FeatureImpactTable {
  double mean_alpha = 0.0;
  std::size_t states = 0;
  std::vector<FeatureImpactRow> rows;  // the 14 features, then available_total
  std::vector<std::string> warnings;
};

inline constexpr std::size_t kMinimumImpactStates = 100;

/// Collects the states visited by the DB policy on `set`, evaluates Lambda on
/// each and splits states at every feature's mean.
FeatureImpactTable feature_impact_table(const PolicyModel& model,
                                        const std::vector<NamedInstance>& set);

}  // namespace techroute
