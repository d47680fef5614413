#include "techroute/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>

#include "techroute/errors.hpp"
#include "techroute/simulation.hpp"

namespace techroute {

InstanceSet load_instance_set(const std::filesystem::path& dir) {
  const auto files = list_instance_files(dir);
  if (files.empty())
    throw ConfigError("no instance files found in " + dir.string());
  InstanceSet set;
  for (const auto& file : files) {
    try {
      set.instances.push_back({file.stem().string(), load_instance(file)});
    } catch (const std::exception& e) {
      set.failures.push_back({file.filename().string(), e.what()});
    }
  }
  return set;
}

std::vector<NamedInstance> generate_named_instances(const InstanceConfig& config,
                                                    int count,
                                                    std::uint64_t base_seed) {
  std::vector<NamedInstance> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int k = 0; k < count; ++k) {
    InstanceConfig c = config;
    c.seed = base_seed + static_cast<std::uint64_t>(k);
    char name[32];
    std::snprintf(name, sizeof name, "instance_%04d", k);
    out.push_back({name, generate_instance(c)});
  }
  return out;
}

namespace {

struct Outcome {
  InstanceMetrics metrics;
  std::vector<RouteDump> routes;
  std::string error;
  bool ok = false;
};

Outcome run_one(const Policy& policy, const NamedInstance& inst,
                const EvaluateOptions& options, bool dump) {
  Outcome out;
  try {
    EpisodeOptions eo;
    eo.keep_decisions = dump && !options.route_dump_periods.empty();
    const EpisodeResult ep = run_episode(inst.realization, policy, eo);
    out.metrics = measure_episode(ep, inst.realization, options.grid, inst.name);
    if (eo.keep_decisions) {
      const auto roster = inst.realization.roster();
      for (std::size_t k = 0; k < ep.decisions.size(); ++k) {
        const int period = ep.periods[k].period;
        if (std::find(options.route_dump_periods.begin(),
                      options.route_dump_periods.end(),
                      period) == options.route_dump_periods.end())
          continue;
        for (const auto& [tech, route] : ep.decisions[k].routes) {
          RouteDump d;
          d.instance = inst.name;
          d.period = period;
          d.technician = tech;
          d.skill = roster.at(static_cast<std::size_t>(tech)).skill;
          d.customers = route;
          out.routes.push_back(std::move(d));
        }
      }
    }
    out.ok = true;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

std::vector<std::size_t> sorted_order(const std::vector<NamedInstance>& set) {
  std::vector<std::size_t> order(set.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return set[a].name < set[b].name;
  });
  return order;
}

Evaluation assemble(const Policy& policy, const std::vector<NamedInstance>& set,
                    const std::vector<std::size_t>& order,
                    std::vector<Outcome>& outcomes, const EvaluateOptions& options) {
  Evaluation ev;
  std::vector<InstanceMetrics> rows;
  for (std::size_t k = 0; k < order.size(); ++k) {
    Outcome& o = outcomes[k];
    if (!o.ok) {
      ev.failures.push_back({set[order[k]].name, o.error});
      continue;
    }
    rows.push_back(std::move(o.metrics));
    ev.routes.insert(ev.routes.end(), o.routes.begin(), o.routes.end());
  }
  ev.report = aggregate(policy.spec(), std::move(rows), options.grid);
  return ev;
}

}  // namespace

Evaluation evaluate(const Policy& policy, const std::vector<NamedInstance>& set,
                    const EvaluateOptions& options) {
  if (set.empty()) throw ConfigError("evaluation needs at least one instance");
  const auto order = sorted_order(set);
  std::vector<Outcome> outcomes(order.size());
  const int n = static_cast<int>(order.size());
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < n; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    outcomes[idx] = run_one(policy, set[order[idx]], options,
                            k < options.route_dump_instances);
  }
  return assemble(policy, set, order, outcomes, options);
}

Evaluation evaluate_serial(const Policy& policy,
                           const std::vector<NamedInstance>& set,
                           const EvaluateOptions& options) {
  if (set.empty()) throw ConfigError("evaluation needs at least one instance");
  const auto order = sorted_order(set);
  std::vector<Outcome> outcomes(order.size());
  for (std::size_t k = 0; k < order.size(); ++k)
    outcomes[k] = run_one(policy, set[order[k]], options,
                          static_cast<int>(k) < options.route_dump_instances);
  return assemble(policy, set, order, outcomes, options);
}

Evaluation evaluate_directory(const Policy& policy,
                              const std::filesystem::path& dir,
                              const EvaluateOptions& options) {
  InstanceSet set = load_instance_set(dir);
  if (set.instances.empty()) {
    Evaluation ev;
    ev.failures = std::move(set.failures);
    ev.report = aggregate(policy.spec(), {}, options.grid);
    return ev;
  }
  Evaluation ev = evaluate(policy, set.instances, options);
  ev.failures.insert(ev.failures.begin(), set.failures.begin(), set.failures.end());
  return ev;
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int k = 2; k <= 12; ++k) grid.push_back(k / 20.0);
  return grid;
}

GridSearchResult grid_search_alpha(const std::vector<NamedInstance>& set,
                                   const std::vector<double>& grid) {
  if (grid.empty()) throw ConfigError("alpha grid is empty");
  if (set.empty()) throw ConfigError("grid search needs at least one instance");
  GridSearchResult result;
  EvaluateOptions options;
  options.grid.cells = 1;
  double best_mean = 0.0;
  for (double alpha : grid) {
    const Evaluation ev = evaluate(Policy::static_balance(alpha), set, options);
    if (!ev.failures.empty())
      throw ConfigError("grid search failed on " + ev.failures.front().instance +
                        ": " + ev.failures.front().message);
    result.rows.push_back({alpha, ev.report.inconvenience});
    const double mean = ev.report.inconvenience.mean;
    if (result.rows.size() == 1 || mean < best_mean ||
        (mean == best_mean && alpha < result.best_alpha)) {
      best_mean = mean;
      result.best_alpha = alpha;
    }
  }
  return result;
}

}  // namespace techroute
