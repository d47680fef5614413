#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "techroute/instances.hpp"
#include "techroute/simulation.hpp"

namespace techroute {

/// Square grid over the service area for spatial inconvenience maps.
struct GridSpec {
  int cells = 20;
  double side_km = 200.0;
  int cell_of(const Point& p) const;
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Everything measured on one episode.
struct InstanceMetrics {
  std::string name;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  int customers = 0;
  int advanced_customers = 0;
  double total_inconvenience = 0.0;
  double mean_inconvenience = 0.0;  // per customer
  double mean_delay = 0.0;          // max(0, completion - deadline), per customer
  std::array<int, 3> advanced_revisits{};  // advanced customers revisited 0/1/2+
  int returning_visits = 0;
  int on_time = 0;
  std::map<int, int> completion_delta;  // completion - deadline -> count
  int final_period = 0;
  int leftover_days = 0;
  double technician_days = 0.0;
  std::vector<double> cumulative_inconvenience;  // per period, per customer
  std::vector<double> grid_inconvenience;        // summed per cell
  std::vector<int> grid_customers;
  bool divergent = false;
  friend bool operator==(const InstanceMetrics&, const InstanceMetrics&) = default;
};

InstanceMetrics measure_episode(const EpisodeResult& episode,
                                const InstanceRealization& realization,
                                const GridSpec& grid, std::string name);

/// Technician-days recomputed from the decision routes (needs decisions kept
/// in the episode); the double-entry counterpart of the period traces.
double technician_days_from_routes(const EpisodeResult& episode,
                                   const InstanceRealization& realization);

struct Estimate {
  double mean = 0.0;
  double standard_error = 0.0;
  friend bool operator==(const Estimate&, const Estimate&) = default;
};

Estimate estimate(const std::vector<double>& values);

struct MetricsReport {
  std::string policy;
  std::size_t instances = 0;
  Estimate inconvenience;
  Estimate delay;
  Estimate returning_visits;
  Estimate leftover_days;
  Estimate technician_days;
  std::array<double, 3> revisit_share{};  // pooled over advanced customers
  double on_time_share = 0.0;
  std::map<int, double> completion_delta_share;
  std::vector<double> cumulative_inconvenience;  // mean over instances
  GridSpec grid;
  std::vector<double> grid_mean;  // mean inconvenience per customer in cell
  std::vector<int> grid_customers;
  int divergent = 0;
  std::vector<InstanceMetrics> per_instance;  // sorted by name
  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// Aggregates in a fixed order (instances sorted by name, then seed), so the
/// result does not depend on the order of `rows`.
MetricsReport aggregate(std::string policy, std::vector<InstanceMetrics> rows,
                        const GridSpec& grid);

/// Pearson correlation between cell distance to the area center and cell
/// mean inconvenience, over non-empty cells.
double depot_distance_correlation(const MetricsReport& report);

}  // namespace techroute
