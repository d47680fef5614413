#include "techroute/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "techroute/errors.hpp"
#include "techroute/routing.hpp"

namespace techroute {

int GridSpec::cell_of(const Point& p) const {
  auto index = [&](double v) {
    const int k = static_cast<int>(std::floor(v / side_km * cells));
    return std::clamp(k, 0, cells - 1);
  };
  return index(p.y) * cells + index(p.x);
}

InstanceMetrics measure_episode(const EpisodeResult& episode,
                                const InstanceRealization& realization,
                                const GridSpec& grid, std::string name) {
  if (grid.cells < 1 || !(grid.side_km > 0.0))
    throw ConfigError("grid needs at least one cell and a positive side");
  InstanceMetrics m;
  m.name = std::move(name);
  m.seed = realization.config.seed;
  m.config_hash = config_hash(realization.config);
  m.customers = static_cast<int>(episode.customers.size());
  m.final_period = episode.final_period;
  m.divergent = episode.divergent;
  m.leftover_days =
      std::max(0, episode.final_period - 1 - realization.config.arrival_days);
  m.grid_inconvenience.assign(static_cast<std::size_t>(grid.cells * grid.cells), 0.0);
  m.grid_customers.assign(m.grid_inconvenience.size(), 0);

  double delay = 0.0;
  for (const CustomerRecord& c : episode.customers) {
    const int revisits = std::max(0, c.visits - 1);
    m.returning_visits += revisits;
    if (c.task == Task::Advanced) {
      ++m.advanced_customers;
      ++m.advanced_revisits[static_cast<std::size_t>(std::min(revisits, 2))];
    }
    if (c.completion > 0) {
      const int delta = c.completion - c.deadline;
      ++m.completion_delta[delta];
      if (delta <= 0) ++m.on_time;
      delay += std::max(0, delta);
    }
    const auto cell = static_cast<std::size_t>(grid.cell_of(c.location));
    m.grid_inconvenience[cell] += c.inconvenience;
    ++m.grid_customers[cell];
  }
  m.total_inconvenience = episode.total_inconvenience();
  if (m.customers > 0) {
    m.mean_inconvenience = m.total_inconvenience / m.customers;
    m.mean_delay = delay / m.customers;
  }

  const double limit = realization.config.work_limit_minutes;
  double running = 0.0;
  for (const PeriodTrace& p : episode.periods) {
    for (double minutes : p.minutes_worked) m.technician_days += minutes / limit;
    running += p.realized_cost;
    m.cumulative_inconvenience.push_back(
        m.customers > 0 ? running / m.customers : 0.0);
  }
  return m;
}

double technician_days_from_routes(const EpisodeResult& episode,
                                   const InstanceRealization& realization) {
  if (episode.decisions.size() != episode.periods.size())
    throw ConfigError("episode was run without keeping decisions");
  const TravelParams params = realization.config.travel();
  std::vector<Customer> all;
  for (const auto& day : realization.arrivals)
    all.insert(all.end(), day.begin(), day.end());
  std::sort(all.begin(), all.end(),
            [](const Customer& a, const Customer& b) { return a.id < b.id; });
  const TravelModel model(params, all);
  double days = 0.0;
  for (const Decision& d : episode.decisions)
    for (const auto& [tech, route] : d.routes)
      days += route_duration(route, model) / params.work_limit_minutes;
  return days;
}

Estimate estimate(const std::vector<double>& values) {
  Estimate e;
  if (values.empty()) return e;
  const double n = static_cast<double>(values.size());
  e.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - e.mean) * (v - e.mean);
    e.standard_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return e;
}

MetricsReport aggregate(std::string policy, std::vector<InstanceMetrics> rows,
                        const GridSpec& grid) {
  std::sort(rows.begin(), rows.end(),
            [](const InstanceMetrics& a, const InstanceMetrics& b) {
              if (a.name != b.name) return a.name < b.name;
              return a.seed < b.seed;
            });
  MetricsReport r;
  r.policy = std::move(policy);
  r.instances = rows.size();
  r.grid = grid;
  const auto cells = static_cast<std::size_t>(grid.cells * grid.cells);
  std::vector<double> grid_sum(cells, 0.0);
  r.grid_customers.assign(cells, 0);

  std::vector<double> inc, delay, returning, leftover, tech_days;
  std::array<double, 3> revisits{};
  double advanced = 0.0, completed = 0.0, on_time = 0.0;
  std::map<int, double> deltas;
  std::size_t horizon = 0;
  for (const InstanceMetrics& m : rows)
    horizon = std::max(horizon, m.cumulative_inconvenience.size());
  r.cumulative_inconvenience.assign(horizon, 0.0);

  for (const InstanceMetrics& m : rows) {
    inc.push_back(m.mean_inconvenience);
    delay.push_back(m.mean_delay);
    returning.push_back(m.returning_visits);
    leftover.push_back(m.leftover_days);
    tech_days.push_back(m.technician_days);
    for (std::size_t k = 0; k < 3; ++k) revisits[k] += m.advanced_revisits[k];
    advanced += m.advanced_customers;
    on_time += m.on_time;
    for (const auto& [d, n] : m.completion_delta) {
      deltas[d] += n;
      completed += n;
    }
    // Finished episodes keep their final cumulative value.
    for (std::size_t t = 0; t < horizon; ++t) {
      double v = 0.0;
      if (!m.cumulative_inconvenience.empty())
        v = t < m.cumulative_inconvenience.size()
                ? m.cumulative_inconvenience[t]
                : m.cumulative_inconvenience.back();
      r.cumulative_inconvenience[t] += v;
    }
    if (m.grid_inconvenience.size() == cells) {
      for (std::size_t c = 0; c < cells; ++c) {
        grid_sum[c] += m.grid_inconvenience[c];
        r.grid_customers[c] += m.grid_customers[c];
      }
    }
    if (m.divergent) ++r.divergent;
  }
  r.inconvenience = estimate(inc);
  r.delay = estimate(delay);
  r.returning_visits = estimate(returning);
  r.leftover_days = estimate(leftover);
  r.technician_days = estimate(tech_days);
  if (advanced > 0)
    for (std::size_t k = 0; k < 3; ++k) r.revisit_share[k] = revisits[k] / advanced;
  if (completed > 0) {
    r.on_time_share = on_time / completed;
    for (const auto& [d, n] : deltas) r.completion_delta_share[d] = n / completed;
  }
  if (!rows.empty())
    for (double& v : r.cumulative_inconvenience) v /= static_cast<double>(rows.size());
  r.grid_mean.assign(cells, 0.0);
  for (std::size_t c = 0; c < cells; ++c)
    if (r.grid_customers[c] > 0) r.grid_mean[c] = grid_sum[c] / r.grid_customers[c];
  r.per_instance = std::move(rows);
  return r;
}

double depot_distance_correlation(const MetricsReport& report) {
  const int n = report.grid.cells;
  const double size = report.grid.side_km / n;
  const Point center{report.grid.side_km / 2.0, report.grid.side_km / 2.0};
  std::vector<double> xs, ys;
  for (int row = 0; row < n; ++row)
    for (int col = 0; col < n; ++col) {
      const auto c = static_cast<std::size_t>(row * n + col);
      if (report.grid_customers[c] == 0) continue;
      const Point mid{(col + 0.5) * size, (row + 0.5) * size};
      xs.push_back(distance_km(mid, center));
      ys.push_back(report.grid_mean[c]);
    }
  if (xs.size() < 2) return 0.0;
  const double k = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / k;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / k;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace techroute
