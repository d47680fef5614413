#include "techroute/features.hpp"

#include <vector>

namespace techroute {

namespace {
constexpr std::array<std::string_view, kFeatureCount> kNames = {
    "period",
    "count_easy",
    "count_advanced",
    "available_regular",
    "available_expert",
    "depot_distance_easy",
    "depot_distance_advanced",
    "pairwise_distance_easy",
    "pairwise_distance_advanced",
    "non_urgent_easy",
    "non_urgent_advanced",
    "overdue_easy",
    "overdue_advanced",
    "mean_periods_overdue",
};

double mean_pairwise(const std::vector<Point>& pts) {
  if (pts.size() < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b)
      sum += distance_km(pts[a], pts[b]);
  const double pairs = 0.5 * static_cast<double>(pts.size()) *
                       static_cast<double>(pts.size() - 1);
  return sum / pairs;
}

double mean_cross(const std::vector<Point>& a, const std::vector<Point>& b) {
  if (a.empty() || b.empty()) return 0.0;
  double sum = 0.0;
  for (const Point& p : a)
    for (const Point& q : b) sum += distance_km(p, q);
  return sum / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}
}  // namespace

std::string_view feature_name(std::size_t index) {
  return index < kNames.size() ? kNames[index] : "unknown";
}

std::string_view feature_name(Feature feature) {
  return feature_name(static_cast<std::size_t>(feature));
}

FeatureVector extract_features(const DecisionState& state, SpreadMode spread) {
  FeatureVector f{};
  auto at = [&f](Feature k) -> double& {
    return f[static_cast<std::size_t>(k)];
  };
  at(Feature::Period) = state.period;
  for (const Technician& tech : state.available)
    at(tech.skill == Skill::Regular ? Feature::AvailableRegular
                                    : Feature::AvailableExpert) += 1.0;

  std::vector<Point> easy, advanced;
  double depot_easy = 0.0, depot_adv = 0.0, overdue_periods = 0.0;
  int overdue_total = 0;
  for (const Customer& c : state.customers) {
    const bool is_easy = c.task == Task::Easy;
    const double d = distance_km(c.location, state.travel.depot);
    (is_easy ? easy : advanced).push_back(c.location);
    (is_easy ? depot_easy : depot_adv) += d;
    if (c.deadline > state.period) {
      at(is_easy ? Feature::NonUrgentEasy : Feature::NonUrgentAdvanced) += 1.0;
    } else {
      at(is_easy ? Feature::OverdueEasy : Feature::OverdueAdvanced) += 1.0;
      overdue_periods += state.period - c.deadline;
      ++overdue_total;
    }
  }
  at(Feature::CountEasy) = static_cast<double>(easy.size());
  at(Feature::CountAdvanced) = static_cast<double>(advanced.size());
  if (!easy.empty())
    at(Feature::DepotDistanceEasy) = depot_easy / static_cast<double>(easy.size());
  if (!advanced.empty())
    at(Feature::DepotDistanceAdvanced) =
        depot_adv / static_cast<double>(advanced.size());
  if (spread == SpreadMode::WithinGroup) {
    at(Feature::PairwiseDistanceEasy) = mean_pairwise(easy);
    at(Feature::PairwiseDistanceAdvanced) = mean_pairwise(advanced);
  } else {
    const double cross = mean_cross(easy, advanced);
    at(Feature::PairwiseDistanceEasy) = cross;
    at(Feature::PairwiseDistanceAdvanced) = cross;
  }
  if (overdue_total > 0)
    at(Feature::MeanPeriodsOverdue) = overdue_periods / overdue_total;
  return f;
}

}  // namespace techroute
