#pragma once

#include <array>
#include <string_view>

#include "techroute/domain.hpp"

namespace techroute {

inline constexpr std::size_t kFeatureCount = 14;

enum class Feature : std::size_t {
  Period = 0,
  CountEasy,
  CountAdvanced,
  AvailableRegular,
  AvailableExpert,
  DepotDistanceEasy,
  DepotDistanceAdvanced,
  PairwiseDistanceEasy,
  PairwiseDistanceAdvanced,
  NonUrgentEasy,
  NonUrgentAdvanced,
  OverdueEasy,
  OverdueAdvanced,
  MeanPeriodsOverdue,
};

using FeatureVector = std::array<double, kFeatureCount>;

std::string_view feature_name(Feature feature);
std::string_view feature_name(std::size_t index);

/// How the two spatial-spread features are read.
enum class SpreadMode {
  WithinGroup,  // mean pairwise distance inside the easy / advanced sets
  CrossGroup,   // mean easy-advanced distance, stored in both slots
};

/// State features. Empty sets yield 0 for mean-distance features; the mean
/// overdue length is 0 when nothing is overdue. "Overdue" means the deadline
/// is due now or has passed (deadline <= t).
FeatureVector extract_features(const DecisionState& state,
                               SpreadMode spread = SpreadMode::WithinGroup);

}  // namespace techroute
