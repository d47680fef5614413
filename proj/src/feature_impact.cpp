#include "techroute/evaluation.hpp"

#include <exception>
#include <numeric>

#include "techroute/errors.hpp"
#include "techroute/simulation.hpp"

namespace techroute {

namespace {

struct VisitedState {
  std::vector<double> values;  // the features, then total available
  double alpha = 0.0;
};

double percent_change(double part, double whole) {
  return whole != 0.0 ? (part / whole - 1.0) * 100.0 : 0.0;
}

}  // namespace

FeatureImpactTable feature_impact_table(const PolicyModel& model,
                                        const std::vector<NamedInstance>& set) {
  if (set.empty()) throw ConfigError("feature impact needs at least one instance");
  std::vector<std::vector<VisitedState>> per_instance(set.size());
  std::vector<std::exception_ptr> errors(set.size());
  const int n = static_cast<int>(set.size());
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < n; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    try {
      auto& states = per_instance[idx];
      run_episode(set[idx].realization, [&](const DecisionState& s) {
        const FeatureVector f = extract_features(s, model.spread);
        VisitedState v;
        v.values.assign(f.begin(), f.end());
        v.values.push_back(static_cast<double>(s.available.size()));
        v.alpha = lambda_deterministic(model, s);
        const double alpha = v.alpha;
        states.push_back(std::move(v));
        return decide_score_based(s, alpha, EligibilityMask::AllPairs);
      });
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<VisitedState> states;
  for (auto& v : per_instance)
    states.insert(states.end(), std::make_move_iterator(v.begin()),
                  std::make_move_iterator(v.end()));

  FeatureImpactTable table;
  table.states = states.size();
  if (states.size() < kMinimumImpactStates)
    table.warnings.push_back("only " + std::to_string(states.size()) +
                             " states visited; impacts have little statistical power");
  if (states.empty()) return table;

  double alpha_sum = 0.0;
  for (const auto& s : states) alpha_sum += s.alpha;
  table.mean_alpha = alpha_sum / static_cast<double>(states.size());

  const std::size_t columns = kFeatureCount + 1;
  for (std::size_t k = 0; k < columns; ++k) {
    FeatureImpactRow row;
    row.feature = k < kFeatureCount ? std::string(feature_name(k)) : "available_total";
    double sum = 0.0;
    for (const auto& s : states) sum += s.values[k];
    row.mean_value = sum / static_cast<double>(states.size());
    double below = 0.0, above = 0.0;
    for (const auto& s : states) {
      if (s.values[k] < row.mean_value) {
        below += s.alpha;
        ++row.below_states;
      } else if (s.values[k] > row.mean_value) {
        above += s.alpha;
        ++row.above_states;
      }
    }
    if (row.below_states > 0)
      row.below_percent =
          percent_change(below / static_cast<double>(row.below_states), table.mean_alpha);
    if (row.above_states > 0)
      row.above_percent =
          percent_change(above / static_cast<double>(row.above_states), table.mean_alpha);
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace techroute
