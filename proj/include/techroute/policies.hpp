#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "techroute/domain.hpp"

namespace techroute {

struct PolicyModel;

/// Which (skill, task) pairs a policy may assign.
enum class EligibilityMask {
  AllPairs,   // EF, MYEF, SB, DB
  SafeOnly,   // SF, MYSF: no regular technician on an advanced task
  Exclusive,  // EX, MYEX: regular <-> easy, expert <-> advanced
};

bool allows(EligibilityMask mask, Skill skill, Task task);

enum class PolicyKind { MYSF, MYEX, MYEF, SF, EX, EF, SB, DB };

std::string_view to_string(PolicyKind kind);

struct Policy {
  PolicyKind kind = PolicyKind::SB;
  double alpha = 0.33;                       // SB only
  std::shared_ptr<const PolicyModel> model;  // DB only
  std::string model_path;                    // DB only, informational

  static Policy static_balance(double alpha);
  static Policy dynamic_balance(std::shared_ptr<const PolicyModel> model);
  static Policy benchmark(PolicyKind kind);

  /// mysf|myex|myef|sf|ex|ef|sb:<alpha>|db:<model-path>. DB specs load the
  /// model file. Throws ConfigError on malformed specs.
  static Policy parse(std::string_view spec);
  std::string spec() const;
  bool deterministic() const { return true; }
};

/// Iterative score-based assignment: at each step commits the feasible
/// mask-permitted (customer, technician) insertion with the highest score
/// (ties: lowest customer id, then lowest technician id). Stops when the pool
/// is empty or no feasible candidate remains.
Decision decide_score_based(const DecisionState& state, double alpha,
                            EligibilityMask mask);

/// Iterative greedy on (oldest deadline, then smallest insertion time) for
/// MYSF, MYEX and MYEF.
Decision decide_myopic_deadline_first(const DecisionState& state,
                                      EligibilityMask mask);

/// Global greedy on the smallest insertion time, ignoring deadlines and risk
/// (SF, EX, EF).
Decision decide_efficiency_only(const DecisionState& state,
                                EligibilityMask mask);

/// Routes to the matching decide_* call. DB evaluates alpha once per state.
/// Throws ConfigError for a DB policy without a model.
Decision dispatch(const Policy& policy, const DecisionState& state);

/// The alpha a balance policy uses in `state` (nullopt for benchmarks).
std::optional<double> policy_alpha(const Policy& policy,
                                   const DecisionState& state);

}  // namespace techroute
