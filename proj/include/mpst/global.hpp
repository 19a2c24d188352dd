#pragma once

// Projection of global types, the merge operator, consumption of a
// communication and the induced reduction of global types.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mpst/syntax.hpp"

namespace mpst {

struct CommAction {
  Participant sender;
  Label label;
  Participant receiver;

  auto operator<=>(const CommAction&) const = default;
};

std::string to_string(const CommAction& a);

/// Equal regular trees give the first argument; two intersections from the
/// same sender with disjoint labels give their union; undefined otherwise.
std::optional<TypePtr> merge(const TypePtr& a, const TypePtr& b);

/// G projected onto r. Throws ProjectionError (MergeUndefined,
/// UnguardedResult) with the branch path leading to the failure.
TypePtr project(const GlobalPtr& g, const Participant& r);

/// Checks that all branches of every communication p -> q involve the
/// same participants besides p and q; throws
/// ProjectionError(ParticipantMismatch) otherwise.
void check_branch_participants(const GlobalPtr& g);

/// Projections onto every participant of g, after the branch-participant
/// check. Participants reached through recursion variables count, so a
/// loop body entered from several places is projected for all of them. Throws ProjectionError on the first failure.
std::map<Participant, TypePtr> project_all(const GlobalPtr& g);

bool projectable(const GlobalPtr& g);

/// G \ a. A recursive root is unfolded before consuming; nullopt when the
/// consumption is undefined (end, a type variable, or a loop never reaching
/// the action).
std::optional<GlobalPtr> consume(const GlobalPtr& g, const CommAction& a);

/// Every action enabled at the frontier of g (its participants not blocked
/// by an earlier communication) together with the consumed global type.
std::vector<std::pair<CommAction, GlobalPtr>> global_step(const GlobalPtr& g);

}  // namespace mpst
