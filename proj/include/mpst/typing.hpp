#pragma once

// Algorithmic typing of processes against session types and of sessions
// against global types. Subsumption is folded into the syntax-directed
// rules; see check_process for how each process form is handled.

#include "mpst/expr.hpp"
#include "mpst/syntax.hpp"

namespace mpst {

/// Γ ⊢ P : T. Throws TypeError naming the failing rule and the path to
/// the offending subterm.
///
/// Input and choice: T's head must be an intersection from the same sender,
/// each of its labels offered by a summand (checked with x at T's sort),
/// the remaining summands only need to be typable on their own.
/// Output: T's head must be a union offering the label at a wider sort.
/// Conditional: both branches are checked against T.
/// Recursion: checked coinductively by unfolding; mu X. P met again against
/// the same type on the current path is assumed.
void check_process(const Env& env, const ProcPtr& p, const TypePtr& t);

/// A type T with Γ ⊢ P : T. The branches of nested conditionals are
/// synthesized together, so a label's input sort must suit all of them;
/// binders try int, then bool, then nat. Not principal: a binder that is
/// never used fits int and bool, which have no common sort above them.
/// Throws TypeError (NoSort, IllegalUnion, IllegalIntersection, ...).
TypePtr synthesize_process(const Env& env, const ProcPtr& p);

/// ⊢ M : G. pt(G) must be covered by M and every member must check against
/// its projection. Throws TypeError (Unprojectable, ParticipantMissing,
/// MemberIllTyped with the participant as first path step).
void check_session(const Session& m, const GlobalPtr& g);

bool well_typed(const ProcPtr& p, const TypePtr& t);
bool well_typed(const Session& m, const GlobalPtr& g);

}  // namespace mpst
