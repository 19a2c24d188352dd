#pragma once

// Characteristic global types and processes, the counterexample sessions
// built from them, and the preciseness harnesses.

#include <cstddef>
#include <optional>

#include "mpst/errors.hpp"
#include "mpst/runtime.hpp"
#include "mpst/subtype.hpp"
#include "mpst/syntax.hpp"

namespace mpst {

/// The participant handed to char_global already occurs in the type.
class ParticipantClash : public Error {
 public:
  using Error::Error;
};

/// G(T, p). After each communication between p and some q in pt(T), q
/// starts a round of bool messages through pt(T) (sorted) that comes back
/// to q. `relay = false` omits those rounds; it exists to show why they
/// are needed and is not a characteristic global type.
GlobalPtr char_global(const TypePtr& t, const Participant& p, bool relay = true);

/// P(T): inputs probe the received value with a guard that only evaluates
/// at the right sort, outputs send 5, -5 or true, unions become
/// `if true (+) false` cascades, μt becomes μX_t.
ProcPtr char_proc(const TypePtr& t);

/// Process variable standing for type variable t in char_proc.
Name char_proc_var(const Name& t);

/// First of `_c0`, `_c1`, ... in neither pt(T) nor pt(T').
Participant fresh_participant(const TypePtr& t, const TypePtr& tp);

/// @p P(T) || Π @p_i P(G(T', p) projected onto p_i) for p_i in pt(T').
/// Throws InternalError if a projection is undefined.
Session counterexample_session(const TypePtr& t, const TypePtr& tp, const Participant& p);

/// The members other than p of counterexample_session.
std::vector<std::pair<Participant, ProcPtr>> char_context(const TypePtr& tp, const Participant& p);

struct PrecisenessReport {
  enum class Outcome {
    Confirmed,     ///< leq and safe, or nleq and stuck
    Contradicted,  ///< the observed behaviour disagrees with the verdict
    Inconclusive,  ///< the search ran out of fuel
  };

  Outcome outcome;
  Decision decision;
  Participant probe;       ///< the fresh participant playing T
  Session session;         ///< the session that was searched
  StuckReport search;
  bool context_typed = true;  ///< leq only: the context types with P(T')
};

const char* to_string(PrecisenessReport::Outcome o);

/// Leq: P(T) placed in the characteristic context of T' is never stuck,
/// and that context is well typed with P(T'). Nleq: the counterexample
/// session gets stuck.
PrecisenessReport preciseness_check(const TypePtr& t, const TypePtr& tp, std::size_t fuel);

/// ⊢ P(T) : T' implies T <= T'.
bool denotational_probe(const TypePtr& t, const TypePtr& tp);

}  // namespace mpst
