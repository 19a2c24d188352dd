#pragma once

// Reduction of multiparty sessions up to structural congruence, and the
// breadth-first search for reachable stuck states.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "mpst/errors.hpp"
#include "mpst/expr.hpp"
#include "mpst/syntax.hpp"

namespace mpst {

/// A session in congruence normal form: members sorted by participant,
/// `0` members dropped (the sentinel `@_ 0` stands for the empty session),
/// external choices sorted at every depth and recursion unfolded at the
/// head of each member. Congruent sessions have equal states.
class SessionState {
 public:
  using Member = std::pair<Participant, ProcPtr>;

  static SessionState from(const Session& m);
  static SessionState from(std::vector<Member> members);

  const std::vector<Member>& members() const { return members_; }
  /// nullptr when p has no (non-0) process.
  ProcPtr process(const Participant& p) const;
  std::size_t hash() const { return hash_; }

  bool operator==(const SessionState& other) const;

 private:
  std::vector<Member> members_;
  std::size_t hash_ = 0;
};

struct SessionStateHash {
  std::size_t operator()(const SessionState& s) const { return s.hash(); }
};

std::string print(const SessionState& s);

/// Congruence normal form of a single process.
ProcPtr canonical(const ProcPtr& p);

struct Step {
  enum class Rule { Comm, TrueCond, FalseCond };

  Rule rule;
  Participant sender;    ///< acting participant for conditionals
  Participant receiver;  ///< same as sender for conditionals
  Label label;           ///< empty for conditionals
  Value value;           ///< communicated value or guard outcome
};

const char* to_string(Step::Rule rule);
/// `q --l(v)--> p` for a communication, `p --if(true)--> p` for a
/// conditional.
std::string to_string(const Step& s);

/// Every one-step reduct, in a fixed order: conditionals then
/// communications, participants in order, values in order.
std::vector<std::pair<Step, SessionState>> step_all(const SessionState& s);

bool is_terminated(const SessionState& s);
/// Not terminated and without reducts.
bool is_stuck(const SessionState& s);

struct StuckReport {
  enum class Verdict {
    Terminated,         ///< explored completely, acyclic, no stuck state
    StuckFound,         ///< trace leads to a stuck state
    NoStuckWithinFuel,  ///< explored completely, has cycles, no stuck state
    Diverged,           ///< fuel ran out before exploration finished
  };

  Verdict verdict;
  std::vector<Step> trace;           ///< shortest path to the stuck state
  std::vector<SessionState> states;  ///< states along the trace, initial first
  std::size_t expanded = 0;          ///< states whose reducts were computed
  std::size_t discovered = 0;        ///< distinct states seen
};

const char* to_string(StuckReport::Verdict v);

/// Fuel is not positive.
class FuelMisuse : public Error {
 public:
  using Error::Error;
};

/// Breadth-first search expanding at most `fuel` states. Each level of the
/// frontier computes its reducts in parallel (OpenMP); merging is done in
/// frontier order so the report equals that of stuck_search_serial.
StuckReport stuck_search(const SessionState& init, std::size_t fuel);

/// Plain queue-based reference implementation.
StuckReport stuck_search_serial(const SessionState& init, std::size_t fuel);

struct RunResult {
  enum class Outcome { Terminated, Stuck, OutOfFuel };

  Outcome outcome;
  std::vector<Step> trace;
  SessionState final_state;
};

const char* to_string(RunResult::Outcome o);

/// Follows the first reduct of step_all for at most `fuel` steps.
RunResult run(const SessionState& init, std::size_t fuel);

}  // namespace mpst
