#include "mpst/characteristic.hpp"

#include <algorithm>
#include <set>

#include "mpst/global.hpp"
#include "mpst/text.hpp"
#include "mpst/typing.hpp"

namespace mpst {

namespace {

GlobalPtr char_global_at(const TypePtr& t, const Participant& p, const std::vector<Participant>& ring, bool relay) {
  switch (t->kind) {
    case TypeKind::End: return GlobalType::end();
    case TypeKind::Var: return GlobalType::var(t->name);
    case TypeKind::Rec: return GlobalType::rec(t->name, char_global_at(t->body, p, ring, relay));
    case TypeKind::Inter:
    case TypeKind::Union: break;
  }
  const Participant& q = t->name;
  const std::size_t n = ring.size();
  const std::size_t j0 = static_cast<std::size_t>(std::find(ring.begin(), ring.end(), q) - ring.begin());
  std::vector<GlobalBranch> branches;
  for (const auto& b : t->branches) {
    GlobalPtr cont = char_global_at(b.cont, p, ring, relay);
    if (relay && n > 1) {
      for (std::size_t k = n; k-- > 0;) {
        cont = GlobalType::message(ring[(j0 + k) % n], ring[(j0 + k + 1) % n], b.label, Sort::Bool, cont);
      }
    }
    branches.push_back({b.label, b.sort, cont});
  }
  return t->kind == TypeKind::Inter ? GlobalType::comm(q, p, std::move(branches))
                                    : GlobalType::comm(p, q, std::move(branches));
}

ProcPtr probe_input(const Participant& from, const TypeBranch& b) {
  ExprPtr x = Expr::var("x");
  ExprPtr guard;
  switch (b.sort) {
    case Sort::Nat: guard = Expr::greater(Expr::succ(x), Expr::nat(0)); break;
    case Sort::Int: guard = Expr::greater(Expr::neg(x), Expr::nat(0)); break;
    case Sort::Bool: guard = Expr::logical_not(x); break;
  }
  ProcPtr cont = char_proc(b.cont);
  return Process::input(from, b.label, "x", Process::cond(guard, cont, cont));
}

ExprPtr sample(Sort s) {
  switch (s) {
    case Sort::Nat: return Expr::nat(5);
    case Sort::Int: return Expr::integer(-5);
    case Sort::Bool: return Expr::boolean(true);
  }
  return nullptr;
}

}  // namespace

GlobalPtr char_global(const TypePtr& t, const Participant& p, bool relay) {
  const auto pts = participants(t);
  if (pts.count(p)) throw ParticipantClash("participant " + p + " occurs in '" + print(t) + "'");
  return char_global_at(t, p, std::vector<Participant>(pts.begin(), pts.end()), relay);
}

Name char_proc_var(const Name& t) { return "X_" + t; }

ProcPtr char_proc(const TypePtr& t) {
  switch (t->kind) {
    case TypeKind::End: return Process::inact();
    case TypeKind::Var: return Process::var(char_proc_var(t->name));
    case TypeKind::Rec: return Process::rec(char_proc_var(t->name), char_proc(t->body));
    case TypeKind::Inter: {
      std::vector<ProcPtr> summands;
      for (const auto& b : t->branches) summands.push_back(probe_input(t->name, b));
      return Process::choice(std::move(summands));
    }
    case TypeKind::Union: {
      // Right-nested: the last branch is the innermost else.
      ProcPtr acc;
      for (auto b = t->branches.rbegin(); b != t->branches.rend(); ++b) {
        ProcPtr out = Process::output(t->name, b->label, sample(b->sort), char_proc(b->cont));
        acc = acc ? Process::cond(Expr::choice(Expr::boolean(true), Expr::boolean(false)), out, acc) : out;
      }
      return acc;
    }
  }
  throw InternalError("unknown session type kind");
}

Participant fresh_participant(const TypePtr& t, const TypePtr& tp) {
  std::set<Participant> taken = participants(t);
  auto more = participants(tp);
  taken.insert(more.begin(), more.end());
  for (std::size_t i = 0;; ++i) {
    Participant c = "_c" + std::to_string(i);
    if (!taken.count(c)) return c;
  }
}

std::vector<std::pair<Participant, ProcPtr>> char_context(const TypePtr& tp, const Participant& p) {
  GlobalPtr g = char_global(tp, p);
  std::vector<std::pair<Participant, ProcPtr>> members;
  for (const auto& q : participants(tp)) {
    try {
      members.emplace_back(q, char_proc(project(g, q)));
    } catch (const ProjectionError& e) {
      throw InternalError(std::string("characteristic global type is not projectable: ") + e.what());
    }
  }
  return members;
}

Session counterexample_session(const TypePtr& t, const TypePtr& tp, const Participant& p) {
  auto members = char_context(tp, p);
  members.emplace_back(p, char_proc(t));
  return Session::make(std::move(members));
}

const char* to_string(PrecisenessReport::Outcome o) {
  switch (o) {
    case PrecisenessReport::Outcome::Confirmed: return "confirmed";
    case PrecisenessReport::Outcome::Contradicted: return "contradicted";
    case PrecisenessReport::Outcome::Inconclusive: return "inconclusive";
  }
  return "?";
}

PrecisenessReport preciseness_check(const TypePtr& t, const TypePtr& tp, std::size_t fuel) {
  Decision decision = decide(t, tp);
  Participant p = fresh_participant(t, tp);
  Session session = counterexample_session(t, tp, p);
  bool typed = true;
  if (decision.leq) {
    auto members = char_context(tp, p);
    members.emplace_back(p, char_proc(tp));
    typed = well_typed(Session::make(std::move(members)), char_global(tp, p));
  }
  StuckReport search = stuck_search(SessionState::from(session), fuel);
  using O = PrecisenessReport::Outcome;
  O outcome;
  if (search.verdict == StuckReport::Verdict::Diverged) {
    outcome = O::Inconclusive;
  } else {
    bool stuck = search.verdict == StuckReport::Verdict::StuckFound;
    outcome = (decision.leq ? !stuck && typed : stuck) ? O::Confirmed : O::Contradicted;
  }
  return PrecisenessReport{outcome, std::move(decision), p, std::move(session), std::move(search), typed};
}

bool denotational_probe(const TypePtr& t, const TypePtr& tp) { return !well_typed(char_proc(t), tp) || sub(t, tp); }

}  // namespace mpst
