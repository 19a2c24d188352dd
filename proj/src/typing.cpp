#include "mpst/typing.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>

#include "mpst/errors.hpp"
#include "mpst/global.hpp"
#include "mpst/subtype.hpp"
#include "mpst/text.hpp"

namespace mpst {

namespace {

using Kind = TypeError::Kind;

template <class F>
auto within(const std::string& step, F body) -> decltype(body()) {
  try {
    return body();
  } catch (const TypeError& e) {
    throw e.within(step);
  }
}

std::string input_step(const Process& p) { return p.peer + "?" + p.label + "(" + p.name + ")"; }
std::string output_step(const Process& p) { return p.peer + "!" + p.label + "(" + print(p.expr) + ")"; }

std::vector<ProcPtr> summands(const ProcPtr& p) {
  return p->kind == ProcKind::Choice ? p->kids : std::vector<ProcPtr>{p};
}

[[noreturn]] void shape(const char* rule, const std::string& wanted, const TypePtr& t) {
  throw TypeError(Kind::ShapeMismatch, rule, {}, "expected " + wanted + ", got '" + print(t) + "'");
}

void require_bool(const Env& env, const ExprPtr& e) {
  Sort s = within("if " + print(e), [&] { return infer_sort(env, e); });
  if (s != Sort::Bool) {
    throw TypeError(Kind::SortMismatch, "t-cond", {"if " + print(e)},
                    "guard has sort " + std::string(to_string(s)) + ", expected bool");
  }
}

// Summands of an external choice must all be inputs from one participant
// with pairwise distinct labels.
Participant input_sender(const std::vector<ProcPtr>& parts) {
  std::set<Label> seen;
  for (const auto& s : parts) {
    if (s->kind != ProcKind::Input) {
      throw TypeError(Kind::ShapeMismatch, "t-in-choice", {}, "summand '" + print(s) + "' is not an input");
    }
    if (s->peer != parts.front()->peer) {
      throw TypeError(Kind::IllegalIntersection, "t-in-choice", {},
                      "summands receive from both " + parts.front()->peer + " and " + s->peer);
    }
    if (!seen.insert(s->label).second) {
      throw TypeError(Kind::DuplicateLabel, "t-in-choice", {}, "label '" + s->label + "' offered twice");
    }
  }
  return parts.front()->peer;
}

TypePtr synthesize_input(const Env& env, const ProcPtr& s) {
  std::string first_failure;
  for (Sort sort : {Sort::Int, Sort::Bool, Sort::Nat}) {
    try {
      TypePtr cont = synthesize_process(env.with_value(s->name, sort), s->body());
      return SessionType::input(s->peer, s->label, sort, cont);
    } catch (const TypeError& e) {
      if (first_failure.empty()) first_failure = e.what();
    }
  }
  throw TypeError(Kind::NoSort, "t-in-choice", {input_step(*s)},
                  "no sort for '" + s->name + "' types the continuation (with int: " + first_failure + ")");
}

// Coinductive upper bound for recursive types: each pair of subterms met
// again becomes a recursion variable. Sort conflicts in intersections drop
// the label.
class RecursiveBound {
 public:
  std::optional<TypePtr> run(const TypePtr& a, const TypePtr& b) {
    try {
      return go(a, b);
    } catch (const Abort&) {
      return std::nullopt;
    }
  }

 private:
  struct Abort {};
  struct Slot {
    Name var;
    bool used = false;
  };

  std::optional<TypePtr> go(const TypePtr& a, const TypePtr& b) {
    if (regular_tree_equal(a, b)) return a;
    for (auto& [key, slot] : open_) {
      if (regular_tree_equal(key.first, a) && regular_tree_equal(key.second, b)) {
        slot.used = true;
        return SessionType::var(slot.var);
      }
    }
    TypePtr x = unfold_head(a), y = unfold_head(b);
    if (x->kind != y->kind || x->name != y->name ||
        (x->kind != TypeKind::Union && x->kind != TypeKind::Inter)) {
      return std::nullopt;
    }
    open_.push_back({{a, b}, Slot{"u" + std::to_string(counter_++)}});
    std::vector<TypeBranch> branches;
    bool failed = false;
    for (const auto& br : x->branches) {
      const TypeBranch* other = y->find(br.label);
      if (!other) {
        if (x->kind == TypeKind::Union) branches.push_back(br);
        continue;
      }
      std::optional<Sort> s = x->kind == TypeKind::Union ? join(br.sort, other->sort)
                              : subsort(br.sort, other->sort) ? std::optional<Sort>(br.sort)
                              : subsort(other->sort, br.sort) ? std::optional<Sort>(other->sort)
                                                              : std::nullopt;
      auto cont = s ? go(br.cont, other->cont) : std::nullopt;
      if (s && cont) {
        branches.push_back({br.label, *s, *cont});
      } else if (x->kind == TypeKind::Union) {
        failed = true;
      }
    }
    if (x->kind == TypeKind::Union) {
      for (const auto& br : y->branches) {
        if (!x->find(br.label)) branches.push_back(br);
      }
    }
    Slot slot = open_.back().second;
    open_.pop_back();
    if (failed || branches.empty()) {
      // Someone below already assumed this pair had a bound.
      if (slot.used) throw Abort{};
      return std::nullopt;
    }
    TypePtr body = x->kind == TypeKind::Union ? SessionType::union_of(x->name, std::move(branches))
                                              : SessionType::inter(x->name, std::move(branches));
    return slot.used ? SessionType::rec(slot.var, body) : body;
  }

  std::vector<std::pair<std::pair<TypePtr, TypePtr>, Slot>> open_;
  int counter_ = 0;
};

using Job = std::pair<Env, ProcPtr>;

TypePtr synthesize_many(const std::vector<Job>& jobs);

// Folds separately synthesized types into one both sides are below.
TypePtr upper_bound(const TypePtr& a, const TypePtr& b) {
  if (sub(b, a)) return a;
  if (sub(a, b)) return b;
  if (auto t = RecursiveBound().run(a, b)) return *t;
  throw TypeError(Kind::IllegalUnion, "t-cond", {},
                  "'" + print(a) + "' and '" + print(b) + "' have no common supertype the rules can build");
}

bool same_job(const Job& a, const Job& b) {
  if (!same(a.second, b.second)) return false;
  for (const auto& x : a.second->free_values) {
    if (a.first.value(x) != b.first.value(x)) return false;
  }
  for (const auto& x : a.second->free_processes) {
    if (a.first.process(x) != b.first.process(x)) return false;
  }
  return true;
}

bool contains(const std::vector<Job>& jobs, const Job& j) {
  return std::any_of(jobs.begin(), jobs.end(), [&](const Job& k) { return same_job(k, j); });
}

// Leaves of nested conditionals, each with the environment it runs in.
void flatten(const Job& job, std::vector<Job>& out) {
  const auto& [env, p] = job;
  if (p->kind != ProcKind::Cond) {
    if (!contains(out, job)) out.push_back(job);
    return;
  }
  require_bool(env, p->expr);
  within("then", [&] { flatten({env, p->kids[0]}, out); });
  within("else", [&] { flatten({env, p->kids[1]}, out); });
}

TypePtr synthesize_outputs(const std::vector<Job>& leaves) {
  const Participant& q = leaves.front().second->peer;
  std::vector<Label> order;
  std::map<Label, std::vector<Job>> conts;
  std::map<Label, Sort> sorts;
  for (const auto& [env, p] : leaves) {
    if (p->peer != q) {
      throw TypeError(Kind::IllegalUnion, "t-cond", {}, "branches send to both " + q + " and " + p->peer);
    }
    Sort s = within(output_step(*p), [&] { return infer_sort(env, p->expr); });
    auto [it, fresh] = sorts.emplace(p->label, s);
    if (fresh) {
      order.push_back(p->label);
    } else if (auto j = join(it->second, s)) {
      it->second = *j;
    } else {
      throw TypeError(Kind::IllegalUnion, "t-cond", {output_step(*p)},
                      "label '" + p->label + "' sent with sorts " + std::string(to_string(it->second)) + " and " +
                          std::string(to_string(s)));
    }
    conts[p->label].push_back({env, p->body()});
  }
  std::vector<TypeBranch> branches;
  for (const auto& l : order) {
    TypePtr cont = within(q + "!" + l, [&] { return synthesize_many(conts[l]); });
    branches.push_back({l, sorts[l], cont});
  }
  return SessionType::union_of(q, std::move(branches));
}

// Every leaf offers the labels of the result. A label all leaves offer gets
// one sort that types all its continuations; the others are only checked.
TypePtr synthesize_inputs(const std::vector<Job>& leaves) {
  std::vector<std::vector<ProcPtr>> parts;
  for (const auto& job : leaves) parts.push_back(summands(job.second));
  const Participant q = input_sender(parts.front());
  std::vector<Label> common;
  for (const auto& s : parts.front()) common.push_back(s->label);
  for (const auto& ps : parts) {
    if (input_sender(ps) != q) {
      throw TypeError(Kind::IllegalIntersection, "t-cond", {}, "branches receive from both " + q + " and " + ps.front()->peer);
    }
    std::erase_if(common, [&](const Label& l) {
      return std::none_of(ps.begin(), ps.end(), [&](const ProcPtr& s) { return s->label == l; });
    });
  }
  auto summand = [&](std::size_t i, const Label& l) {
    for (const auto& s : parts[i]) {
      if (s->label == l) return s;
    }
    return ProcPtr{};
  };
  std::vector<TypeBranch> branches;
  for (const auto& l : common) {
    std::optional<TypeBranch> found;
    for (Sort sort : {Sort::Int, Sort::Bool, Sort::Nat}) {
      std::vector<Job> conts;
      for (std::size_t i = 0; i < leaves.size(); ++i) {
        ProcPtr s = summand(i, l);
        conts.push_back({leaves[i].first.with_value(s->name, sort), s->body()});
      }
      try {
        found = TypeBranch{l, sort, synthesize_many(conts)};
        break;
      } catch (const TypeError&) {
      }
    }
    if (found) {
      branches.push_back(*found);
      continue;
    }
    // No shared sort: drop the label if every summand types on its own.
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      ProcPtr s = summand(i, l);
      synthesize_input(leaves[i].first, s);
    }
  }
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    for (const auto& s : parts[i]) {
      if (std::find(common.begin(), common.end(), s->label) == common.end()) synthesize_input(leaves[i].first, s);
    }
  }
  if (branches.empty()) {
    throw TypeError(Kind::IllegalIntersection, "t-cond", {}, "branches share no input label with a common sort");
  }
  return SessionType::inter(q, std::move(branches));
}

TypePtr synthesize_one(const Env& env, const ProcPtr& p) {
  switch (p->kind) {
    case ProcKind::Rec: {
      TypePtr body = within("mu " + p->name, [&] {
        return synthesize_many({{env.with_process(p->name, SessionType::var(p->name)), p->body()}});
      });
      try {
        return SessionType::rec(p->name, body);
      } catch (const ParseError& e) {
        throw TypeError(Kind::ShapeMismatch, "t-rec", {"mu " + p->name}, e.detail());
      }
    }
    case ProcKind::Var:
      if (TypePtr bound = env.process(p->name)) return bound;
      throw TypeError(Kind::UnboundVariable, "t-var", {}, "unbound process variable '" + p->name + "'");
    default: return synthesize_many({{env, p}});
  }
}

// Leaf sets under synthesis that unfolded a recursion. Meeting one again
// closes a loop of the result type.
struct OpenSet {
  std::vector<Job> leaves;
  Name var;
  bool used = false;
};
thread_local std::vector<OpenSet> open_sets;
thread_local int open_counter = 0;

// Leaf sets are deduplicated, so equal sizes and inclusion mean equality.
bool same_jobs(const std::vector<Job>& a, const std::vector<Job>& b) {
  return a.size() == b.size() && std::all_of(a.begin(), a.end(), [&](const Job& j) { return contains(b, j); });
}

TypePtr synthesize_leaves(std::vector<Job> leaves);

// Several leaves with a recursion among them: unfold and synthesize jointly.
TypePtr synthesize_unfolded(const std::vector<Job>& leaves) {
  for (auto& open : open_sets) {
    if (same_jobs(open.leaves, leaves)) {
      open.used = true;
      return SessionType::var(open.var);
    }
  }
  open_sets.push_back({leaves, "v" + std::to_string(open_counter++)});
  std::vector<Job> unfolded;
  try {
    for (const auto& [env, p] : leaves) flatten({env, unfold_head(p)}, unfolded);
    TypePtr body = synthesize_leaves(std::move(unfolded));
    OpenSet done = open_sets.back();
    open_sets.pop_back();
    return done.used ? SessionType::rec(done.var, body) : body;
  } catch (...) {
    open_sets.pop_back();
    throw;
  }
}

// Synthesis over several processes at once, so that the branches of a
// conditional agree on input sorts instead of being joined afterwards.
TypePtr synthesize_many(const std::vector<Job>& jobs) {
  std::vector<Job> leaves;
  for (const auto& job : jobs) flatten(job, leaves);
  return synthesize_leaves(std::move(leaves));
}

TypePtr synthesize_leaves(std::vector<Job> leaves) {
  auto all = [&](auto pred) {
    return std::all_of(leaves.begin(), leaves.end(), [&](const Job& j) { return pred(j.second->kind); });
  };
  if (all([](ProcKind k) { return k == ProcKind::Inact; })) return SessionType::end();
  if (all([](ProcKind k) { return k == ProcKind::Output; })) return synthesize_outputs(leaves);
  if (all([](ProcKind k) { return k == ProcKind::Input || k == ProcKind::Choice; })) return synthesize_inputs(leaves);
  if (leaves.size() == 1) return synthesize_one(leaves.front().first, leaves.front().second);
  bool recursive = std::any_of(leaves.begin(), leaves.end(), [](const Job& j) { return j.second->kind == ProcKind::Rec; });
  bool open_var = std::any_of(leaves.begin(), leaves.end(), [](const Job& j) { return j.second->kind == ProcKind::Var; });
  if (recursive && !open_var) return synthesize_unfolded(leaves);
  std::optional<TypePtr> acc;
  for (const auto& [env, p] : leaves) {
    TypePtr t = synthesize_one(env, p);
    acc = acc ? upper_bound(*acc, t) : t;
  }
  return *acc;
}

void check_inputs(const Env& env, const ProcPtr& p, const TypePtr& t) {
  auto parts = summands(p);
  Participant q = input_sender(parts);
  TypePtr head = unfold_head(t);
  if (head->kind != TypeKind::Inter) shape("t-in-choice", "an input type", t);
  if (head->name != q) {
    throw TypeError(Kind::ShapeMismatch, "t-in-choice", {},
                    "process receives from " + q + " but '" + print(t) + "' receives from " + head->name);
  }
  for (const auto& br : head->branches) {
    bool offered = false;
    for (const auto& s : parts) offered = offered || s->label == br.label;
    if (!offered) {
      throw TypeError(Kind::MissingBranch, "t-in-choice", {},
                      "no summand receives label '" + br.label + "' required by '" + print(t) + "'");
    }
  }
  for (const auto& s : parts) {
    const TypeBranch* br = head->find(s->label);
    within(input_step(*s), [&] {
      if (br) {
        check_process(env.with_value(s->name, br->sort), s->body(), br->cont);
      } else {
        synthesize_input(env, s);
      }
    });
  }
}

void check_output(const Env& env, const ProcPtr& p, const TypePtr& t) {
  TypePtr head = unfold_head(t);
  if (head->kind != TypeKind::Union || head->name != p->peer) {
    shape("t-out", "an output type to " + p->peer, t);
  }
  const TypeBranch* br = head->find(p->label);
  if (!br) {
    throw TypeError(Kind::UnknownLabel, "t-out", {},
                    "label '" + p->label + "' is not among the outputs of '" + print(t) + "'");
  }
  within(output_step(*p), [&] {
    Sort s = infer_sort(env, p->expr);
    if (!subsort(s, br->sort)) {
      throw TypeError(Kind::SortMismatch, "t-out", {},
                      "payload has sort " + std::string(to_string(s)) + ", type expects " +
                          std::string(to_string(br->sort)));
    }
    check_process(env, p->body(), br->cont);
  });
}

thread_local std::vector<std::pair<Job, TypePtr>> assumed;

}  // namespace

void check_process(const Env& env, const ProcPtr& p, const TypePtr& t) {
  switch (p->kind) {
    case ProcKind::Inact:
      if (unfold_head(t)->kind != TypeKind::End) shape("t-0", "end", t);
      return;
    case ProcKind::Input:
    case ProcKind::Choice: check_inputs(env, p, t); return;
    case ProcKind::Output: check_output(env, p, t); return;
    case ProcKind::Cond:
      require_bool(env, p->expr);
      within("then", [&] { check_process(env, p->kids[0], t); });
      within("else", [&] { check_process(env, p->kids[1], t); });
      return;
    case ProcKind::Rec: {
      // Coinductive: a recursion met again against the same type on this
      // path is assumed to check. X may end up checked at several types.
      for (const auto& a : assumed) {
        if (same_job(a.first, {env, p}) && same(a.second, t)) return;
      }
      assumed.push_back({{env, p}, t});
      try {
        within("mu " + p->name, [&] { check_process(env, unfold(p), t); });
      } catch (...) {
        assumed.pop_back();
        throw;
      }
      assumed.pop_back();
      return;
    }
    case ProcKind::Var: {
      TypePtr bound = env.process(p->name);
      if (!bound) {
        throw TypeError(Kind::UnboundVariable, "t-var", {}, "unbound process variable '" + p->name + "'");
      }
      if (!sub(bound, t)) {
        throw TypeError(Kind::ShapeMismatch, "t-var", {},
                        p->name + " has type '" + print(bound) + "', not a subtype of '" + print(t) + "'");
      }
      return;
    }
  }
}

TypePtr synthesize_process(const Env& env, const ProcPtr& p) { return synthesize_many({{env, p}}); }

void check_session(const Session& m, const GlobalPtr& g) {
  std::map<Participant, TypePtr> projections;
  try {
    projections = project_all(g);
  } catch (const ProjectionError& e) {
    throw TypeError(Kind::Unprojectable, "t-sess", {}, e.what());
  }
  for (const auto& [p, t] : projections) {
    if (!m.members().count(p)) {
      throw TypeError(Kind::ParticipantMissing, "t-sess", {}, "participant " + p + " of the protocol has no process");
    }
  }
  for (const auto& [p, proc] : m.members()) {
    TypePtr t;
    if (auto it = projections.find(p); it != projections.end()) {
      t = it->second;
    } else {
      try {
        t = project(g, p);
      } catch (const ProjectionError& e) {
        throw TypeError(Kind::Unprojectable, "t-sess", {"@" + p}, e.what());
      }
    }
    try {
      check_process(Env{}, proc, t);
    } catch (const TypeError& e) {
      std::vector<std::string> path{"@" + p};
      path.insert(path.end(), e.path().begin(), e.path().end());
      throw TypeError(Kind::MemberIllTyped, e.rule(), std::move(path),
                      std::string(to_string(e.kind())) + ": " + e.detail());
    }
  }
}

bool well_typed(const ProcPtr& p, const TypePtr& t) {
  try {
    check_process(Env{}, p, t);
    return true;
  } catch (const TypeError&) {
    return false;
  }
}

bool well_typed(const Session& m, const GlobalPtr& g) {
  try {
    check_session(m, g);
    return true;
  } catch (const TypeError&) {
    return false;
  }
}

}  // namespace mpst
