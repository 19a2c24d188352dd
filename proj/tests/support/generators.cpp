#include "generators.hpp"

#include <algorithm>
#include <functional>
#include <string>

#include "mpst/global.hpp"

namespace mpst::testgen {

namespace {

const char* const kTypePeers[] = {"p", "q", "r"};
const char* const kGlobalPeers[] = {"a", "b", "c", "d"};

Label label(int i) { return "l" + std::to_string(i + 1); }

}  // namespace

int Gen::below(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

bool Gen::chance(double p) { return std::bernoulli_distribution(p)(rng_); }

Sort Gen::sort() { return static_cast<Sort>(below(3)); }

std::vector<Label> Gen::some_labels(const Shape& s, int max_count) {
  std::vector<int> all(s.labels);
  for (int i = 0; i < s.labels; ++i) all[i] = i;
  std::shuffle(all.begin(), all.end(), rng_);
  int n = 1 + below(std::min(max_count, s.labels));
  std::vector<Label> out;
  for (int i = 0; i < n; ++i) out.push_back(label(all[i]));
  return out;
}

TypePtr Gen::type_at(const Shape& s, int depth, std::vector<Name>& vars, bool prefix_only) {
  if (!prefix_only) {
    if (depth <= 0) {
      if (!vars.empty() && chance(0.5)) return SessionType::var(vars[below(static_cast<int>(vars.size()))]);
      return SessionType::end();
    }
    if (chance(0.08)) return SessionType::end();
    if (!vars.empty() && chance(0.15)) return SessionType::var(vars[below(static_cast<int>(vars.size()))]);
    if (s.recursion && depth >= 2 && chance(0.15)) {
      Name t = "t" + std::to_string(vars.size());
      vars.push_back(t);
      TypePtr body = type_at(s, depth - 1, vars, true);
      vars.pop_back();
      return SessionType::rec(t, body);
    }
  }
  Participant peer = kTypePeers[below(s.participants)];
  std::vector<TypeBranch> branches;
  for (const auto& l : some_labels(s, 3)) branches.push_back({l, sort(), type_at(s, depth - 1, vars, false)});
  return chance(0.5) ? SessionType::inter(peer, std::move(branches))
                     : SessionType::union_of(peer, std::move(branches));
}

TypePtr Gen::type(const Shape& s) {
  std::vector<Name> vars;
  return type_at(s, s.depth, vars, false);
}

TypePtr Gen::super_at(const TypePtr& t, const Shape& s, int budget) {
  switch (t->kind) {
    case TypeKind::End:
    case TypeKind::Var: return t;
    case TypeKind::Rec: return SessionType::rec(t->name, super_at(t->body, s, budget));
    case TypeKind::Inter: {
      std::vector<TypeBranch> branches;
      for (const auto& b : t->branches) {
        if (chance(0.25)) continue;  // dropping an input branch only widens
        Sort narrowed = b.sort == Sort::Int && chance(0.4) ? Sort::Nat : b.sort;
        branches.push_back({b.label, narrowed, super_at(b.cont, s, budget)});
      }
      if (branches.empty()) branches.push_back(t->branches.back());
      return SessionType::inter(t->name, std::move(branches));
    }
    case TypeKind::Union: {
      std::vector<TypeBranch> branches;
      for (const auto& b : t->branches) {
        Sort widened = b.sort == Sort::Nat && chance(0.4) ? Sort::Int : b.sort;
        branches.push_back({b.label, widened, super_at(b.cont, s, budget)});
      }
      if (budget > 0 && chance(0.3)) {
        Label extra = label(below(s.labels));
        if (!t->find(extra)) {
          Shape small = s;
          small.depth = 1;
          small.recursion = false;
          branches.push_back({extra, sort(), type(small)});
        }
      }
      return SessionType::union_of(t->name, std::move(branches));
    }
  }
  return t;
}

TypePtr Gen::supertype(const TypePtr& t, const Shape& s) { return super_at(t, s, 2); }

TypePtr Gen::mutate(const TypePtr& t, const Shape& s) {
  switch (below(5)) {
    case 0: return supertype(t, s);
    case 1: return unfold(t);
    default: break;
  }
  // Local edit at a random node.
  int target = below(6);
  std::function<TypePtr(const TypePtr&, int&)> edit = [&](const TypePtr& n, int& k) -> TypePtr {
    if (n->kind == TypeKind::Rec) return SessionType::rec(n->name, edit(n->body, k));
    if (n->kind != TypeKind::Inter && n->kind != TypeKind::Union) return n;
    if (k-- == 0) {
      std::vector<TypeBranch> branches = n->branches;
      auto& b = branches[below(static_cast<int>(branches.size()))];
      switch (below(4)) {
        case 0: b.sort = sort(); break;
        case 1: {
          Label l = label(below(s.labels));
          if (!n->find(l)) b.label = l;
          break;
        }
        case 2: {
          Participant peer = kTypePeers[below(s.participants)];
          return n->kind == TypeKind::Inter ? SessionType::inter(peer, branches)
                                            : SessionType::union_of(peer, branches);
        }
        default:
          return n->kind == TypeKind::Inter ? SessionType::union_of(n->name, branches)
                                            : SessionType::inter(n->name, branches);
      }
      return n->kind == TypeKind::Inter ? SessionType::inter(n->name, branches)
                                        : SessionType::union_of(n->name, branches);
    }
    std::vector<TypeBranch> branches;
    for (const auto& b : n->branches) branches.push_back({b.label, b.sort, edit(b.cont, k)});
    return n->kind == TypeKind::Inter ? SessionType::inter(n->name, branches)
                                      : SessionType::union_of(n->name, branches);
  };
  return edit(t, target);
}

std::pair<TypePtr, TypePtr> Gen::type_pair(const Shape& s) {
  TypePtr t = type(s);
  if (chance(0.5)) return {t, type(s)};
  TypePtr u = mutate(t, s);
  if (chance(0.3)) u = mutate(u, s);
  return chance(0.5) ? std::pair{t, u} : std::pair{u, t};
}

GlobalPtr Gen::global_at(const Shape& s, int depth, std::vector<Name>& vars, bool comm_only) {
  if (!comm_only) {
    if (depth <= 0) {
      if (!vars.empty() && chance(0.5)) return GlobalType::var(vars[below(static_cast<int>(vars.size()))]);
      return GlobalType::end();
    }
    if (chance(0.08)) return GlobalType::end();
    if (!vars.empty() && chance(0.15)) return GlobalType::var(vars[below(static_cast<int>(vars.size()))]);
    if (s.recursion && depth >= 2 && chance(0.15)) {
      Name t = "t" + std::to_string(vars.size());
      vars.push_back(t);
      GlobalPtr body = global_at(s, depth - 1, vars, true);
      vars.pop_back();
      return GlobalType::rec(t, body);
    }
  }
  int n = std::max(2, s.participants);
  int from = below(n);
  int to = (from + 1 + below(n - 1)) % n;
  std::vector<GlobalBranch> branches;
  for (const auto& l : some_labels(s, 3)) branches.push_back({l, sort(), global_at(s, depth - 1, vars, false)});
  return GlobalType::comm(kGlobalPeers[from], kGlobalPeers[to], std::move(branches));
}

GlobalPtr Gen::global(const Shape& s) {
  std::vector<Name> vars;
  return global_at(s, s.depth, vars, false);
}

GlobalPtr Gen::projectable_global(const Shape& s, int attempts) {
  for (int i = 0; i < attempts; ++i) {
    GlobalPtr g = global(s);
    if (projectable(g)) return g;
  }
  return nullptr;
}

ExprPtr Gen::literal(Sort s) {
  switch (s) {
    case Sort::Nat: return Expr::nat(below(10));
    case Sort::Int: return chance(0.5) ? Expr::integer(-1 - below(9)) : Expr::nat(below(10));
    case Sort::Bool: return Expr::boolean(chance(0.5));
  }
  return nullptr;
}

ExprPtr Gen::expr(int depth) {
  if (depth <= 0 || chance(0.3)) return literal(sort());
  switch (below(5)) {
    case 0: return Expr::succ(expr(depth - 1));
    case 1: return Expr::neg(expr(depth - 1));
    case 2: return Expr::logical_not(expr(depth - 1));
    case 3: return Expr::choice(expr(depth - 1), expr(depth - 1));
    default: return Expr::greater(expr(depth - 1), expr(depth - 1));
  }
}

ProcPtr Gen::process_at(int depth, std::vector<Name>& values, std::vector<Name>& procs, bool prefix_only) {
  auto peer = [&] { return Participant(kTypePeers[below(3)]); };
  auto payload = [&]() -> ExprPtr {
    if (!values.empty() && chance(0.3)) return Expr::var(values[below(static_cast<int>(values.size()))]);
    return expr(2);
  };
  auto prefix = [&]() -> ProcPtr {
    if (chance(0.5)) {
      Name x = chance(0.5) ? "x" : "y";
      values.push_back(x);
      ProcPtr body = process_at(depth - 1, values, procs, false);
      values.pop_back();
      return Process::input(peer(), label(below(4)), x, body);
    }
    ExprPtr e = payload();
    return Process::output(peer(), label(below(4)), e, process_at(depth - 1, values, procs, false));
  };
  if (prefix_only || depth <= 0) {
    if (prefix_only) return prefix();
    if (!procs.empty() && chance(0.4)) return Process::var(procs[below(static_cast<int>(procs.size()))]);
    return Process::inact();
  }
  switch (below(7)) {
    case 0: return Process::inact();
    case 1: {
      std::vector<ProcPtr> parts;
      for (int i = 0, n = 2 + below(2); i < n; ++i) parts.push_back(prefix());
      return Process::choice(std::move(parts));
    }
    case 2:
      return Process::cond(payload(), process_at(depth - 1, values, procs, false),
                           process_at(depth - 1, values, procs, false));
    case 3: {
      Name X = "X" + std::to_string(procs.size());
      procs.push_back(X);
      ProcPtr body = process_at(depth - 1, values, procs, true);
      procs.pop_back();
      return Process::rec(X, body);
    }
    default: return prefix();
  }
}

ProcPtr Gen::process(int depth) {
  std::vector<Name> values, procs;
  return process_at(depth, values, procs, false);
}

ProcPtr Gen::inhabitant(const TypePtr& t) {
  switch (t->kind) {
    case TypeKind::End: return Process::inact();
    case TypeKind::Var: return Process::var("X_" + t->name);
    case TypeKind::Rec: return Process::rec("X_" + t->name, inhabitant(t->body));
    case TypeKind::Inter: {
      std::vector<ProcPtr> summands;
      for (const auto& b : t->branches) {
        ProcPtr cont = inhabitant(b.cont);
        ExprPtr x = Expr::var("x");
        ExprPtr guard;
        switch (b.sort) {
          case Sort::Nat: guard = chance(0.5) ? Expr::greater(Expr::succ(x), Expr::nat(1)) : Expr::greater(x, Expr::nat(3)); break;
          case Sort::Int: guard = chance(0.5) ? Expr::greater(Expr::neg(x), Expr::nat(0)) : Expr::greater(Expr::integer(-2), x); break;
          case Sort::Bool: guard = chance(0.5) ? Expr::logical_not(x) : x; break;
        }
        ProcPtr body = chance(0.5) ? Process::cond(guard, cont, inhabitant(b.cont)) : cont;
        summands.push_back(Process::input(t->name, b.label, "x", body));
      }
      // An extra branch the type does not ask for.
      for (int i = 0; i < 4; ++i) {
        Label extra = label(i);
        if (!t->find(extra) && chance(0.2)) {
          summands.push_back(Process::input(t->name, extra, "y", Process::inact()));
          break;
        }
      }
      return Process::choice(std::move(summands));
    }
    case TypeKind::Union: {
      std::vector<ProcPtr> outs;
      for (const auto& b : t->branches) {
        if (!outs.empty() && chance(0.3)) continue;
        ExprPtr e = literal(b.sort);
        if (b.sort != Sort::Bool && chance(0.3)) e = Expr::choice(literal(Sort::Nat), literal(b.sort));
        if (b.sort == Sort::Bool && chance(0.3)) e = Expr::greater(literal(Sort::Int), literal(Sort::Int));
        outs.push_back(Process::output(t->name, b.label, e, inhabitant(b.cont)));
      }
      ProcPtr acc = outs.back();
      for (auto it = outs.rbegin() + 1; it != outs.rend(); ++it) {
        ExprPtr guard = chance(0.5) ? Expr::choice(Expr::boolean(true), Expr::boolean(false))
                                    : Expr::greater(literal(Sort::Int), literal(Sort::Int));
        acc = Process::cond(guard, *it, acc);
      }
      return acc;
    }
  }
  return Process::inact();
}

}  // namespace mpst::testgen
