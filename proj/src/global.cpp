#include "mpst/global.hpp"

#include <algorithm>
#include <iterator>
#include <set>

#include "mpst/errors.hpp"
#include "mpst/text.hpp"

namespace mpst {

std::string to_string(const CommAction& a) { return a.sender + " --" + a.label + "--> " + a.receiver; }

std::optional<TypePtr> merge(const TypePtr& a, const TypePtr& b) {
  if (regular_tree_equal(a, b)) return a;
  TypePtr x = unfold_head(a);
  TypePtr y = unfold_head(b);
  if (x->kind != TypeKind::Inter || y->kind != TypeKind::Inter || x->name != y->name) return std::nullopt;
  std::vector<TypeBranch> branches = x->branches;
  for (const auto& br : y->branches) {
    if (x->find(br.label)) return std::nullopt;
    branches.push_back(br);
  }
  return SessionType::inter(x->name, std::move(branches));
}

namespace {

// Participants of the regular tree of g: bound variables stand for the
// participants of their binder, so the answer does not change on unfolding.
using VarParticipants = std::map<Name, std::set<Participant>>;

std::set<Participant> reach(const GlobalPtr& g, const VarParticipants& env) {
  switch (g->kind) {
    case GlobalKind::End: return {};
    case GlobalKind::Var: {
      auto it = env.find(g->name);
      return it == env.end() ? std::set<Participant>{} : it->second;
    }
    case GlobalKind::Rec: {
      VarParticipants inner = env;
      inner[g->name] = {};
      return reach(g->body, inner);
    }
    case GlobalKind::Comm: break;
  }
  std::set<Participant> out{g->from, g->to};
  for (const auto& b : g->branches) {
    auto more = reach(b.cont, env);
    out.insert(more.begin(), more.end());
  }
  return out;
}

TypePtr project_at(const GlobalPtr& g, const Participant& r, VarParticipants& env,
                   std::vector<std::string>& path) {
  switch (g->kind) {
    case GlobalKind::End: return SessionType::end();
    case GlobalKind::Var: return SessionType::var(g->name);
    case GlobalKind::Rec: {
      VarParticipants inner = env;
      inner[g->name] = reach(g, env);
      if (!inner[g->name].count(r)) return SessionType::end();
      path.push_back("mu " + g->name);
      TypePtr body = project_at(g->body, r, inner, path);
      TypePtr result;
      try {
        result = SessionType::rec(g->name, body);
      } catch (const ParseError&) {
        throw ProjectionError(ProjectionError::Kind::UnguardedResult, r, path,
                              "projected body '" + print(body) + "' leaves " + g->name + " unguarded");
      }
      path.pop_back();
      return result;
    }
    case GlobalKind::Comm: break;
  }
  auto step = [&](const GlobalBranch& b) { return g->from + "->" + g->to + ":" + b.label; };
  if (r == g->from || r == g->to) {
    std::vector<TypeBranch> branches;
    for (const auto& b : g->branches) {
      path.push_back(step(b));
      branches.push_back({b.label, b.sort, project_at(b.cont, r, env, path)});
      path.pop_back();
    }
    return r == g->from ? SessionType::union_of(g->to, std::move(branches))
                        : SessionType::inter(g->from, std::move(branches));
  }
  std::optional<TypePtr> acc;
  for (const auto& b : g->branches) {
    path.push_back(step(b));
    TypePtr t = project_at(b.cont, r, env, path);
    path.pop_back();
    if (!acc) {
      acc = t;
      continue;
    }
    auto merged = merge(*acc, t);
    if (!merged) {
      throw ProjectionError(ProjectionError::Kind::MergeUndefined, r, path,
                            "cannot merge '" + print(*acc) + "' with '" + print(t) + "'");
    }
    acc = merged;
  }
  return *acc;
}

void check_participants_at(const GlobalPtr& g, VarParticipants& env, std::vector<std::string>& path) {
  switch (g->kind) {
    case GlobalKind::Rec: {
      VarParticipants inner = env;
      inner[g->name] = reach(g, env);
      path.push_back("mu " + g->name);
      check_participants_at(g->body, inner, path);
      path.pop_back();
      return;
    }
    case GlobalKind::Comm: {
      // Sender and receiver are participants whatever branch is taken, so
      // only the others have to agree.
      auto others = [&](const GlobalPtr& c) {
        auto pts = reach(c, env);
        pts.erase(g->from);
        pts.erase(g->to);
        return pts;
      };
      const auto expected = others(g->branches.front().cont);
      for (const auto& b : g->branches) {
        path.push_back(g->from + "->" + g->to + ":" + b.label);
        const auto found = others(b.cont);
        if (found != expected) {
          std::vector<Participant> diff;
          std::set_symmetric_difference(found.begin(), found.end(), expected.begin(), expected.end(),
                                        std::back_inserter(diff));
          throw ProjectionError(ProjectionError::Kind::ParticipantMismatch, diff.front(), path,
                                "branch '" + b.label + "' involves different participants than branch '" +
                                    g->branches.front().label + "'");
        }
        check_participants_at(b.cont, env, path);
        path.pop_back();
      }
      return;
    }
    default: return;
  }
}

std::optional<GlobalPtr> consume_at(const GlobalPtr& g, const CommAction& a, std::vector<GlobalPtr>& open) {
  switch (g->kind) {
    case GlobalKind::End:
    case GlobalKind::Var: return std::nullopt;
    case GlobalKind::Rec: {
      if (std::any_of(open.begin(), open.end(), [&](const GlobalPtr& o) { return same(o, g); })) {
        return std::nullopt;
      }
      open.push_back(g);
      auto result = consume_at(unfold(g), a, open);
      open.pop_back();
      return result;
    }
    case GlobalKind::Comm: break;
  }
  if (g->from == a.sender && g->to == a.receiver) {
    if (const GlobalBranch* b = g->find(a.label)) return b->cont;
  }
  std::vector<GlobalBranch> branches;
  for (const auto& b : g->branches) {
    auto c = consume_at(b.cont, a, open);
    if (!c) return std::nullopt;
    branches.push_back({b.label, b.sort, *c});
  }
  return GlobalType::comm(g->from, g->to, std::move(branches));
}

void frontier(const GlobalPtr& g, std::set<Participant> blocked, std::vector<GlobalPtr>& open,
              std::set<CommAction>& out) {
  switch (g->kind) {
    case GlobalKind::End:
    case GlobalKind::Var: return;
    case GlobalKind::Rec:
      if (std::any_of(open.begin(), open.end(), [&](const GlobalPtr& o) { return same(o, g); })) return;
      open.push_back(g);
      frontier(unfold(g), blocked, open, out);
      open.pop_back();
      return;
    case GlobalKind::Comm: break;
  }
  if (!blocked.count(g->from) && !blocked.count(g->to)) {
    for (const auto& b : g->branches) out.insert({g->from, b.label, g->to});
  }
  blocked.insert(g->from);
  blocked.insert(g->to);
  for (const auto& b : g->branches) frontier(b.cont, blocked, open, out);
}

}  // namespace

TypePtr project(const GlobalPtr& g, const Participant& r) {
  VarParticipants env;
  std::vector<std::string> path;
  return project_at(g, r, env, path);
}

void check_branch_participants(const GlobalPtr& g) {
  VarParticipants env;
  std::vector<std::string> path;
  check_participants_at(g, env, path);
}

std::map<Participant, TypePtr> project_all(const GlobalPtr& g) {
  check_branch_participants(g);
  std::map<Participant, TypePtr> out;
  for (const auto& r : reach(g, {})) out.emplace(r, project(g, r));
  return out;
}

bool projectable(const GlobalPtr& g) {
  try {
    project_all(g);
    return true;
  } catch (const ProjectionError&) {
    return false;
  }
}

std::optional<GlobalPtr> consume(const GlobalPtr& g, const CommAction& a) {
  std::vector<GlobalPtr> open;
  return consume_at(g, a, open);
}

std::vector<std::pair<CommAction, GlobalPtr>> global_step(const GlobalPtr& g) {
  std::set<CommAction> actions;
  std::vector<GlobalPtr> open;
  frontier(g, {}, open, actions);
  std::vector<std::pair<CommAction, GlobalPtr>> out;
  for (const auto& a : actions) {
    if (auto next = consume(g, a)) out.emplace_back(a, *next);
  }
  return out;
}

}  // namespace mpst
