#include "mpst/syntax.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <unordered_set>

#include "mpst/errors.hpp"

namespace mpst {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::size_t hash_string(const std::string& s) { return std::hash<std::string>{}(s); }

bool contains(const std::vector<Name>& sorted, const Name& n) {
  return std::binary_search(sorted.begin(), sorted.end(), n);
}

std::vector<Name> merged(const std::vector<Name>& a, const std::vector<Name>& b) {
  std::vector<Name> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<Name> without(std::vector<Name> v, const Name& n) {
  auto it = std::lower_bound(v.begin(), v.end(), n);
  if (it != v.end() && *it == n) v.erase(it);
  return v;
}

template <class Branch>
void sort_branches(std::vector<Branch>& branches, const char* what) {
  if (branches.empty()) {
    throw ParseError(ParseError::Kind::Syntax, std::string("empty branch list in ") + what);
  }
  std::sort(branches.begin(), branches.end(),
            [](const Branch& a, const Branch& b) { return a.label < b.label; });
  for (std::size_t i = 1; i < branches.size(); ++i) {
    if (branches[i - 1].label == branches[i].label) {
      throw ParseError(ParseError::Kind::DuplicateLabel,
                       "duplicate label '" + branches[i].label + "' in " + what);
    }
  }
}

// True iff `var` occurs in `t` without an enclosing communication prefix.
bool occurs_unguarded(const SessionType& t, const Name& var) {
  switch (t.kind) {
    case TypeKind::Var: return t.name == var;
    case TypeKind::Rec: return t.name != var && occurs_unguarded(*t.body, var);
    default: return false;
  }
}

bool occurs_unguarded(const GlobalType& g, const Name& var) {
  switch (g.kind) {
    case GlobalKind::Var: return g.name == var;
    case GlobalKind::Rec: return g.name != var && occurs_unguarded(*g.body, var);
    default: return false;
  }
}

// Conditionals and external choice are transparent; only prefixes guard.
bool occurs_unguarded(const Process& p, const Name& var) {
  switch (p.kind) {
    case ProcKind::Var: return p.name == var;
    case ProcKind::Rec: return p.name != var && occurs_unguarded(*p.body(), var);
    case ProcKind::Choice:
    case ProcKind::Cond:
      return std::any_of(p.kids.begin(), p.kids.end(),
                         [&](const ProcPtr& k) { return occurs_unguarded(*k, var); });
    default: return false;
  }
}

std::size_t expr_hash(const Expr& e) {
  std::size_t h = mix(0x51ed27, static_cast<std::size_t>(e.kind));
  h = mix(h, static_cast<std::size_t>(e.number));
  if (!e.name.empty()) h = mix(h, hash_string(e.name));
  if (e.lhs) h = mix(h, e.lhs->hash);
  if (e.rhs) h = mix(h, e.rhs->hash);
  return h;
}

ExprPtr make_expr(Expr e) {
  if (e.kind == ExprKind::Var) {
    e.free = {e.name};
  } else if (e.lhs && e.rhs) {
    e.free = merged(e.lhs->free, e.rhs->free);
  } else if (e.lhs) {
    e.free = e.lhs->free;
  }
  e.hash = expr_hash(e);
  return std::make_shared<const Expr>(std::move(e));
}

ProcPtr make_proc(Process p) {
  std::size_t h = mix(0x7a11, static_cast<std::size_t>(p.kind));
  h = mix(h, hash_string(p.peer));
  h = mix(h, hash_string(p.label));
  h = mix(h, hash_string(p.name));
  if (p.expr) {
    h = mix(h, p.expr->hash);
    p.free_values = p.expr->free;
  }
  for (const auto& k : p.kids) {
    h = mix(h, k->hash);
    p.free_values = merged(p.free_values, k->free_values);
    p.free_processes = merged(p.free_processes, k->free_processes);
  }
  switch (p.kind) {
    case ProcKind::Input: p.free_values = without(std::move(p.free_values), p.name); break;
    case ProcKind::Rec: p.free_processes = without(std::move(p.free_processes), p.name); break;
    case ProcKind::Var: p.free_processes = {p.name}; break;
    default: break;
  }
  p.hash = h;
  return std::make_shared<const Process>(std::move(p));
}

TypePtr make_type(SessionType t) {
  std::size_t h = mix(0x7e9e, static_cast<std::size_t>(t.kind));
  h = mix(h, hash_string(t.name));
  for (const auto& b : t.branches) {
    h = mix(h, hash_string(b.label));
    h = mix(h, static_cast<std::size_t>(b.sort));
    h = mix(h, b.cont->hash);
    t.free = merged(t.free, b.cont->free);
  }
  if (t.body) {
    h = mix(h, t.body->hash);
    t.free = without(t.body->free, t.name);
  }
  if (t.kind == TypeKind::Var) t.free = {t.name};
  t.hash = h;
  return std::make_shared<const SessionType>(std::move(t));
}

GlobalPtr make_global(GlobalType g) {
  std::size_t h = mix(0x610b, static_cast<std::size_t>(g.kind));
  h = mix(h, hash_string(g.from));
  h = mix(h, hash_string(g.to));
  h = mix(h, hash_string(g.name));
  for (const auto& b : g.branches) {
    h = mix(h, hash_string(b.label));
    h = mix(h, static_cast<std::size_t>(b.sort));
    h = mix(h, b.cont->hash);
    g.free = merged(g.free, b.cont->free);
  }
  if (g.body) {
    h = mix(h, g.body->hash);
    g.free = without(g.body->free, g.name);
  }
  if (g.kind == GlobalKind::Var) g.free = {g.name};
  g.hash = h;
  return std::make_shared<const GlobalType>(std::move(g));
}

}  // namespace

std::string_view to_string(Sort sort) {
  switch (sort) {
    case Sort::Nat: return "nat";
    case Sort::Int: return "int";
    case Sort::Bool: return "bool";
  }
  return "?";
}

bool is_keyword(std::string_view text) {
  static constexpr std::array<std::string_view, 13> kKeywords = {
      "mu", "end", "if", "then", "else", "true", "false",
      "succ", "neg", "not", "nat", "int", "bool"};
  return std::find(kKeywords.begin(), kKeywords.end(), text) != kKeywords.end();
}

bool is_identifier(std::string_view text) {
  if (text.empty() || is_keyword(text)) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(text.front())) return false;
  return std::all_of(text.begin() + 1, text.end(), [&](char c) { return alpha(c) || digit(c); });
}

// ---------------------------------------------------------------------------
// Factories

ExprPtr Expr::var(Name x) { return make_expr(Expr{.kind = ExprKind::Var, .name = std::move(x)}); }

ExprPtr Expr::nat(std::int64_t n) {
  if (n < 0) throw ParseError(ParseError::Kind::Syntax, "natural literal must be non-negative");
  return make_expr(Expr{.kind = ExprKind::Nat, .number = n});
}

ExprPtr Expr::integer(std::int64_t i) { return make_expr(Expr{.kind = ExprKind::Int, .number = i}); }

ExprPtr Expr::boolean(bool b) { return make_expr(Expr{.kind = ExprKind::Bool, .number = b ? 1 : 0}); }

ExprPtr Expr::succ(ExprPtr e) { return make_expr(Expr{.kind = ExprKind::Succ, .lhs = std::move(e)}); }

ExprPtr Expr::neg(ExprPtr e) { return make_expr(Expr{.kind = ExprKind::Neg, .lhs = std::move(e)}); }

ExprPtr Expr::logical_not(ExprPtr e) {
  return make_expr(Expr{.kind = ExprKind::Not, .lhs = std::move(e)});
}

ExprPtr Expr::choice(ExprPtr a, ExprPtr b) {
  return make_expr(Expr{.kind = ExprKind::Choice, .lhs = std::move(a), .rhs = std::move(b)});
}

ExprPtr Expr::greater(ExprPtr a, ExprPtr b) {
  return make_expr(Expr{.kind = ExprKind::Gt, .lhs = std::move(a), .rhs = std::move(b)});
}

ProcPtr Process::input(Participant from, Label label, Name x, ProcPtr body) {
  return make_proc(Process{.kind = ProcKind::Input,
                           .peer = std::move(from),
                           .label = std::move(label),
                           .name = std::move(x),
                           .kids = {std::move(body)}});
}

ProcPtr Process::output(Participant to, Label label, ExprPtr payload, ProcPtr body) {
  return make_proc(Process{.kind = ProcKind::Output,
                           .peer = std::move(to),
                           .label = std::move(label),
                           .expr = std::move(payload),
                           .kids = {std::move(body)}});
}

ProcPtr Process::choice(std::vector<ProcPtr> summands) {
  std::vector<ProcPtr> flat;
  for (auto& s : summands) {
    if (s->kind == ProcKind::Choice) {
      flat.insert(flat.end(), s->kids.begin(), s->kids.end());
    } else {
      flat.push_back(std::move(s));
    }
  }
  if (flat.empty()) throw ParseError(ParseError::Kind::Syntax, "empty external choice");
  if (flat.size() == 1) return flat.front();
  return make_proc(Process{.kind = ProcKind::Choice, .kids = std::move(flat)});
}

ProcPtr Process::cond(ExprPtr guard, ProcPtr then_branch, ProcPtr else_branch) {
  return make_proc(Process{.kind = ProcKind::Cond,
                           .expr = std::move(guard),
                           .kids = {std::move(then_branch), std::move(else_branch)}});
}

ProcPtr Process::rec(Name x, ProcPtr body) {
  if (occurs_unguarded(*body, x)) {
    throw ParseError(ParseError::Kind::UnguardedRecursion,
                     "process variable '" + x + "' is not guarded by a prefix");
  }
  return make_proc(Process{.kind = ProcKind::Rec, .name = std::move(x), .kids = {std::move(body)}});
}

ProcPtr Process::var(Name x) { return make_proc(Process{.kind = ProcKind::Var, .name = std::move(x)}); }

ProcPtr Process::inact() {
  static const ProcPtr zero = make_proc(Process{.kind = ProcKind::Inact});
  return zero;
}

Session Session::make(std::vector<std::pair<Participant, ProcPtr>> members) {
  if (members.empty()) throw ParseError(ParseError::Kind::Syntax, "a session needs at least one participant");
  Members map;
  for (auto& [p, proc] : members) {
    if (participants(proc).count(p) != 0) {
      throw ParseError(ParseError::Kind::SelfCommunication,
                       "participant '" + p + "' communicates with itself");
    }
    if (!map.emplace(p, std::move(proc)).second) {
      throw ParseError(ParseError::Kind::Syntax, "participant '" + p + "' occurs twice in the session");
    }
  }
  return Session(std::move(map));
}

TypePtr SessionType::inter(Participant from, std::vector<TypeBranch> branches) {
  sort_branches(branches, "intersection");
  return make_type(
      SessionType{.kind = TypeKind::Inter, .name = std::move(from), .branches = std::move(branches)});
}

TypePtr SessionType::union_of(Participant to, std::vector<TypeBranch> branches) {
  sort_branches(branches, "union");
  return make_type(
      SessionType{.kind = TypeKind::Union, .name = std::move(to), .branches = std::move(branches)});
}

TypePtr SessionType::input(Participant from, Label label, Sort sort, TypePtr cont) {
  return inter(std::move(from), {TypeBranch{std::move(label), sort, std::move(cont)}});
}

TypePtr SessionType::output(Participant to, Label label, Sort sort, TypePtr cont) {
  return union_of(std::move(to), {TypeBranch{std::move(label), sort, std::move(cont)}});
}

TypePtr SessionType::rec(Name t, TypePtr body) {
  if (occurs_unguarded(*body, t)) {
    throw ParseError(ParseError::Kind::UnguardedRecursion,
                     "type variable '" + t + "' is not guarded by a prefix");
  }
  return make_type(SessionType{.kind = TypeKind::Rec, .name = std::move(t), .body = std::move(body)});
}

TypePtr SessionType::var(Name t) { return make_type(SessionType{.kind = TypeKind::Var, .name = std::move(t)}); }

TypePtr SessionType::end() {
  static const TypePtr e = make_type(SessionType{.kind = TypeKind::End});
  return e;
}

const TypeBranch* SessionType::find(const Label& label) const {
  auto it = std::lower_bound(branches.begin(), branches.end(), label,
                             [](const TypeBranch& b, const Label& l) { return b.label < l; });
  return it != branches.end() && it->label == label ? &*it : nullptr;
}

GlobalPtr GlobalType::comm(Participant from, Participant to, std::vector<GlobalBranch> branches) {
  if (from == to) {
    throw ParseError(ParseError::Kind::SelfCommunication,
                     "participant '" + from + "' communicates with itself");
  }
  sort_branches(branches, "communication");
  return make_global(GlobalType{.kind = GlobalKind::Comm,
                                .from = std::move(from),
                                .to = std::move(to),
                                .branches = std::move(branches)});
}

GlobalPtr GlobalType::message(Participant from, Participant to, Label label, Sort sort, GlobalPtr cont) {
  return comm(std::move(from), std::move(to), {GlobalBranch{std::move(label), sort, std::move(cont)}});
}

GlobalPtr GlobalType::rec(Name t, GlobalPtr body) {
  if (occurs_unguarded(*body, t)) {
    throw ParseError(ParseError::Kind::UnguardedRecursion,
                     "type variable '" + t + "' is not guarded by a communication");
  }
  return make_global(GlobalType{.kind = GlobalKind::Rec, .name = std::move(t), .body = std::move(body)});
}

GlobalPtr GlobalType::var(Name t) { return make_global(GlobalType{.kind = GlobalKind::Var, .name = std::move(t)}); }

GlobalPtr GlobalType::end() {
  static const GlobalPtr e = make_global(GlobalType{.kind = GlobalKind::End});
  return e;
}

const GlobalBranch* GlobalType::find(const Label& label) const {
  auto it = std::lower_bound(branches.begin(), branches.end(), label,
                             [](const GlobalBranch& b, const Label& l) { return b.label < l; });
  return it != branches.end() && it->label == label ? &*it : nullptr;
}

// ---------------------------------------------------------------------------
// Equality and order

bool same(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->hash != b->hash || a->kind != b->kind || a->number != b->number || a->name != b->name) {
    return false;
  }
  return same(a->lhs, b->lhs) && same(a->rhs, b->rhs);
}

bool same(const ProcPtr& a, const ProcPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->hash != b->hash || a->kind != b->kind || a->peer != b->peer || a->label != b->label ||
      a->name != b->name || a->kids.size() != b->kids.size() || !same(a->expr, b->expr)) {
    return false;
  }
  for (std::size_t i = 0; i < a->kids.size(); ++i) {
    if (!same(a->kids[i], b->kids[i])) return false;
  }
  return true;
}

bool same(const TypePtr& a, const TypePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->hash != b->hash || a->kind != b->kind || a->name != b->name ||
      a->branches.size() != b->branches.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a->branches.size(); ++i) {
    const auto& x = a->branches[i];
    const auto& y = b->branches[i];
    if (x.label != y.label || x.sort != y.sort || !same(x.cont, y.cont)) return false;
  }
  return same(a->body, b->body);
}

bool same(const GlobalPtr& a, const GlobalPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->hash != b->hash || a->kind != b->kind || a->from != b->from || a->to != b->to ||
      a->name != b->name || a->branches.size() != b->branches.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a->branches.size(); ++i) {
    const auto& x = a->branches[i];
    const auto& y = b->branches[i];
    if (x.label != y.label || x.sort != y.sort || !same(x.cont, y.cont)) return false;
  }
  return same(a->body, b->body);
}

namespace {
template <class T>
int three_way(const T& a, const T& b) {
  return a < b ? -1 : (b < a ? 1 : 0);
}
}  // namespace

int compare(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return 0;
  if (!a || !b) return a ? 1 : -1;
  if (int c = three_way(a->hash, b->hash)) return c;
  if (int c = three_way(a->kind, b->kind)) return c;
  if (int c = three_way(a->number, b->number)) return c;
  if (int c = a->name.compare(b->name)) return c < 0 ? -1 : 1;
  if (int c = compare(a->lhs, b->lhs)) return c;
  return compare(a->rhs, b->rhs);
}

int compare(const ProcPtr& a, const ProcPtr& b) {
  if (a == b) return 0;
  if (int c = three_way(a->hash, b->hash)) return c;
  if (int c = three_way(a->kind, b->kind)) return c;
  if (int c = three_way(a->peer, b->peer)) return c;
  if (int c = three_way(a->label, b->label)) return c;
  if (int c = three_way(a->name, b->name)) return c;
  if (int c = compare(a->expr, b->expr)) return c;
  if (int c = three_way(a->kids.size(), b->kids.size())) return c;
  for (std::size_t i = 0; i < a->kids.size(); ++i) {
    if (int c = compare(a->kids[i], b->kids[i])) return c;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Participants

namespace {
void collect(const Process& p, std::set<Participant>& out) {
  if (p.kind == ProcKind::Input || p.kind == ProcKind::Output) out.insert(p.peer);
  for (const auto& k : p.kids) collect(*k, out);
}

void collect(const SessionType& t, std::set<Participant>& out) {
  switch (t.kind) {
    case TypeKind::Inter:
    case TypeKind::Union:
      out.insert(t.name);
      for (const auto& b : t.branches) collect(*b.cont, out);
      break;
    case TypeKind::Rec: collect(*t.body, out); break;
    default: break;
  }
}

void collect(const GlobalType& g, std::set<Participant>& out) {
  switch (g.kind) {
    case GlobalKind::Comm:
      out.insert(g.from);
      out.insert(g.to);
      collect(*g.branches.front().cont, out);
      break;
    case GlobalKind::Rec: collect(*g.body, out); break;
    default: break;
  }
}
}  // namespace

std::set<Participant> participants(const ProcPtr& p) {
  std::set<Participant> out;
  collect(*p, out);
  return out;
}

std::set<Participant> participants(const TypePtr& t) {
  std::set<Participant> out;
  collect(*t, out);
  return out;
}

std::set<Participant> participants(const GlobalPtr& g) {
  std::set<Participant> out;
  collect(*g, out);
  return out;
}

// ---------------------------------------------------------------------------
// Substitution

Name fresh_name(const Name& base, const std::set<Name>& taken) {
  if (!taken.count(base)) return base;
  for (int i = 1;; ++i) {
    Name candidate = base + "_" + std::to_string(i);
    if (!taken.count(candidate)) return candidate;
  }
}

namespace {
std::set<Name> name_set(std::initializer_list<const std::vector<Name>*> lists, const Name& extra) {
  std::set<Name> out{extra};
  for (const auto* l : lists) out.insert(l->begin(), l->end());
  return out;
}
}  // namespace

TypePtr substitute(const TypePtr& in, const Name& var, const TypePtr& by) {
  if (!contains(in->free, var)) return in;
  switch (in->kind) {
    case TypeKind::Var: return by;
    case TypeKind::Inter:
    case TypeKind::Union: {
      std::vector<TypeBranch> branches;
      branches.reserve(in->branches.size());
      for (const auto& b : in->branches) branches.push_back({b.label, b.sort, substitute(b.cont, var, by)});
      return in->kind == TypeKind::Inter ? SessionType::inter(in->name, std::move(branches))
                                         : SessionType::union_of(in->name, std::move(branches));
    }
    case TypeKind::Rec: {
      if (contains(by->free, in->name)) {
        Name renamed = fresh_name(in->name, name_set({&by->free, &in->body->free}, var));
        TypePtr body = substitute(in->body, in->name, SessionType::var(renamed));
        return SessionType::rec(renamed, substitute(body, var, by));
      }
      return SessionType::rec(in->name, substitute(in->body, var, by));
    }
    case TypeKind::End: break;
  }
  return in;
}

GlobalPtr substitute(const GlobalPtr& in, const Name& var, const GlobalPtr& by) {
  if (!contains(in->free, var)) return in;
  switch (in->kind) {
    case GlobalKind::Var: return by;
    case GlobalKind::Comm: {
      std::vector<GlobalBranch> branches;
      branches.reserve(in->branches.size());
      for (const auto& b : in->branches) branches.push_back({b.label, b.sort, substitute(b.cont, var, by)});
      return GlobalType::comm(in->from, in->to, std::move(branches));
    }
    case GlobalKind::Rec: {
      if (contains(by->free, in->name)) {
        Name renamed = fresh_name(in->name, name_set({&by->free, &in->body->free}, var));
        GlobalPtr body = substitute(in->body, in->name, GlobalType::var(renamed));
        return GlobalType::rec(renamed, substitute(body, var, by));
      }
      return GlobalType::rec(in->name, substitute(in->body, var, by));
    }
    case GlobalKind::End: break;
  }
  return in;
}

ExprPtr substitute_value(const ExprPtr& in, const Name& x, const ExprPtr& value) {
  if (!contains(in->free, x)) return in;
  switch (in->kind) {
    case ExprKind::Var: return value;
    case ExprKind::Succ: return Expr::succ(substitute_value(in->lhs, x, value));
    case ExprKind::Neg: return Expr::neg(substitute_value(in->lhs, x, value));
    case ExprKind::Not: return Expr::logical_not(substitute_value(in->lhs, x, value));
    case ExprKind::Choice:
      return Expr::choice(substitute_value(in->lhs, x, value), substitute_value(in->rhs, x, value));
    case ExprKind::Gt:
      return Expr::greater(substitute_value(in->lhs, x, value), substitute_value(in->rhs, x, value));
    default: return in;
  }
}

namespace {

// Rebuilds `p` with new children (and payload), keeping everything else.
ProcPtr rebuild(const Process& p, std::vector<ProcPtr> kids, ExprPtr expr) {
  switch (p.kind) {
    case ProcKind::Input: return Process::input(p.peer, p.label, p.name, std::move(kids[0]));
    case ProcKind::Output: return Process::output(p.peer, p.label, std::move(expr), std::move(kids[0]));
    case ProcKind::Choice: return Process::choice(std::move(kids));
    case ProcKind::Cond: return Process::cond(std::move(expr), std::move(kids[0]), std::move(kids[1]));
    case ProcKind::Rec: return Process::rec(p.name, std::move(kids[0]));
    default: break;
  }
  return nullptr;
}

}  // namespace

ProcPtr substitute_value(const ProcPtr& in, const Name& x, const ExprPtr& value) {
  if (!contains(in->free_values, x)) return in;
  if (in->kind == ProcKind::Input) {
    if (in->name == x) return in;
    if (contains(value->free, in->name)) {
      std::set<Name> taken = name_set({&value->free, &in->body()->free_values}, x);
      Name renamed = fresh_name(in->name, taken);
      ProcPtr body = substitute_value(in->body(), in->name, Expr::var(renamed));
      return Process::input(in->peer, in->label, renamed, substitute_value(body, x, value));
    }
  }
  std::vector<ProcPtr> kids;
  kids.reserve(in->kids.size());
  for (const auto& k : in->kids) kids.push_back(substitute_value(k, x, value));
  ExprPtr expr = in->expr ? substitute_value(in->expr, x, value) : nullptr;
  return rebuild(*in, std::move(kids), std::move(expr));
}

ProcPtr substitute_process(const ProcPtr& in, const Name& var, const ProcPtr& by) {
  if (!contains(in->free_processes, var)) return in;
  switch (in->kind) {
    case ProcKind::Var: return by;
    case ProcKind::Rec:
      if (contains(by->free_processes, in->name)) {
        std::set<Name> taken = name_set({&by->free_processes, &in->body()->free_processes}, var);
        Name renamed = fresh_name(in->name, taken);
        ProcPtr body = substitute_process(in->body(), in->name, Process::var(renamed));
        return Process::rec(renamed, substitute_process(body, var, by));
      }
      break;
    case ProcKind::Input:
      if (contains(by->free_values, in->name)) {
        std::set<Name> taken = name_set({&by->free_values, &in->body()->free_values}, in->name);
        Name renamed = fresh_name(in->name, taken);
        ProcPtr body = substitute_value(in->body(), in->name, Expr::var(renamed));
        return Process::input(in->peer, in->label, renamed, substitute_process(body, var, by));
      }
      break;
    default: break;
  }
  std::vector<ProcPtr> kids;
  kids.reserve(in->kids.size());
  for (const auto& k : in->kids) kids.push_back(substitute_process(k, var, by));
  return rebuild(*in, std::move(kids), in->expr);
}

TypePtr unfold(const TypePtr& t) {
  return t->kind == TypeKind::Rec ? substitute(t->body, t->name, t) : t;
}

GlobalPtr unfold(const GlobalPtr& g) {
  return g->kind == GlobalKind::Rec ? substitute(g->body, g->name, g) : g;
}

ProcPtr unfold(const ProcPtr& p) {
  return p->kind == ProcKind::Rec ? substitute_process(p->body(), p->name, p) : p;
}

TypePtr unfold_head(TypePtr t) {
  while (t->kind == TypeKind::Rec) t = unfold(t);
  return t;
}

GlobalPtr unfold_head(GlobalPtr g) {
  while (g->kind == GlobalKind::Rec) g = unfold(g);
  return g;
}

ProcPtr unfold_head(ProcPtr p) {
  while (p->kind == ProcKind::Rec) p = unfold(p);
  return p;
}

// ---------------------------------------------------------------------------
// Regular tree equality

namespace {

template <class Ptr, class Step>
bool bisimilar(const Ptr& a, const Ptr& b, Step step) {
  std::unordered_set<std::pair<Ptr, Ptr>, PairHash<Ptr>, PairEqual<Ptr>> assumed;
  std::vector<std::pair<Ptr, Ptr>> pending{{a, b}};
  while (!pending.empty()) {
    auto [x, y] = std::move(pending.back());
    pending.pop_back();
    if (same(x, y) || !assumed.emplace(x, y).second) continue;
    if (!step(unfold_head(x), unfold_head(y), pending)) return false;
  }
  return true;
}

}  // namespace

bool regular_tree_equal(const TypePtr& a, const TypePtr& b) {
  return bisimilar(a, b, [](const TypePtr& x, const TypePtr& y, std::vector<std::pair<TypePtr, TypePtr>>& next) {
    if (x->kind != y->kind || x->name != y->name || x->branches.size() != y->branches.size()) return false;
    for (std::size_t i = 0; i < x->branches.size(); ++i) {
      const auto& bx = x->branches[i];
      const auto& by = y->branches[i];
      if (bx.label != by.label || bx.sort != by.sort) return false;
      next.emplace_back(bx.cont, by.cont);
    }
    return true;
  });
}

bool regular_tree_equal(const GlobalPtr& a, const GlobalPtr& b) {
  return bisimilar(a, b, [](const GlobalPtr& x, const GlobalPtr& y, std::vector<std::pair<GlobalPtr, GlobalPtr>>& next) {
    if (x->kind != y->kind || x->name != y->name || x->from != y->from || x->to != y->to ||
        x->branches.size() != y->branches.size()) {
      return false;
    }
    for (std::size_t i = 0; i < x->branches.size(); ++i) {
      const auto& bx = x->branches[i];
      const auto& by = y->branches[i];
      if (bx.label != by.label || bx.sort != by.sort) return false;
      next.emplace_back(bx.cont, by.cont);
    }
    return true;
  });
}

std::size_t unfolding_closure_size(const TypePtr& t) {
  std::unordered_set<TypePtr, StructuralHash<TypePtr>, StructuralEqual<TypePtr>> seen{t};
  std::vector<TypePtr> pending{t};
  while (!pending.empty()) {
    TypePtr head = unfold_head(pending.back());
    pending.pop_back();
    for (const auto& b : head->branches) {
      if (seen.insert(b.cont).second) pending.push_back(b.cont);
    }
  }
  return seen.size();
}

}  // namespace mpst
